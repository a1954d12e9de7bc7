#include "idr/matrix_io.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <filesystem>
#include <functional>
#include <random>

#include "idr/error.hpp"

namespace idr {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("idr_io_test_" + name);
  fs::remove_all(dir);
  return dir;
}

void expect_io_error(const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected IoError";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIoError);
  }
}

TEST(MatrixCsv, IdentityText) {
  EXPECT_EQ(format_matrix_csv(Matrix::Identity(2, 2)), "1,0\n0,1\n");
}

TEST(MatrixCsv, RoundTripIsBitExact) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 1e3);
  Matrix m(5, 5);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = normal(rng);
  m(0, 0) = 1e-300;
  m(1, 1) = -0.0;
  m(2, 2) = 0.1;
  const fs::path dir = scratch_dir("roundtrip");
  write_matrix_csv(m, dir / "nested" / "m.csv");
  const Matrix back = read_matrix_csv(dir / "nested" / "m.csv");
  ASSERT_EQ(back.rows(), 5);
  ASSERT_EQ(back.cols(), 5);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(back(i)), std::bit_cast<std::uint64_t>(m(i)));
  }
  fs::remove_all(dir);
}

TEST(MatrixCsv, ParsesCrlfAndWhitespace) {
  const Matrix m = parse_matrix_csv("1, 2\r\n3,4\r\n\n");
  Matrix expected(2, 2);
  expected << 1, 2, 3, 4;
  EXPECT_EQ(m, expected);
}

TEST(MatrixCsv, Errors) {
  expect_io_error([] { parse_matrix_csv("1,2\n3\n"); });
  expect_io_error([] { parse_matrix_csv("1,abc\n"); });
  expect_io_error([] { parse_matrix_csv(""); });
  expect_io_error([] { read_matrix_csv("/nonexistent/dir/x.csv"); });
}

TEST(LabelsCsv, RoundTripAndErrors) {
  const fs::path dir = scratch_dir("labels");
  const std::vector<int> labels = {0, 3, 1, 1, 2};
  write_labels_csv(labels, dir / "l.csv");
  EXPECT_EQ(read_labels_csv(dir / "l.csv"), labels);
  write_text_file(dir / "bad.csv", "0\nx\n");
  expect_io_error([&] { read_labels_csv(dir / "bad.csv"); });
  fs::remove_all(dir);
}

TEST(CsvField, QuotingRoundTrip) {
  EXPECT_EQ(csv_field("ok"), "ok");
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  const std::vector<std::string> fields = {"plain", "a,b", "q\"uote", ""};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  EXPECT_EQ(split_csv_record(line), fields);
}

TEST(FormatDouble, SeventeenDigits) {
  EXPECT_EQ(std::stod(format_double(0.1)), 0.1);
  EXPECT_EQ(format_double(1.0), "1");
}

TEST(WriteTextFile, UnwritablePath) {
  expect_io_error([] { write_text_file("/proc/idr_cannot_write/x.txt", "x"); });
}

}  // namespace
}  // namespace idr
