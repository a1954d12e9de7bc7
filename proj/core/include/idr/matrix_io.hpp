#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "idr/linalg.hpp"

namespace idr {

// Row-major CSV, no header, 17 significant digits. Values round-trip
// bit-exactly through read_matrix_csv.
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);
Matrix read_matrix_csv(const std::filesystem::path& path);
std::string format_matrix_csv(const Matrix& m);
Matrix parse_matrix_csv(const std::string& text);

// One integer label per line.
void write_labels_csv(const std::vector<int>& labels,
                      const std::filesystem::path& path);
std::vector<int> read_labels_csv(const std::filesystem::path& path);

// Formats a double with 17 significant digits.
std::string format_double(double v);

// Quotes a field per RFC 4180 when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

// Splits one CSV record honoring RFC 4180 quoting.
std::vector<std::string> split_csv_record(const std::string& line);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace idr
