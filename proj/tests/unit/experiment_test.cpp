#include "idr/experiment.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "idr/error.hpp"
#include "idr/matrix_io.hpp"

namespace idr {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("idr_experiment_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig tiny_config(const fs::path& out) {
  ExperimentConfig cfg;
  cfg.synth.num_subspaces = 3;
  cfg.synth.subspace_dim = 2;
  cfg.synth.ambient_dim = 6;
  cfg.synth.points_per = 8;
  cfg.gamma_grid = {0.01, 1.0};
  cfg.lambda_grid = {0.1, 1.0};
  cfg.corruptions = {0.0, 0.5};
  cfg.trials = 2;
  cfg.output_dir = out;
  cfg.threads = 2;
  cfg.solver.maxiter = 200;
  return cfg;
}

void expect_invalid(ExperimentConfig cfg) {
  try {
    cfg.finalize();
    ADD_FAILURE() << "expected InvalidConfig";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
  }
}

TEST(DefaultGrids, MatchPublishedValues) {
  const std::vector<double> idr = {0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2,
                                   0.5,   1,     5,    10,   50,   100, 200};
  EXPECT_EQ(idr_default_grid(), idr);
  const std::vector<double> lsr = {0.0001, 0.001, 0.01, 0.05, 0.1, 0.2, 0.5, 1,
                                   2,      5,     8,    10,   15,  20,  50};
  EXPECT_EQ(lsr_default_grid(), lsr);
}

TEST(ExperimentConfig, FinalizeDefaults) {
  ExperimentConfig cfg;
  cfg.finalize();
  EXPECT_EQ(cfg.gamma_grid, idr_default_grid());
  EXPECT_EQ(cfg.lambda_grid, idr_default_grid());
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
  EXPECT_EQ(cfg.resolved_k(), 5);

  ExperimentConfig lsr;
  lsr.method = Method::kLsr;
  lsr.finalize();
  EXPECT_EQ(lsr.lambda_grid, lsr_default_grid());
  EXPECT_EQ(lsr.gamma_grid.size(), 1u);

  ExperimentConfig seeded;
  seeded.seeds = {11, 12};
  seeded.finalize();
  EXPECT_EQ(seeded.trials, 2);
}

TEST(ExperimentConfig, Validation) {
  ExperimentConfig c;
  c.trials = 0;
  expect_invalid(c);
  c = {};
  c.corruptions = {1.5};
  expect_invalid(c);
  c = {};
  c.gamma_grid = {-1.0};
  expect_invalid(c);
  c = {};
  c.data_path = "x.csv";
  expect_invalid(c);
}

TEST(LoadExperimentConfig, ParsesAndRejects) {
  const fs::path dir = scratch_dir("config");
  write_text_file(dir / "ok.json", R"({
    "synthetic": {"num_subspaces": 3, "points_per": 10},
    "method": "lsr", "lambda_grid": [0.5, 1], "corruptions": [0.0],
    "seeds": [7, 8, 9], "k": 3, "output_dir": "out",
    "solver": {"maxiter": 50, "normalization": "strict"}
  })");
  const ExperimentConfig cfg = load_experiment_config(dir / "ok.json");
  EXPECT_EQ(cfg.method, Method::kLsr);
  EXPECT_EQ(cfg.synth.num_subspaces, 3);
  EXPECT_EQ(cfg.lambda_grid, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{7, 8, 9}));
  EXPECT_EQ(cfg.solver.maxiter, 50);
  EXPECT_EQ(cfg.solver.normalization, NormalizationPolicy::kStrict);

  auto expect_bad = [&](const std::string& text) {
    write_text_file(dir / "bad.json", text);
    try {
      load_experiment_config(dir / "bad.json");
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig) << text;
    }
  };
  expect_bad(R"({"unknown": 1})");
  expect_bad(R"({"trials": 0})");
  expect_bad(R"({"seeds": []})");
  expect_bad(R"({"gamma_grid": []})");
  expect_bad(R"({"method": "ssc"})");
  expect_bad("{not json");
  fs::remove_all(dir);
}

TEST(RunSweep, EmptyTrialsWritesNothing) {
  const fs::path dir = scratch_dir("empty");
  ExperimentConfig cfg = tiny_config(dir);
  cfg.trials = 0;
  EXPECT_THROW(run_sweep(cfg), Error);
  EXPECT_FALSE(fs::exists(dir));
}

TEST(RunSweep, DeterministicResumableAndSummarized) {
  const fs::path a = scratch_dir("a"), b = scratch_dir("b");
  const SweepResult first = run_sweep(tiny_config(a));
  EXPECT_EQ(first.cells_run, 16);
  EXPECT_EQ(first.records.size(), 16u);
  const std::string text_a = read_text_file(a / "results.csv");

  ExperimentConfig single = tiny_config(b);
  single.threads = 1;
  run_sweep(single);
  EXPECT_EQ(read_text_file(b / "results.csv"), text_a);

  // Drop half the rows and resume.
  std::istringstream in(text_a);
  std::string line, partial;
  for (int i = 0; std::getline(in, line); ++i) {
    if (i <= 8) partial += line + "\n";
  }
  write_text_file(b / "results.csv", partial);
  const SweepResult resumed = run_sweep(single);
  EXPECT_EQ(resumed.cells_reused, 8);
  EXPECT_EQ(resumed.cells_run, 8);
  EXPECT_EQ(read_text_file(b / "results.csv"), text_a);

  // Full rerun reuses everything.
  EXPECT_EQ(run_sweep(single).cells_run, 0);

  // Records obey their invariants and summary.csv recomputes independently.
  const auto records = parse_results_csv(text_a);
  std::map<std::pair<double, int>, double> best;
  for (const auto& r : records) {
    EXPECT_EQ(r.status, "ok");
    EXPECT_EQ(r.sa_best, std::max(r.sa_z, r.sa_s));
    EXPECT_GE(r.sa_z, 0.0);
    EXPECT_LE(r.sa_z, 1.0);
    double& v = best[{r.p, r.trial}];
    v = std::max(v, r.sa_best);
  }
  std::map<double, std::vector<double>> per_p;
  for (const auto& [key, v] : best) per_p[key.first].push_back(v);
  std::string expected = "p,trials,mean_best_accuracy,std_best_accuracy\n";
  for (double p : {0.0, 0.5}) {
    const auto& vals = per_p[p];
    const double mean = (vals[0] + vals[1]) / 2.0;
    const double sd = std::sqrt(((vals[0] - mean) * (vals[0] - mean) +
                                 (vals[1] - mean) * (vals[1] - mean)) / 1.0);
    const SummaryRow* row = nullptr;
    for (const auto& r : first.summary) if (r.p == p) row = &r;
    ASSERT_NE(row, nullptr);
    EXPECT_NEAR(row->mean_best, mean, 1e-15);
    EXPECT_NEAR(row->std_best, sd, 1e-15);
    EXPECT_EQ(row->trials, 2);
  }
  EXPECT_EQ(read_text_file(a / "summary.csv"), format_summary_csv(summarize(records)));
  EXPECT_TRUE(fs::exists(a / "timings.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(RunSweep, SolverErrorsAreRecordedPerRow) {
  const fs::path dir = scratch_dir("errors");
  ExperimentConfig cfg = tiny_config(dir);
  cfg.corruptions = {0.0};
  cfg.trials = 1;
  cfg.k = 100;  // more clusters than points
  const SweepResult res = run_sweep(cfg);
  for (const auto& r : res.records) EXPECT_EQ(r.status, "error:InvalidK");
  EXPECT_NE(read_text_file(dir / "results.csv").find("error:InvalidK"), std::string::npos);
  fs::remove_all(dir);
}

TEST(RunSweep, LoadsCsvData) {
  const fs::path dir = scratch_dir("csvdata");
  SynthSpec spec;
  spec.num_subspaces = 2;
  spec.subspace_dim = 2;
  spec.ambient_dim = 5;
  spec.points_per = 6;
  const SynthData data = generate(spec);
  write_matrix_csv(data.x, dir / "X.csv");
  write_labels_csv(data.truth, dir / "t.csv");
  ExperimentConfig cfg;
  cfg.data_path = dir / "X.csv";
  cfg.truth_path = dir / "t.csv";
  cfg.method = Method::kLsr;
  cfg.lambda_grid = {0.1};
  cfg.corruptions = {0.0};
  cfg.trials = 1;
  cfg.k = 2;
  cfg.output_dir = dir / "out";
  const SweepResult res = run_sweep(cfg);
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_EQ(res.records[0].status, "ok");
  EXPECT_EQ(res.records[0].sa_best, 1.0);
  fs::remove_all(dir);
}

TEST(RunSweep, DefaultSpecSingleCellRecoversClusters) {
  const fs::path dir = scratch_dir("single");
  ExperimentConfig cfg;
  cfg.gamma_grid = {0.01};
  cfg.lambda_grid = {0.1};
  cfg.corruptions = {0.0};
  cfg.trials = 1;
  cfg.output_dir = dir;
  const SweepResult res = run_sweep(cfg);
  ASSERT_EQ(res.records.size(), 1u);
  EXPECT_GE(res.records[0].sa_best, 0.99);
  fs::remove_all(dir);
}

TEST(ResultsCsv, RoundTripWithQuotedStatus) {
  ResultRecord r;
  r.trial = 3;
  r.seed = 42;
  r.p = 0.3;
  r.gamma = 0.005;
  r.lambda = 200;
  r.sa_z = 0.8;
  r.sa_s = 0.9;
  r.sa_best = 0.9;
  r.iterations = 17;
  r.converged = true;
  r.status = "error:odd, \"quoted\"";
  const std::string text = format_results_csv({r});
  const auto back = parse_results_csv(text);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].status, r.status);
  EXPECT_EQ(back[0].p, 0.3);
  EXPECT_EQ(format_results_csv(back), text);
  EXPECT_THROW(parse_results_csv("wrong,header\n"), Error);
}

TEST(Traces, FormatAndRowCount) {
  SynthSpec spec;
  spec.num_subspaces = 2;
  spec.subspace_dim = 2;
  spec.ambient_dim = 5;
  spec.points_per = 5;
  SolverConfig sc;
  sc.k = 2;
  sc.maxiter = 1;
  const SolverOutput out = solve_idr(generate(spec).x, sc);
  const std::string text = format_trace_csv(out);
  EXPECT_EQ(text.rfind("iter,res_SC,res_SD,res_1C,res_XZE,idres_Z,dZ,dS,dE\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
}

TEST(DefaultThreadCount, HonorsEnvironment) {
  ::setenv("IDR_THREADS", "3", 1);
  EXPECT_EQ(default_thread_count(), 3);
  ::setenv("IDR_THREADS", "junk", 1);
  EXPECT_GE(default_thread_count(), 1);
  ::unsetenv("IDR_THREADS");
  EXPECT_GE(default_thread_count(), 1);
}

}  // namespace
}  // namespace idr
