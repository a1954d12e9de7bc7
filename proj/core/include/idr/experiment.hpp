#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "idr/solver.hpp"
#include "idr/synthgen.hpp"

namespace idr {

enum class Method { kIdr, kLsr };

std::string to_string(Method m);
Method parse_method(const std::string& s);

// Parameter grid searched for IDR (both gamma and lambda).
const std::vector<double>& idr_default_grid();
// Lambda grid searched for the LSR baseline.
const std::vector<double>& lsr_default_grid();

struct ExperimentConfig {
  // Synthetic data unless data_path is set; truth_path is then required.
  SynthSpec synth;
  std::optional<std::filesystem::path> data_path;
  std::optional<std::filesystem::path> truth_path;

  Method method = Method::kIdr;
  std::vector<double> gamma_grid;   // empty -> default for method
  std::vector<double> lambda_grid;  // empty -> default for method
  std::vector<double> corruptions = {0.0, 0.3, 0.7};
  int trials = 5;
  std::vector<std::uint64_t> seeds;  // empty -> 1..trials
  int k = 0;                         // 0 -> synth.num_subspaces
  std::filesystem::path output_dir = "results";
  SolverConfig solver;               // gamma/lambda/k overwritten per cell
  bool lsr_zero_diag = true;
  std::uint64_t cluster_seed = 0;
  int threads = 0;                   // 0 -> IDR_THREADS or hardware

  // Fills defaults and throws Error(kInvalidConfig) on bad values.
  void finalize();
  int resolved_k() const;
};

// Loads a JSON config file. Unknown keys are rejected.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct ResultRecord {
  int trial = 0;
  std::uint64_t seed = 0;
  double p = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
  Method method = Method::kIdr;
  double sa_z = 0.0;
  double sa_s = 0.0;
  double sa_best = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status = "ok";
  double wall_time_seconds = 0.0;
};

struct SummaryRow {
  double p = 0.0;
  int trials = 0;
  double mean_best = 0.0;
  double std_best = 0.0;
};

struct SweepResult {
  std::vector<ResultRecord> records;
  std::vector<SummaryRow> summary;
  int cells_run = 0;      // cells computed in this invocation
  int cells_reused = 0;   // cells taken from an existing results.csv
};

// Runs every (p, trial, gamma, lambda) cell, writing results.csv,
// summary.csv and timings.csv into config.output_dir. Cells already present
// in an existing results.csv are reused.
SweepResult run_sweep(ExperimentConfig config);

// Per-p mean and sample standard deviation of each trial's best accuracy.
std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records);

std::string format_results_csv(const std::vector<ResultRecord>& records);
std::vector<ResultRecord> parse_results_csv(const std::string& text);
std::string format_summary_csv(const std::vector<SummaryRow>& rows);

// trace.csv: iter,res_SC,res_SD,res_1C,res_XZE,idres_Z,dZ,dS,dE
std::string format_trace_csv(const SolverOutput& output);
void emit_traces(const SolverOutput& output, const std::filesystem::path& path);

void dump_matrix(const Matrix& m, const std::filesystem::path& path);

// Worker count: IDR_THREADS when set and positive, else hardware threads.
int default_thread_count();

}  // namespace idr
