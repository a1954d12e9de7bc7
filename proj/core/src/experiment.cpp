#include "idr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "idr/error.hpp"
#include "idr/lsr.hpp"
#include "idr/matrix_io.hpp"
#include "idr/metrics.hpp"
#include "idr/spectral.hpp"

namespace idr {
namespace {

using json = nlohmann::json;

constexpr const char* kResultsHeader =
    "trial,seed,p,gamma,lambda,method,sa_Z,sa_S,sa_best,iterations,converged,"
    "status";

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidConfig, msg);
}

struct CellKey {
  std::string p, gamma, lambda;
  int trial = 0;
  Method method = Method::kIdr;

  auto tie() const { return std::tie(p, trial, gamma, lambda, method); }
  bool operator<(const CellKey& o) const { return tie() < o.tie(); }
};

CellKey key_of(const ResultRecord& r) {
  return {format_double(r.p), format_double(r.gamma), format_double(r.lambda),
          r.trial, r.method};
}

struct Dataset {
  Matrix x;
  std::vector<int> truth;
};

Dataset make_dataset(const ExperimentConfig& cfg, std::uint64_t seed, double p) {
  Dataset ds;
  if (cfg.data_path) {
    ds.x = read_matrix_csv(*cfg.data_path);
    ds.truth = read_labels_csv(*cfg.truth_path);
    if (static_cast<Eigen::Index>(ds.truth.size()) != ds.x.cols()) {
      throw Error(ErrorCode::kLengthMismatch,
                  "truth labels do not match data columns");
    }
    if (p > 0.0) {
      ds.x = corrupt(ds.x, p, cfg.synth.noise_scale, corruption_seed(seed));
    }
    return ds;
  }
  SynthSpec spec = cfg.synth;
  spec.seed = seed;
  spec.corruption_fraction = p;
  SynthData data = generate(spec);
  ds.x = std::move(data.x);
  ds.truth = std::move(data.truth);
  return ds;
}

void run_cell(const ExperimentConfig& cfg, const Dataset& ds, ResultRecord& rec) {
  const auto start = std::chrono::steady_clock::now();
  const int k = cfg.resolved_k();
  try {
    if (cfg.method == Method::kIdr) {
      SolverConfig sc = cfg.solver;
      sc.gamma = rec.gamma;
      sc.lambda = rec.lambda;
      sc.k = k;
      sc.track_idempotent_residual = false;
      const SolverOutput out = solve_idr(ds.x, sc);
      const ClusterResult cr =
          cluster_from_solver(out, k, cfg.cluster_seed, ds.truth);
      rec.sa_z = *cr.accuracy_z;
      rec.sa_s = *cr.accuracy_s;
      rec.iterations = out.iterations;
      rec.converged = out.converged;
    } else {
      const Matrix z = lsr_solve(ds.x, rec.lambda, cfg.lsr_zero_diag);
      const Labels labels =
          spectral_partition(build_affinity(z), k, cfg.cluster_seed);
      rec.sa_z = segmentation_accuracy(ds.truth, labels);
      rec.sa_s = rec.sa_z;
      rec.iterations = 1;
      rec.converged = true;
    }
    rec.sa_best = std::max(rec.sa_z, rec.sa_s);
    rec.status = "ok";
  } catch (const Error& e) {
    rec.sa_z = rec.sa_s = rec.sa_best = 0.0;
    rec.iterations = 0;
    rec.converged = false;
    rec.status = "error:" + std::string(to_string(e.code()));
  }
  rec.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
}

std::vector<double> number_list(const json& j, const char* key) {
  if (!j.is_array()) invalid(std::string(key) + " must be an array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) invalid(std::string(key) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  if (out.empty()) invalid(std::string(key) + " must not be empty");
  return out;
}

double parse_number(const std::string& field, const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(field, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != field.size() || field.empty()) {
    throw Error(ErrorCode::kIoError,
                std::string("results.csv: bad ") + what + " '" + field + "'");
  }
  return v;
}

std::string format_optional(double v) {
  return std::isnan(v) ? std::string() : format_double(v);
}

}  // namespace

std::string to_string(Method m) { return m == Method::kIdr ? "idr" : "lsr"; }

Method parse_method(const std::string& s) {
  if (s == "idr") return Method::kIdr;
  if (s == "lsr") return Method::kLsr;
  invalid("unknown method '" + s + "' (expected idr or lsr)");
}

const std::vector<double>& idr_default_grid() {
  static const std::vector<double> grid = {0.001, 0.005, 0.01, 0.02, 0.05,
                                           0.1,   0.2,   0.5,  1,    5,
                                           10,    50,    100,  200};
  return grid;
}

const std::vector<double>& lsr_default_grid() {
  static const std::vector<double> grid = {0.0001, 0.001, 0.01, 0.05, 0.1,
                                           0.2,    0.5,   1,    2,    5,
                                           8,      10,    15,   20,   50};
  return grid;
}

int default_thread_count() {
  if (const char* env = std::getenv("IDR_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

int ExperimentConfig::resolved_k() const {
  return k > 0 ? k : synth.num_subspaces;
}

void ExperimentConfig::finalize() {
  if (!seeds.empty()) {
    trials = static_cast<int>(seeds.size());
  } else {
    if (trials < 1) invalid("trials must be >= 1");
    for (int t = 1; t <= trials; ++t) seeds.push_back(static_cast<std::uint64_t>(t));
  }
  if (method == Method::kLsr) {
    gamma_grid = {0.0};
    if (lambda_grid.empty()) lambda_grid = lsr_default_grid();
  } else {
    if (gamma_grid.empty()) gamma_grid = idr_default_grid();
    if (lambda_grid.empty()) lambda_grid = idr_default_grid();
    for (double g : gamma_grid) {
      if (!(g > 0.0)) invalid("gamma grid values must be > 0");
    }
  }
  for (double l : lambda_grid) {
    if (!(l > 0.0)) invalid("lambda grid values must be > 0");
  }
  if (corruptions.empty()) invalid("corruptions must not be empty");
  for (double p : corruptions) {
    if (!(p >= 0.0 && p <= 1.0)) invalid("corruptions must lie in [0, 1]");
  }
  if (data_path.has_value() != truth_path.has_value()) {
    invalid("data and truth must be given together");
  }
  if (!data_path) {
    try {
      synth.validate();
    } catch (const Error& e) {
      invalid(e.what());
    }
  }
  if (k < 0) invalid("k must be >= 0 (0 selects the subspace count)");
  if (threads < 0) invalid("threads must be >= 0");
  if (output_dir.empty()) invalid("output_dir must be set");
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) invalid("config must be a JSON object");

  ExperimentConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "synthetic") {
        for (const auto& [sk, sv] : value.items()) {
          if (sk == "num_subspaces") cfg.synth.num_subspaces = sv.get<int>();
          else if (sk == "subspace_dim") cfg.synth.subspace_dim = sv.get<int>();
          else if (sk == "ambient_dim") cfg.synth.ambient_dim = sv.get<int>();
          else if (sk == "points_per") cfg.synth.points_per = sv.get<int>();
          else if (sk == "noise_scale") cfg.synth.noise_scale = sv.get<double>();
          else invalid("unknown synthetic key '" + sk + "'");
        }
      } else if (key == "data") {
        cfg.data_path = value.get<std::string>();
      } else if (key == "truth") {
        cfg.truth_path = value.get<std::string>();
      } else if (key == "method") {
        cfg.method = parse_method(value.get<std::string>());
      } else if (key == "gamma_grid") {
        cfg.gamma_grid = number_list(value, "gamma_grid");
      } else if (key == "lambda_grid") {
        cfg.lambda_grid = number_list(value, "lambda_grid");
      } else if (key == "corruptions") {
        cfg.corruptions = number_list(value, "corruptions");
      } else if (key == "trials") {
        cfg.trials = value.get<int>();
        if (cfg.trials < 1) invalid("trials must be >= 1");
      } else if (key == "seeds") {
        if (!value.is_array() || value.empty()) invalid("seeds must be a non-empty array");
        cfg.seeds.clear();
        for (const auto& s : value) cfg.seeds.push_back(s.get<std::uint64_t>());
      } else if (key == "k") {
        cfg.k = value.get<int>();
      } else if (key == "output_dir") {
        cfg.output_dir = value.get<std::string>();
      } else if (key == "lsr_zero_diag") {
        cfg.lsr_zero_diag = value.get<bool>();
      } else if (key == "cluster_seed") {
        cfg.cluster_seed = value.get<std::uint64_t>();
      } else if (key == "threads") {
        cfg.threads = value.get<int>();
      } else if (key == "solver") {
        for (const auto& [sk, sv] : value.items()) {
          if (sk == "mu0") cfg.solver.mu0 = sv.get<double>();
          else if (sk == "mu_max") cfg.solver.mu_max = sv.get<double>();
          else if (sk == "rho") cfg.solver.rho = sv.get<double>();
          else if (sk == "epsilon") cfg.solver.epsilon = sv.get<double>();
          else if (sk == "maxiter") cfg.solver.maxiter = sv.get<int>();
          else if (sk == "normalization") {
            const auto mode = sv.get<std::string>();
            if (mode == "auto") cfg.solver.normalization = NormalizationPolicy::kAuto;
            else if (mode == "strict") cfg.solver.normalization = NormalizationPolicy::kStrict;
            else invalid("normalization must be auto or strict");
          } else {
            invalid("unknown solver key '" + sk + "'");
          }
        }
      } else {
        invalid("unknown config key '" + key + "'");
      }
    }
  } catch (const json::type_error& e) {
    invalid(std::string("config value has wrong type: ") + e.what());
  } catch (const json::out_of_range& e) {
    invalid(std::string("config value out of range: ") + e.what());
  }
  return cfg;
}

std::string format_results_csv(const std::vector<ResultRecord>& records) {
  std::string out = kResultsHeader;
  out += '\n';
  for (const auto& r : records) {
    std::ostringstream row;
    row << r.trial << ',' << r.seed << ',' << format_double(r.p) << ','
        << format_double(r.gamma) << ',' << format_double(r.lambda) << ','
        << to_string(r.method) << ',' << format_double(r.sa_z) << ','
        << format_double(r.sa_s) << ',' << format_double(r.sa_best) << ','
        << r.iterations << ',' << (r.converged ? 1 : 0) << ','
        << csv_field(r.status) << '\n';
    out += row.str();
  }
  return out;
}

std::vector<ResultRecord> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsHeader) {
    throw Error(ErrorCode::kIoError, "results.csv has an unexpected header");
  }
  std::vector<ResultRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_record(line);
    if (f.size() != 12) {
      throw Error(ErrorCode::kIoError, "results.csv row has " +
                                           std::to_string(f.size()) +
                                           " fields, expected 12");
    }
    ResultRecord r;
    r.trial = static_cast<int>(parse_number(f[0], "trial"));
    r.seed = static_cast<std::uint64_t>(std::stoull(f[1]));
    r.p = parse_number(f[2], "p");
    r.gamma = parse_number(f[3], "gamma");
    r.lambda = parse_number(f[4], "lambda");
    r.method = parse_method(f[5]);
    r.sa_z = parse_number(f[6], "sa_Z");
    r.sa_s = parse_number(f[7], "sa_S");
    r.sa_best = parse_number(f[8], "sa_best");
    r.iterations = static_cast<int>(parse_number(f[9], "iterations"));
    r.converged = f[10] == "1";
    r.status = f[11];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRecord>& records) {
  // p -> trial -> best accuracy; p kept in first-seen order.
  std::vector<double> order;
  std::map<std::string, std::map<int, double>> best;
  for (const auto& r : records) {
    const std::string pk = format_double(r.p);
    if (!best.count(pk)) order.push_back(r.p);
    auto& per_trial = best[pk];
    if (r.status != "ok") {
      per_trial.emplace(r.trial, 0.0);
      continue;
    }
    auto [it, inserted] = per_trial.emplace(r.trial, r.sa_best);
    if (!inserted) it->second = std::max(it->second, r.sa_best);
  }
  std::vector<SummaryRow> rows;
  for (double p : order) {
    const auto& per_trial = best[format_double(p)];
    SummaryRow row;
    row.p = p;
    row.trials = static_cast<int>(per_trial.size());
    double sum = 0.0;
    for (const auto& [t, v] : per_trial) sum += v;
    row.mean_best = sum / row.trials;
    double ss = 0.0;
    for (const auto& [t, v] : per_trial) ss += (v - row.mean_best) * (v - row.mean_best);
    row.std_best = row.trials > 1 ? std::sqrt(ss / (row.trials - 1)) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::string format_summary_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "p,trials,mean_best_accuracy,std_best_accuracy\n";
  for (const auto& r : rows) {
    out += format_double(r.p) + ',' + std::to_string(r.trials) + ',' +
           format_double(r.mean_best) + ',' + format_double(r.std_best) + '\n';
  }
  return out;
}

SweepResult run_sweep(ExperimentConfig config) {
  config.finalize();
  const auto& cfg = config;
  const std::filesystem::path results_path = cfg.output_dir / "results.csv";

  std::map<CellKey, ResultRecord> existing;
  if (std::filesystem::exists(results_path)) {
    for (auto& r : parse_results_csv(read_text_file(results_path))) {
      existing.emplace(key_of(r), std::move(r));
    }
  }

  // Deterministic cell order: p, trial, gamma, lambda.
  std::vector<ResultRecord> cells;
  for (double p : cfg.corruptions) {
    for (int t = 0; t < cfg.trials; ++t) {
      for (double g : cfg.gamma_grid) {
        for (double l : cfg.lambda_grid) {
          ResultRecord r;
          r.trial = t;
          r.seed = cfg.seeds[static_cast<std::size_t>(t)];
          r.p = p;
          r.gamma = g;
          r.lambda = l;
          r.method = cfg.method;
          cells.push_back(r);
        }
      }
    }
  }

  SweepResult result;
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto it = existing.find(key_of(cells[i]));
    if (it != existing.end() && it->second.seed == cells[i].seed) {
      cells[i] = it->second;
      ++result.cells_reused;
    } else {
      pending.push_back(i);
    }
  }

  // Datasets are shared by every grid cell of a (p, trial) pair.
  std::map<std::pair<std::string, int>, Dataset> datasets;
  for (std::size_t i : pending) {
    const auto& c = cells[i];
    const auto key = std::make_pair(format_double(c.p), c.trial);
    if (!datasets.count(key)) datasets.emplace(key, make_dataset(cfg, c.seed, c.p));
  }

  const int workers = std::max(
      1, std::min<int>(cfg.threads > 0 ? cfg.threads : default_thread_count(),
                       static_cast<int>(pending.size())));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t slot = next.fetch_add(1);
      if (slot >= pending.size()) return;
      auto& cell = cells[pending[slot]];
      const auto& ds = datasets.at({format_double(cell.p), cell.trial});
      run_cell(cfg, ds, cell);
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  result.cells_run = static_cast<int>(pending.size());

  result.records = std::move(cells);
  result.summary = summarize(result.records);

  write_text_file(results_path, format_results_csv(result.records));
  write_text_file(cfg.output_dir / "summary.csv",
                  format_summary_csv(result.summary));

  // Wall times vary run to run, so they live outside results.csv.
  std::string timings = "trial,p,gamma,lambda,wall_time_seconds\n";
  for (std::size_t i : pending) {
    const auto& r = result.records[i];
    timings += std::to_string(r.trial) + ',' + format_double(r.p) + ',' +
               format_double(r.gamma) + ',' + format_double(r.lambda) + ',' +
               format_double(r.wall_time_seconds) + '\n';
  }
  write_text_file(cfg.output_dir / "timings.csv", timings);
  return result;
}

std::string format_trace_csv(const SolverOutput& output) {
  std::string out = "iter,res_SC,res_SD,res_1C,res_XZE,idres_Z,dZ,dS,dE\n";
  for (const auto& r : output.history) {
    out += std::to_string(r.iter) + ',' + format_double(r.res_sc) + ',' +
           format_double(r.res_sd) + ',' + format_double(r.res_1c) + ',' +
           format_double(r.res_xze) + ',' + format_optional(r.idres_z) + ',' +
           format_double(r.dz) + ',' + format_double(r.ds) + ',' +
           format_double(r.de) + '\n';
  }
  return out;
}

void emit_traces(const SolverOutput& output, const std::filesystem::path& path) {
  write_text_file(path, format_trace_csv(output));
}

void dump_matrix(const Matrix& m, const std::filesystem::path& path) {
  write_matrix_csv(m, path);
}

}  // namespace idr
