#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "idr/error.hpp"
#include "idr/experiment.hpp"
#include "idr/lsr.hpp"
#include "idr/matrix_io.hpp"
#include "idr/metrics.hpp"
#include "idr/solver.hpp"
#include "idr/spectral.hpp"
#include "idr/synthgen.hpp"

namespace idr::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct GenerateArgs {
  std::string spec_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> p;
};

struct SolveArgs {
  std::string data;
  std::string truth;
  std::string method = "idr";
  double gamma = 0.1;
  double lambda = 0.1;
  int k = 0;
  std::string out_dir;
  int maxiter = 500;
  bool strict = false;
  bool no_zero_diag = false;
  std::uint64_t cluster_seed = 0;
};

struct SweepArgs {
  std::string config;
  std::string output_dir;
  std::optional<int> threads;
  std::optional<int> trials;
  std::string method;
};

struct EvaluateArgs {
  std::string truth;
  std::string pred;
};

struct TraceArgs {
  std::string data;
  double gamma = 0.1;
  double lambda = 0.1;
  int k = 0;
  int maxiter = 500;
  bool strict = false;
  std::string out = "trace.csv";
};

SynthSpec load_synth_spec(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kInvalidSpec, std::string("spec is not valid JSON: ") + e.what());
  }
  SynthSpec spec;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "num_subspaces") spec.num_subspaces = v.get<int>();
      else if (key == "subspace_dim") spec.subspace_dim = v.get<int>();
      else if (key == "ambient_dim") spec.ambient_dim = v.get<int>();
      else if (key == "points_per") spec.points_per = v.get<int>();
      else if (key == "corruption_fraction") spec.corruption_fraction = v.get<double>();
      else if (key == "noise_scale") spec.noise_scale = v.get<double>();
      else if (key == "seed") spec.seed = v.get<std::uint64_t>();
      else throw Error(ErrorCode::kInvalidSpec, "unknown spec key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidSpec, std::string("bad spec value: ") + e.what());
  }
  return spec;
}

int do_generate(const GenerateArgs& a, std::ostream& out) {
  SynthSpec spec;
  if (!a.spec_path.empty()) spec = load_synth_spec(a.spec_path);
  if (a.seed) spec.seed = *a.seed;
  if (a.p) spec.corruption_fraction = *a.p;
  const SynthData data = generate(spec);
  const fs::path dir = a.out_dir;
  write_matrix_csv(data.x, dir / "X.csv");
  write_labels_csv(data.truth, dir / "labels.csv");
  json meta = {
      {"num_subspaces", spec.num_subspaces},
      {"subspace_dim", spec.subspace_dim},
      {"ambient_dim", spec.ambient_dim},
      {"points_per", spec.points_per},
      {"corruption_fraction", spec.corruption_fraction},
      {"noise_scale", spec.noise_scale},
      {"seed", spec.seed},
      {"renormalized_after_corruption", data.renormalized_after_corruption},
  };
  write_text_file(dir / "meta.json", meta.dump(2) + "\n");
  out << "wrote " << data.x.rows() << "x" << data.x.cols() << " data to "
      << (dir / "X.csv").string() << "\n";
  return kOk;
}

SolverConfig solver_config(double gamma, double lambda, int k, int maxiter,
                           bool strict) {
  SolverConfig c;
  c.gamma = gamma;
  c.lambda = lambda;
  c.k = k;
  c.maxiter = maxiter;
  c.normalization = strict ? NormalizationPolicy::kStrict : NormalizationPolicy::kAuto;
  return c;
}

int do_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const Matrix x = read_matrix_csv(a.data);
  std::optional<Labels> truth;
  if (!a.truth.empty()) truth = read_labels_csv(a.truth);
  if (a.k < 1) throw Error(ErrorCode::kInvalidK, "--k must be >= 1");
  const fs::path dir = a.out_dir;
  const Method method = parse_method(a.method);

  json summary = {{"method", a.method}, {"k", a.k}, {"lambda", a.lambda}};
  if (method == Method::kIdr) {
    const SolverOutput res =
        solve_idr(x, solver_config(a.gamma, a.lambda, a.k, a.maxiter, a.strict));
    for (const auto& w : res.warnings) err << "warning: " << w << "\n";
    const ClusterResult cr = cluster_from_solver(res, a.k, a.cluster_seed, truth);
    dump_matrix(res.z_star, dir / "Z.csv");
    dump_matrix(res.s_star, dir / "S.csv");
    dump_matrix(res.e_star, dir / "E.csv");
    emit_traces(res, dir / "trace.csv");
    write_labels_csv(cr.labels_z, dir / "labels_Z.csv");
    write_labels_csv(cr.labels_s, dir / "labels_S.csv");
    write_labels_csv(cr.chosen_labels(), dir / "labels.csv");
    summary["gamma"] = a.gamma;
    summary["iterations"] = res.iterations;
    summary["converged"] = res.converged;
    summary["input_renormalized"] = res.input_renormalized;
    summary["chosen"] = cr.chosen == GraphChoice::kZ ? "Z" : "S";
    summary["ncut_Z"] = cr.ncut_z;
    summary["ncut_S"] = cr.ncut_s;
    if (truth) {
      summary["sa_Z"] = *cr.accuracy_z;
      summary["sa_S"] = *cr.accuracy_s;
      summary["sa_best"] = std::max(*cr.accuracy_z, *cr.accuracy_s);
    }
  } else {
    const Matrix z = lsr_solve(x, a.lambda, !a.no_zero_diag);
    const Labels labels = spectral_partition(build_affinity(z), a.k, a.cluster_seed);
    dump_matrix(z, dir / "Z.csv");
    write_labels_csv(labels, dir / "labels.csv");
    summary["zero_diag"] = !a.no_zero_diag;
    if (truth) summary["sa"] = segmentation_accuracy(*truth, labels);
  }
  write_text_file(dir / "result.json", summary.dump(2) + "\n");
  out << summary.dump() << "\n";
  return kOk;
}

int do_sweep(const SweepArgs& a, std::ostream& out) {
  ExperimentConfig cfg = load_experiment_config(a.config);
  if (!a.output_dir.empty()) cfg.output_dir = a.output_dir;
  if (a.threads) cfg.threads = *a.threads;
  if (a.trials) {
    cfg.trials = *a.trials;
    cfg.seeds.clear();
  }
  if (!a.method.empty()) cfg.method = parse_method(a.method);
  const SweepResult res = run_sweep(cfg);
  out << "cells run: " << res.cells_run << ", reused: " << res.cells_reused
      << "\n";
  out << format_summary_csv(res.summary);
  return kOk;
}

int do_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto truth = read_labels_csv(a.truth);
  const auto pred = read_labels_csv(a.pred);
  const double sa = segmentation_accuracy(truth, pred);
  json j = {{"n", truth.size()}, {"sa", sa}, {"se", 1.0 - sa}};
  out << j.dump() << "\n";
  return kOk;
}

int do_trace(const TraceArgs& a, std::ostream& out, std::ostream& err) {
  const Matrix x = read_matrix_csv(a.data);
  if (a.k < 1) throw Error(ErrorCode::kInvalidK, "--k must be >= 1");
  const SolverOutput res =
      solve_idr(x, solver_config(a.gamma, a.lambda, a.k, a.maxiter, a.strict));
  for (const auto& w : res.warnings) err << "warning: " << w << "\n";
  emit_traces(res, a.out);
  out << "iterations: " << res.iterations
      << ", converged: " << (res.converged ? "yes" : "no") << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Idempotent representation subspace clustering benchmarks",
               "idr_bench"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Write synthetic union-of-subspaces data");
  gen_cmd->add_option("--spec", gen.spec_path, "JSON data spec");
  gen_cmd->add_option("--out", gen.out_dir, "Output directory")->required();
  gen_cmd->add_option("--seed", gen.seed, "Override spec seed");
  gen_cmd->add_option("--p", gen.p, "Override corruption fraction");

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve and cluster one data set");
  solve_cmd->add_option("--data", solve.data, "Data CSV (D rows, n columns)")->required();
  solve_cmd->add_option("--truth", solve.truth, "Ground-truth label CSV");
  solve_cmd->add_option("--method", solve.method, "idr or lsr")
      ->check(CLI::IsMember({"idr", "lsr"}));
  solve_cmd->add_option("--gamma", solve.gamma, "Idempotence weight");
  solve_cmd->add_option("--lambda", solve.lambda, "Noise / ridge weight");
  solve_cmd->add_option("--k", solve.k, "Number of subspaces")->required();
  solve_cmd->add_option("--out", solve.out_dir, "Output directory")->required();
  solve_cmd->add_option("--maxiter", solve.maxiter, "Iteration cap");
  solve_cmd->add_flag("--strict", solve.strict, "Reject non-unit-norm columns");
  solve_cmd->add_flag("--no-zero-diag", solve.no_zero_diag,
                      "LSR without the diag(Z)=0 constraint");
  solve_cmd->add_option("--cluster-seed", solve.cluster_seed, "k-means seed");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep_cmd->add_option("--config", sweep.config, "JSON experiment config")->required();
  sweep_cmd->add_option("--output-dir", sweep.output_dir, "Override output_dir");
  sweep_cmd->add_option("--threads", sweep.threads, "Worker threads");
  sweep_cmd->add_option("--trials", sweep.trials, "Override trial count");
  sweep_cmd->add_option("--method", sweep.method, "Override method")
      ->check(CLI::IsMember({"idr", "lsr"}));

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predicted labels");
  eval_cmd->add_option("--truth", eval.truth, "Ground-truth label CSV")->required();
  eval_cmd->add_option("--pred", eval.pred, "Predicted label CSV")->required();

  TraceArgs trace;
  auto* trace_cmd = app.add_subcommand("trace", "Write per-iteration residuals");
  trace_cmd->add_option("--data", trace.data, "Data CSV")->required();
  trace_cmd->add_option("--gamma", trace.gamma, "Idempotence weight");
  trace_cmd->add_option("--lambda", trace.lambda, "Noise weight");
  trace_cmd->add_option("--k", trace.k, "Number of subspaces")->required();
  trace_cmd->add_option("--maxiter", trace.maxiter, "Iteration cap");
  trace_cmd->add_flag("--strict", trace.strict, "Reject non-unit-norm columns");
  trace_cmd->add_option("--out", trace.out, "Output CSV path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }

  try {
    if (*gen_cmd) return do_generate(gen, out);
    if (*solve_cmd) return do_solve(solve, out, err);
    if (*sweep_cmd) return do_sweep(sweep, out);
    if (*eval_cmd) return do_evaluate(eval, out);
    if (*trace_cmd) return do_trace(trace, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_validation_error(e.code()) ? kValidationError : kIoError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  }
  return kValidationError;
}

}  // namespace idr::cli
