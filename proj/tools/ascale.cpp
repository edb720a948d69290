#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ascale/dataio.hpp"
#include "ascale/errors.hpp"
#include "ascale/harness.hpp"
#include "ascale/kv.hpp"
#include "ascale/models.hpp"
#include "ascale/scaling.hpp"

namespace {

using namespace ascale;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open file for writing: " + path);
  out << text;
  if (!out) throw DataError("write failed: " + path);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Shared experiment flags; a config file is applied first and explicit
// flags override it.
struct RunArgs {
  std::string config_path;
  std::uint64_t seed = 1;
  std::size_t reps = 0;
  std::size_t jobs = 1;
  std::size_t folds = 5;
  std::string out_md;
  std::string out_csv;
  bool progress = false;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* reps_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
  CLI::Option* folds_opt = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path,
                    "key = value config file applied before flags");
    seed_opt = cmd->add_option("--seed", seed, "base seed");
    reps_opt = cmd->add_option("--reps", reps,
                               "repetitions (0 uses the experiment default)");
    jobs_opt = cmd->add_option("--jobs", jobs, "worker threads");
    folds_opt = cmd->add_option("--folds", folds, "cross validation folds");
    cmd->add_option("--out-md", out_md, "write the markdown report here");
    cmd->add_option("--out-csv", out_csv, "write the csv report here");
    cmd->add_flag("--progress", progress, "report repetitions on stderr");
  }

  ExperimentConfig build() const {
    ExperimentConfig cfg;
    if (!config_path.empty())
      cfg = ExperimentConfig::from_record(KvRecord::parse_file(config_path));
    if (seed_opt->count()) cfg.base_seed = seed;
    if (reps_opt->count()) cfg.reps = reps;
    if (jobs_opt->count()) cfg.jobs = jobs;
    if (folds_opt->count()) cfg.cv_folds = folds;
    return cfg;
  }
};

void emit_report(const ExperimentReport& report, const RunArgs& args) {
  const std::string md = render_report_markdown(report);
  if (args.out_md.empty())
    std::cout << md;
  else
    write_text(args.out_md, md);
  if (!args.out_csv.empty()) write_text(args.out_csv, render_report_csv(report));
}

RunHooks progress_hooks(const RunArgs& args) {
  RunHooks hooks;
  if (args.progress)
    hooks.on_rep_done = [](std::size_t done, std::size_t total) {
      std::fprintf(stderr, "rep %zu/%zu\n", done, total);
    };
  return hooks;
}

int run_scale(const std::string& input, const std::string& output,
              const std::string& scaler, double gamma,
              const std::string& target, const std::string& drop,
              std::string scaler_out) {
  const auto method = parse_scaler_name(scaler);
  if (!method) throw ArgumentError("unknown scaler: " + scaler);

  CsvOptions opts;
  opts.target = target;
  opts.drop = split_commas(drop);
  const Dataset d = load_csv(input, opts);

  ScalerSpec spec;
  spec.method = *method;
  spec.gamma = gamma;
  const FittedScaler fitted = fit_scaler(spec, d.x, &d.y, &d.kinds);

  Dataset scaled = d;
  scaled.x = fitted.transform(d.x);
  write_csv(scaled, output);

  if (scaler_out.empty()) scaler_out = output + ".scaler";
  write_text(scaler_out, fitted.to_record().serialize());

  for (const auto& w : fitted.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int run_gamma_cv(const std::string& input, const std::string& target,
                 const std::string& method_name, const std::string& model_name,
                 const std::string& grid_text, std::size_t folds,
                 std::uint64_t seed) {
  const auto method = parse_scaler_name(method_name);
  if (!method || (*method != ScalerMethod::GeneralizedAdaptive &&
                  *method != ScalerMethod::AdaptiveHeuristic))
    throw ArgumentError("gamma selection needs scaler gas or ashd");
  const auto model = parse_model_name(model_name);
  if (!model) throw ArgumentError("unknown model: " + model_name);

  Vector grid;
  for (const auto& tok : split_commas(grid_text))
    grid.push_back(parse_double(tok, "gamma grid entry"));

  CsvOptions opts;
  opts.target = target;
  const Dataset d = load_csv(input, opts);

  ModelSpec mspec;
  mspec.kind = *model;
  mspec.cv_folds = folds;
  RngStream rng(seed, 0);
  const GammaCvResult res = select_gamma_cv(d.x, d.y, grid, folds, *method,
                                            make_fold_scorer(mspec), rng);
  std::cout << "gamma_star = " << format_double(res.gamma_star) << "\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    std::cout << "score " << format_double(grid[i]) << " = "
              << format_double(res.mean_scores[i]) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature scaling toolkit and experiment harness"};
  app.require_subcommand(1);

  // scale
  auto* scale = app.add_subcommand("scale", "Scale a csv file");
  std::string in_path, out_path, scaler_name_arg, target =
      "default payment next month";
  std::string drop = "ID", scaler_out;
  double gamma = 1.0;
  scale->add_option("--input", in_path, "input csv")->required();
  scale->add_option("--output", out_path, "scaled output csv")->required();
  scale->add_option("--scaler", scaler_name_arg, "scaler name")->required();
  scale->add_option("--gamma", gamma, "exponent for gas / ashd");
  scale->add_option("--target", target, "target column name");
  scale->add_option("--drop", drop, "comma separated columns to drop");
  scale->add_option("--scaler-out", scaler_out,
                    "fitted scaler sidecar path (default output + .scaler)");

  // sim1
  auto* sim1 = app.add_subcommand("sim1", "Run synthetic study 1");
  RunArgs sim1_args;
  sim1_args.attach(sim1);

  // sim2
  auto* sim2 = app.add_subcommand("sim2", "Run synthetic study 2");
  RunArgs sim2_args;
  sim2_args.attach(sim2);
  int sim2_case = 0;
  bool sim2_corr = false, sim2_raw = false;
  auto* case_opt = sim2->add_option("--case", sim2_case, "sparsity case 1-4");
  auto* corr_opt = sim2->add_flag("--correlated", sim2_corr,
                                  "correlated features");
  auto* raw_opt = sim2->add_flag("--raw-offdiag", sim2_raw,
                                 "unscaled off-diagonal covariances");

  // empirical
  auto* emp = app.add_subcommand("empirical",
                                 "Run the classification study on a csv");
  RunArgs emp_args;
  emp_args.attach(emp);
  std::string emp_data, emp_target;
  emp->add_option("--data", emp_data, "dataset csv")->required();
  auto* emp_target_opt =
      emp->add_option("--target", emp_target, "target column name");

  // gamma-cv
  auto* gcv = app.add_subcommand("gamma-cv",
                                 "Pick a scaling exponent by cross validation");
  std::string gcv_input, gcv_target = "default payment next month";
  std::string gcv_method = "gas", gcv_model = "lasso";
  std::string gcv_grid = "0,0.25,0.5,0.75,1";
  std::size_t gcv_folds = 5;
  std::uint64_t gcv_seed = 1;
  gcv->add_option("--input", gcv_input, "input csv")->required();
  gcv->add_option("--target", gcv_target, "target column name");
  gcv->add_option("--method", gcv_method, "gas or ashd");
  gcv->add_option("--model", gcv_model, "downstream model");
  gcv->add_option("--grid", gcv_grid, "comma separated gamma grid");
  gcv->add_option("--folds", gcv_folds, "cross validation folds");
  gcv->add_option("--seed", gcv_seed, "fold shuffle seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  }

  const auto started = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (scale->parsed()) {
      code = run_scale(in_path, out_path, scaler_name_arg, gamma, target,
                       drop, scaler_out);
    } else if (sim1->parsed()) {
      emit_report(run_sim1(sim1_args.build(), progress_hooks(sim1_args)),
                  sim1_args);
    } else if (sim2->parsed()) {
      ExperimentConfig cfg = sim2_args.build();
      if (case_opt->count()) cfg.sim2_case = sim2_case;
      if (corr_opt->count()) cfg.sim2_correlated = sim2_corr;
      if (raw_opt->count()) cfg.sim2_raw_offdiag = sim2_raw;
      emit_report(run_sim2(cfg, progress_hooks(sim2_args)), sim2_args);
    } else if (emp->parsed()) {
      ExperimentConfig cfg = emp_args.build();
      if (emp_target_opt->count()) cfg.target = emp_target;
      CsvOptions opts;
      opts.target = cfg.target;
      const Dataset d = load_csv(emp_data, opts);
      emit_report(run_empirical(d, cfg, progress_hooks(emp_args)), emp_args);
    } else if (gcv->parsed()) {
      code = run_gamma_cv(gcv_input, gcv_target, gcv_method, gcv_model,
                          gcv_grid, gcv_folds, gcv_seed);
    }
  } catch (const ArgumentError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: data: " << e.what() << "\n";
    return 1;
  } catch (const ConvergenceError& e) {
    std::cerr << "error: convergence: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "error: numeric: " << e.what() << "\n";
    return 1;
  } catch (const TrainingError& e) {
    std::cerr << "error: training: " << e.what() << "\n";
    return 1;
  }

  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - started;
  std::fprintf(stderr, "wall_seconds = %.1f\n", elapsed.count());
  return code;
}
