#include "ascale/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

#include "ascale/datagen.hpp"
#include "ascale/errors.hpp"
#include "ascale/metrics.hpp"

namespace ascale {
namespace {

constexpr std::uint64_t kDataTag = 0;
constexpr std::uint64_t kModelTagBase = 0x100;
constexpr std::uint64_t kGammaTagBase = 0x200;

std::vector<ScalerMethod> table_scalers(bool include_gas) {
  std::vector<ScalerMethod> out{ScalerMethod::None, ScalerMethod::Adaptive};
  if (include_gas) out.push_back(ScalerMethod::GeneralizedAdaptive);
  out.push_back(ScalerMethod::AdaptiveHeuristic);
  out.push_back(ScalerMethod::Standardization);
  out.push_back(ScalerMethod::Range);
  out.push_back(ScalerMethod::Pareto);
  out.push_back(ScalerMethod::Vast);
  out.push_back(ScalerMethod::Level);
  return out;
}

std::vector<ModelSpec> regression_models(const ExperimentConfig& cfg) {
  std::vector<ModelSpec> out;
  for (ModelKind kind : {ModelKind::Lasso, ModelKind::AdaptiveLasso,
                         ModelKind::Garrote, ModelKind::Scad, ModelKind::Mcp}) {
    ModelSpec spec;
    spec.kind = kind;
    spec.cv_folds = cfg.cv_folds;
    out.push_back(spec);
  }
  return out;
}

std::vector<ModelSpec> classifier_models(const ExperimentConfig& cfg) {
  std::vector<ModelSpec> out;
  for (ModelKind kind : {ModelKind::Knn, ModelKind::KMeans,
                         ModelKind::GaussianNb, ModelKind::Logistic,
                         ModelKind::Lda}) {
    ModelSpec spec;
    spec.kind = kind;
    spec.cv_folds = cfg.cv_folds;
    out.push_back(spec);
  }
  return out;
}

struct PreparedData {
  const Matrix* x_train = nullptr;
  const Vector* y_train = nullptr;
  const Matrix* x_test = nullptr;
  const Vector* y_test = nullptr;
  const std::vector<FeatureKind>* kinds = nullptr;
};

struct CellResult {
  bool present = false;
  double value = 0.0;
  std::vector<std::size_t> selected;
  bool failed = false;
  std::string error;
};

// One experiment cell for one repetition: fit the scaler (choosing gamma
// against this cell's model when asked), transform both partitions, then
// train and score the model.  Model-side randomness is keyed by the model
// index alone so matched repetitions agree across scalers.
CellResult eval_cell(const PreparedData& d, ScalerMethod method,
                     const ModelSpec& model, std::size_t mi,
                     const ExperimentConfig& cfg, const RngStream& root,
                     const RunHooks& hooks, std::size_t rep,
                     std::size_t scaler_index) {
  CellResult out;
  out.present = true;
  try {
    ScalerSpec sspec;
    sspec.method = method;
    if (method == ScalerMethod::GeneralizedAdaptive) {
      RngStream grng = root.substream(kGammaTagBase + mi);
      auto gcv = select_gamma_cv(*d.x_train, *d.y_train, cfg.gamma_grid,
                                 cfg.cv_folds, method, make_fold_scorer(model),
                                 grng);
      sspec.gamma = gcv.gamma_star;
    } else if (method == ScalerMethod::AdaptiveHeuristic) {
      sspec.gamma = 1.0;
    }
    const FittedScaler fitted =
        fit_scaler(sspec, *d.x_train, d.y_train, d.kinds);
    if (hooks.on_scaler_fit)
      hooks.on_scaler_fit(rep, scaler_index, mi, fitted);
    const Matrix xtr = fitted.transform(*d.x_train);
    const Matrix xte = fitted.transform(*d.x_test);
    RngStream mrng = root.substream(kModelTagBase + mi);
    if (is_regression(model.kind)) {
      auto ev =
          eval_regression(xtr, *d.y_train, xte, *d.y_test, model, mrng);
      out.value = ev.test_mse;
      out.selected = std::move(ev.selected);
    } else {
      out.value = eval_classifier_accuracy(xtr, *d.y_train, xte, *d.y_test,
                                           model, mrng);
    }
  } catch (const TrainingError& e) {
    out.failed = true;
    out.error = e.what();
  } catch (const NumericalError& e) {
    out.failed = true;
    out.error = e.what();
  } catch (const ArgumentError& e) {
    out.failed = true;
    out.error = e.what();
  }
  return out;
}

MetricCell summarize(const std::vector<double>& vals) {
  MetricCell c;
  c.reps = vals.size();
  if (vals.empty()) {
    c.skipped = true;
    c.skip_reason = "no repetitions";
    return c;
  }
  c.mean = pairwise_sum(vals) / static_cast<double>(vals.size());
  if (vals.size() > 1) {
    Vector sq(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
      const double d = vals[i] - c.mean;
      sq[i] = d * d;
    }
    c.sd = std::sqrt(pairwise_sum(sq) /
                     static_cast<double>(vals.size() - 1));
  }
  return c;
}

// First failure in repetition order poisons the whole cell.
MetricCell aggregate_value(const std::vector<std::vector<std::vector<CellResult>>>& reps,
                           std::size_t si, std::size_t mi,
                           const std::function<double(double)>& transform) {
  std::vector<double> vals;
  for (const auto& rep : reps) {
    const CellResult& cr = rep[si][mi];
    if (!cr.present) continue;
    if (cr.failed) {
      MetricCell c;
      c.skipped = true;
      c.skip_reason = cr.error;
      c.reps = 0;
      return c;
    }
    vals.push_back(transform(cr.value));
  }
  return summarize(vals);
}

std::string join_doubles(const Vector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

std::string fmt4(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[64];
  auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 4);
  return std::string(buf, res.ptr);
}

void run_reps(std::size_t total, const ExperimentConfig& cfg,
              const RunHooks& hooks,
              const std::function<void(std::size_t)>& rep_body) {
  std::atomic<std::size_t> done{0};
  parallel_for(total, cfg.jobs, [&](std::size_t r) {
    rep_body(r);
    const std::size_t d = done.fetch_add(1) + 1;
    if (hooks.on_rep_done) hooks.on_rep_done(d, total);
  });
}

}  // namespace

ExperimentConfig ExperimentConfig::from_record(const KvRecord& rec) {
  ExperimentConfig cfg;
  auto parse_bool = [](const std::string& key, const std::string& v) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw DataError("config key " + key + " must be a boolean, got '" + v +
                    "'");
  };
  for (const auto& [key, value] : rec.entries()) {
    if (key == "base_seed") {
      cfg.base_seed = rec.get_u64(key);
    } else if (key == "reps") {
      cfg.reps = rec.get_u64(key);
    } else if (key == "jobs") {
      cfg.jobs = rec.get_u64(key);
    } else if (key == "cv_folds") {
      cfg.cv_folds = rec.get_u64(key);
    } else if (key == "gamma_grid") {
      cfg.gamma_grid = rec.get_doubles(key);
    } else if (key == "sim2_case") {
      cfg.sim2_case = static_cast<int>(rec.get_u64(key));
    } else if (key == "sim2_correlated") {
      cfg.sim2_correlated = parse_bool(key, value);
    } else if (key == "sim2_raw_offdiag") {
      cfg.sim2_raw_offdiag = parse_bool(key, value);
    } else if (key == "target") {
      cfg.target = value;
    } else if (key == "train_ratio") {
      cfg.train_ratio = rec.get_double(key);
    } else {
      throw DataError("unknown config key: " + key);
    }
  }
  detail::require(cfg.cv_folds >= 2, "cv_folds must be at least 2");
  return cfg;
}

ExperimentReport run_sim1(const ExperimentConfig& cfg, const RunHooks& hooks) {
  const std::size_t reps = cfg.reps ? cfg.reps : 100;
  const SimScenario scenario = sim1_scenario();
  const auto scalers = table_scalers(true);
  const auto models = regression_models(cfg);

  std::vector<std::vector<std::vector<CellResult>>> results(
      reps, std::vector<std::vector<CellResult>>(
                scalers.size(), std::vector<CellResult>(models.size())));

  run_reps(reps, cfg, hooks, [&](std::size_t r) {
    RngStream root(cfg.base_seed, r);
    RngStream drng = root.substream(kDataTag);
    const RealizedSim sim = realize(scenario, drng);
    PreparedData d{&sim.x_train, &sim.y_train, &sim.x_test, &sim.y_test,
                   nullptr};
    for (std::size_t si = 0; si < scalers.size(); ++si)
      for (std::size_t mi = 0; mi < models.size(); ++mi)
        results[r][si][mi] = eval_cell(d, scalers[si], models[mi], mi, cfg,
                                       root, hooks, r, si);
  });

  ExperimentReport rep;
  rep.title = "Synthetic study 1: relative prediction error";
  rep.header_lines = {"base_seed = " + std::to_string(cfg.base_seed),
                      "reps = " + std::to_string(reps),
                      "cv_folds = " + std::to_string(cfg.cv_folds),
                      "gamma_grid = " + join_doubles(cfg.gamma_grid)};
  rep.metric_names = {"rpe"};
  for (auto s : scalers) rep.scaler_labels.push_back(scaler_label(s));
  for (const auto& m : models) rep.model_labels.push_back(model_label(m.kind));

  const double s2 = scenario.noise_sd * scenario.noise_sd;
  rep.values.assign(1, {});
  rep.values[0].assign(scalers.size(),
                       std::vector<MetricCell>(models.size()));
  for (std::size_t si = 0; si < scalers.size(); ++si)
    for (std::size_t mi = 0; mi < models.size(); ++mi)
      rep.values[0][si][mi] = aggregate_value(
          results, si, mi, [s2](double mse) { return mse / s2; });
  return rep;
}

ExperimentReport run_sim2(const ExperimentConfig& cfg, const RunHooks& hooks) {
  const std::size_t reps = cfg.reps ? cfg.reps : 100;
  const SimScenario scenario = sim2_scenario(
      cfg.sim2_case, cfg.sim2_correlated, cfg.sim2_raw_offdiag);
  const auto scalers = table_scalers(false);
  std::vector<ModelSpec> models(1);
  models[0].kind = ModelKind::Lasso;
  models[0].cv_folds = cfg.cv_folds;

  std::vector<std::vector<std::vector<CellResult>>> results(
      reps, std::vector<std::vector<CellResult>>(
                scalers.size(), std::vector<CellResult>(1)));

  run_reps(reps, cfg, hooks, [&](std::size_t r) {
    RngStream root(cfg.base_seed, r);
    RngStream drng = root.substream(kDataTag);
    const RealizedSim sim = realize(scenario, drng);
    PreparedData d{&sim.x_train, &sim.y_train, &sim.x_test, &sim.y_test,
                   nullptr};
    for (std::size_t si = 0; si < scalers.size(); ++si)
      results[r][si][0] =
          eval_cell(d, scalers[si], models[0], 0, cfg, root, hooks, r, si);
  });

  std::vector<std::size_t> truth;
  for (std::size_t j = 0; j < scenario.p(); ++j)
    if (scenario.beta[j] != 0.0) truth.push_back(j);

  ExperimentReport rep;
  rep.title = "Synthetic study 2: lasso selection quality, case " +
              std::to_string(cfg.sim2_case) +
              (cfg.sim2_correlated ? " (correlated)" : " (independent)");
  rep.header_lines = {"base_seed = " + std::to_string(cfg.base_seed),
                      "reps = " + std::to_string(reps),
                      "cv_folds = " + std::to_string(cfg.cv_folds),
                      "sim2_case = " + std::to_string(cfg.sim2_case),
                      std::string("sim2_correlated = ") +
                          (cfg.sim2_correlated ? "1" : "0"),
                      std::string("sim2_raw_offdiag = ") +
                          (cfg.sim2_raw_offdiag ? "1" : "0")};
  rep.metric_names = {"fake", "lost", "prediction"};
  for (auto s : scalers) rep.scaler_labels.push_back(scaler_label(s));
  rep.model_labels = {model_label(ModelKind::Lasso)};

  rep.values.assign(3, {});
  for (auto& table : rep.values)
    table.assign(scalers.size(), std::vector<MetricCell>(1));

  const double sd = scenario.noise_sd;
  for (std::size_t si = 0; si < scalers.size(); ++si) {
    MetricCell pred = aggregate_value(results, si, 0,
                                      [sd](double mse) { return mse / sd; });
    if (pred.skipped) {
      rep.values[0][si][0] = pred;
      rep.values[1][si][0] = pred;
    } else {
      std::vector<std::vector<std::size_t>> selected;
      selected.reserve(reps);
      for (const auto& r : results) selected.push_back(r[si][0].selected);
      const SelectionRates rates =
          selection_rates(selected, truth, scenario.p());
      MetricCell fake;
      fake.mean = rates.fake;
      fake.reps = reps;
      MetricCell lost;
      lost.mean = rates.lost;
      lost.reps = reps;
      rep.values[0][si][0] = fake;
      rep.values[1][si][0] = lost;
    }
    rep.values[2][si][0] = pred;
  }
  return rep;
}

ExperimentReport run_empirical(const Dataset& data,
                               const ExperimentConfig& cfg,
                               const RunHooks& hooks) {
  detail::require(data.n_rows() >= 4, "dataset is too small");
  const auto scalers = table_scalers(true);
  const auto models = classifier_models(cfg);

  std::vector<std::size_t> model_reps(models.size());
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    if (cfg.reps) {
      model_reps[mi] = cfg.reps;
    } else {
      const bool slow = models[mi].kind == ModelKind::Knn ||
                        models[mi].kind == ModelKind::KMeans;
      model_reps[mi] = slow ? 100 : 10;
    }
  }
  const std::size_t total =
      *std::max_element(model_reps.begin(), model_reps.end());

  std::vector<std::vector<std::vector<CellResult>>> results(
      total, std::vector<std::vector<CellResult>>(
                 scalers.size(), std::vector<CellResult>(models.size())));

  run_reps(total, cfg, hooks, [&](std::size_t r) {
    RngStream root(cfg.base_seed, r);
    RngStream srng = root.substream(kDataTag);
    const SplitResult split = train_test_split(data, cfg.train_ratio, srng);
    PreparedData d{&split.train.x, &split.train.y, &split.test.x,
                   &split.test.y, &split.train.kinds};
    for (std::size_t si = 0; si < scalers.size(); ++si)
      for (std::size_t mi = 0; mi < models.size(); ++mi)
        if (r < model_reps[mi])
          results[r][si][mi] = eval_cell(d, scalers[si], models[mi], mi, cfg,
                                         root, hooks, r, si);
  });

  ExperimentReport rep;
  rep.title = "Classification accuracy under nine scalings";
  rep.header_lines = {"base_seed = " + std::to_string(cfg.base_seed),
                      cfg.reps ? "reps = " + std::to_string(cfg.reps)
                               : std::string("reps = default"),
                      "train_ratio = " + format_double(cfg.train_ratio),
                      "target = " + data.target_name};
  rep.metric_names = {"accuracy"};
  rep.render_sd = true;
  for (auto s : scalers) rep.scaler_labels.push_back(scaler_label(s));
  for (const auto& m : models) rep.model_labels.push_back(model_label(m.kind));

  rep.values.assign(1, {});
  rep.values[0].assign(scalers.size(),
                       std::vector<MetricCell>(models.size()));
  for (std::size_t si = 0; si < scalers.size(); ++si)
    for (std::size_t mi = 0; mi < models.size(); ++mi)
      rep.values[0][si][mi] =
          aggregate_value(results, si, mi, [](double v) { return v; });
  return rep;
}

std::string render_report_markdown(const ExperimentReport& report) {
  std::string out = "# " + report.title + "\n\n";
  for (const auto& line : report.header_lines) out += line + "\n";
  if (!report.header_lines.empty()) out += "\n";

  for (std::size_t m = 0; m < report.metric_names.size(); ++m) {
    const std::size_t passes = report.render_sd ? 2 : 1;
    for (std::size_t pass = 0; pass < passes; ++pass) {
      out += "## " + report.metric_names[m];
      if (report.render_sd) out += pass == 0 ? " (mean)" : " (sd)";
      out += "\n\n| scaler |";
      for (const auto& label : report.model_labels) out += " " + label + " |";
      out += "\n|---|";
      for (std::size_t i = 0; i < report.model_labels.size(); ++i)
        out += "---|";
      out += "\n";
      for (std::size_t si = 0; si < report.scaler_labels.size(); ++si) {
        out += "| " + report.scaler_labels[si] + " |";
        for (std::size_t mi = 0; mi < report.model_labels.size(); ++mi) {
          const MetricCell& c = report.values[m][si][mi];
          if (c.skipped)
            out += " / |";
          else
            out += " " + fmt4(pass == 0 ? c.mean : c.sd) + " |";
        }
        out += "\n";
      }
      out += "\n";
      if (pass + 1 == passes) {
        std::string notes;
        for (std::size_t si = 0; si < report.scaler_labels.size(); ++si)
          for (std::size_t mi = 0; mi < report.model_labels.size(); ++mi) {
            const MetricCell& c = report.values[m][si][mi];
            if (c.skipped)
              notes += "- / " + report.scaler_labels[si] + " x " +
                       report.model_labels[mi] + ": " + c.skip_reason + "\n";
          }
        if (!notes.empty()) out += notes + "\n";
      }
    }
  }
  return out;
}

std::string render_report_csv(const ExperimentReport& report) {
  std::string out = "metric,scaler,model,mean,sd,reps,note\n";
  for (std::size_t m = 0; m < report.metric_names.size(); ++m)
    for (std::size_t si = 0; si < report.scaler_labels.size(); ++si)
      for (std::size_t mi = 0; mi < report.model_labels.size(); ++mi) {
        const MetricCell& c = report.values[m][si][mi];
        out += report.metric_names[m] + ',' + report.scaler_labels[si] + ',' +
               report.model_labels[mi] + ',';
        if (c.skipped) {
          std::string note = c.skip_reason;
          for (char& ch : note)
            if (ch == ',' || ch == '\n') ch = ';';
          out += ",,0," + note + "\n";
        } else {
          out += fmt4(c.mean) + ',' + fmt4(c.sd) + ',' +
                 std::to_string(c.reps) + ",\n";
        }
      }
  return out;
}

void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  if (jobs <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::scoped_lock lock(err_mutex);
        if (!err) err = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  const std::size_t n_threads = std::min(jobs, count);
  threads.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace ascale
