#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ascale/dataio.hpp"
#include "ascale/kv.hpp"
#include "ascale/matrix.hpp"
#include "ascale/models.hpp"
#include "ascale/scaling.hpp"

namespace ascale {

struct ExperimentConfig {
  std::uint64_t base_seed = 1;
  std::size_t reps = 0;  // 0 picks the experiment's own default
  std::size_t jobs = 1;
  std::size_t cv_folds = 5;
  Vector gamma_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  int sim2_case = 1;
  bool sim2_correlated = false;
  bool sim2_raw_offdiag = false;
  std::string target = "default payment next month";
  double train_ratio = 0.5;

  // Overlays `key = value` entries onto the defaults; unknown keys are
  // rejected.
  static ExperimentConfig from_record(const KvRecord& rec);
};

struct MetricCell {
  double mean = 0.0;
  double sd = 0.0;
  std::size_t reps = 0;
  bool skipped = false;
  std::string skip_reason;
};

struct ExperimentReport {
  std::string title;
  std::vector<std::string> header_lines;  // config echo, one `key = value` each
  std::vector<std::string> metric_names;
  std::vector<std::string> scaler_labels;
  std::vector<std::string> model_labels;
  // Indexed [metric][scaler][model].
  std::vector<std::vector<std::vector<MetricCell>>> values;
  bool render_sd = false;  // also emit a per-cell sd table (accuracy runs)
};

// Observation points for tests; callbacks may fire from worker threads.
struct RunHooks {
  std::function<void(std::size_t rep, std::size_t scaler_index,
                     std::size_t model_index, const FittedScaler& fitted)>
      on_scaler_fit;
  std::function<void(std::size_t done, std::size_t total)> on_rep_done;
};

// Synthetic study 1: relative prediction error of five penalized
// regressions under nine scalings.  Default 100 repetitions.
ExperimentReport run_sim1(const ExperimentConfig& cfg,
                          const RunHooks& hooks = {});

// Synthetic study 2: lasso selection quality (fake and lost rates) and
// noise-relative prediction under eight scalings.  Default 100 reps.
ExperimentReport run_sim2(const ExperimentConfig& cfg,
                          const RunHooks& hooks = {});

// Classification accuracy on a real dataset, nine scalings by five
// classifiers, with a fresh split every repetition.  When cfg.reps is 0
// the slower neighbourhood models run 100 repetitions and the rest 10.
ExperimentReport run_empirical(const Dataset& data,
                               const ExperimentConfig& cfg,
                               const RunHooks& hooks = {});

std::string render_report_markdown(const ExperimentReport& report);
std::string render_report_csv(const ExperimentReport& report);

// Deterministic worker pool over [0, count); jobs <= 1 runs inline.
void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& body);

}  // namespace ascale
