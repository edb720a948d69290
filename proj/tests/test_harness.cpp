#include <atomic>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ascale/datagen.hpp"
#include "ascale/errors.hpp"
#include "ascale/harness.hpp"
#include "ascale/scaling.hpp"
#include "doctest.h"
#include "support/helpers.hpp"

using namespace ascale;

namespace {

ExperimentConfig tiny_sim_config() {
  ExperimentConfig cfg;
  cfg.base_seed = 77;
  cfg.reps = 1;
  return cfg;
}

// Two tight clusters, positive coordinates so Level scaling stays away
// from its mean floor.
Dataset cluster_dataset() {
  Dataset d;
  const std::size_t per_class = 30;
  d.x = Matrix(2 * per_class, 2);
  d.y.resize(2 * per_class);
  RngStream rng(5150, 0);
  for (std::size_t i = 0; i < per_class; ++i) {
    d.x(i, 0) = 2.0 + 0.3 * rng.next_normal();
    d.x(i, 1) = 1.0 + 0.2 * rng.next_normal();
    d.y[i] = 0.0;
    d.x(per_class + i, 0) = 6.0 + 0.3 * rng.next_normal();
    d.x(per_class + i, 1) = 4.0 + 0.2 * rng.next_normal();
    d.y[per_class + i] = 1.0;
  }
  d.feature_names = {"f0", "f1"};
  d.kinds = {FeatureKind::Numeric, FeatureKind::Numeric};
  d.target_name = "label";
  return d;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config overlays records and rejects junk") {
  KvRecord rec;
  rec.set_u64("base_seed", 9);
  rec.set_u64("reps", 3);
  rec.set("sim2_correlated", "true");
  rec.set("sim2_raw_offdiag", "0");
  rec.set_doubles("gamma_grid", {0.0, 0.5});
  rec.set("target", "class");
  rec.set_double("train_ratio", 0.25);
  const ExperimentConfig cfg = ExperimentConfig::from_record(rec);
  CHECK(cfg.base_seed == 9);
  CHECK(cfg.reps == 3);
  CHECK(cfg.jobs == 1);         // untouched default
  CHECK(cfg.cv_folds == 5);     // untouched default
  CHECK(cfg.sim2_correlated);
  CHECK(!cfg.sim2_raw_offdiag);
  CHECK(cfg.gamma_grid == Vector{0.0, 0.5});
  CHECK(cfg.target == "class");
  CHECK(cfg.train_ratio == 0.25);

  KvRecord bad;
  bad.set("repz", "3");
  CHECK_THROWS_AS(ExperimentConfig::from_record(bad), DataError);

  KvRecord badbool;
  badbool.set("sim2_correlated", "yes");
  CHECK_THROWS_AS(ExperimentConfig::from_record(badbool), DataError);

  KvRecord badfolds;
  badfolds.set_u64("cv_folds", 1);
  CHECK_THROWS_AS(ExperimentConfig::from_record(badfolds), ArgumentError);
}

TEST_CASE("sim1 report shape and cell sanity") {
  const ExperimentReport rep = run_sim1(tiny_sim_config());
  CHECK(rep.metric_names == std::vector<std::string>{"rpe"});
  CHECK(rep.scaler_labels ==
        std::vector<std::string>{"No", "AS", "GAS", "ASHD", "Stand", "RS",
                                 "PS", "VS", "LS"});
  CHECK(rep.model_labels ==
        std::vector<std::string>{"Lasso", "AdaLasso", "Garrote", "SCAD",
                                 "MCP"});
  REQUIRE(rep.values.size() == 1);
  REQUIRE(rep.values[0].size() == 9);
  for (const auto& row : rep.values[0]) {
    REQUIRE(row.size() == 5);
    for (const MetricCell& c : row) {
      CHECK(!c.skipped);
      CHECK(c.reps == 1);
      CHECK(c.mean > 0.0);
      CHECK(c.sd == 0.0);  // one repetition
    }
  }
}

TEST_CASE("sim1 is deterministic and job-count invariant") {
  ExperimentConfig cfg = tiny_sim_config();
  cfg.reps = 2;
  const std::string a = render_report_markdown(run_sim1(cfg));
  const std::string b = render_report_markdown(run_sim1(cfg));
  CHECK(a == b);

  ExperimentConfig par = cfg;
  par.jobs = 2;
  const std::string c = render_report_markdown(run_sim1(par));
  CHECK(a == c);
  CHECK(a.find("# Synthetic study 1") == 0);
  CHECK(a.find("reps = 2") != std::string::npos);
  CHECK(a.find("## rpe") != std::string::npos);
  CHECK(a.find("| scaler | Lasso | AdaLasso | Garrote | SCAD | MCP |") !=
        std::string::npos);
}

TEST_CASE("scaler hook sees train-only fits keyed by the data substream") {
  ExperimentConfig cfg = tiny_sim_config();
  std::map<std::pair<std::size_t, std::size_t>, FittedScaler> seen;
  std::size_t calls = 0;
  RunHooks hooks;
  hooks.on_scaler_fit = [&](std::size_t rep, std::size_t si, std::size_t mi,
                            const FittedScaler& fitted) {
    ++calls;
    CHECK(rep == 0);
    seen[{si, mi}] = fitted;
  };
  run_sim1(cfg, hooks);
  CHECK(calls == 45);

  // Rebuild the repetition's training partition and refit by hand; the
  // harness must have fitted on exactly these rows.
  RngStream drng = RngStream(cfg.base_seed, 0).substream(0);
  const RealizedSim sim = realize(sim1_scenario(), drng);
  ScalerSpec stand;
  stand.method = ScalerMethod::Standardization;
  const FittedScaler want = fit_scaler(stand, sim.x_train);
  const FittedScaler& got = seen.at({4, 0});  // Stand column, Lasso row
  REQUIRE(got.mu.size() == want.mu.size());
  for (std::size_t j = 0; j < want.mu.size(); ++j) {
    CHECK(got.mu[j] == want.mu[j]);
    CHECK(got.alpha[j] == want.alpha[j]);
  }

  ScalerSpec adapt;
  adapt.method = ScalerMethod::Adaptive;
  const FittedScaler want_as = fit_scaler(adapt, sim.x_train, &sim.y_train);
  const FittedScaler& got_as = seen.at({1, 3});
  for (std::size_t j = 0; j < want_as.alpha.size(); ++j)
    CHECK(got_as.alpha[j] == want_as.alpha[j]);
}

TEST_CASE("sim2 report shape, rate cells, and metric split") {
  ExperimentConfig cfg = tiny_sim_config();
  cfg.reps = 2;
  cfg.sim2_case = 1;
  const ExperimentReport rep = run_sim2(cfg);
  CHECK(rep.metric_names ==
        std::vector<std::string>{"fake", "lost", "prediction"});
  CHECK(rep.scaler_labels ==
        std::vector<std::string>{"No", "AS", "ASHD", "Stand", "RS", "PS",
                                 "VS", "LS"});
  CHECK(rep.model_labels == std::vector<std::string>{"Lasso"});
  REQUIRE(rep.values.size() == 3);
  for (const auto& table : rep.values) {
    REQUIRE(table.size() == 8);
    for (const auto& row : table) REQUIRE(row.size() == 1);
  }
  for (std::size_t si = 0; si < 8; ++si) {
    for (std::size_t m = 0; m < 3; ++m) {
      const MetricCell& c = rep.values[m][si][0];
      CHECK(!c.skipped);
      CHECK(c.reps == 2);
    }
    CHECK(rep.values[0][si][0].mean >= 0.0);  // fake rate
    CHECK(rep.values[0][si][0].mean <= 1.0);
    CHECK(rep.values[1][si][0].mean >= 0.0);  // lost rate
    CHECK(rep.values[1][si][0].mean <= 1.0);
    CHECK(rep.values[2][si][0].mean > 0.0);   // noise-relative error
  }
  CHECK(rep.title.find("case 1") != std::string::npos);
  CHECK(rep.title.find("(independent)") != std::string::npos);
}

TEST_CASE("empirical run covers nine scalers by five classifiers") {
  const Dataset data = cluster_dataset();
  ExperimentConfig cfg;
  cfg.base_seed = 11;
  cfg.reps = 2;
  const ExperimentReport rep = run_empirical(data, cfg);
  CHECK(rep.metric_names == std::vector<std::string>{"accuracy"});
  CHECK(rep.render_sd);
  CHECK(rep.scaler_labels.size() == 9);
  CHECK(rep.model_labels ==
        std::vector<std::string>{"KNN", "KMeans", "GNB", "Logistic", "LDA"});
  REQUIRE(rep.values.size() == 1);
  std::size_t live = 0;
  for (const auto& row : rep.values[0]) {
    REQUIRE(row.size() == 5);
    for (const MetricCell& c : row) {
      if (c.skipped) {
        CHECK(!c.skip_reason.empty());
        continue;
      }
      ++live;
      CHECK(c.reps == 2);
      CHECK(c.mean >= 0.0);
      CHECK(c.mean <= 1.0);
    }
  }
  CHECK(live >= 40);  // well separated clusters should mostly just work
  // KNN never involves a solver, so its column must be fully live.
  for (std::size_t si = 0; si < 9; ++si) CHECK(!rep.values[0][si][0].skipped);

  const std::string md = render_report_markdown(rep);
  CHECK(md.find("## accuracy (mean)") != std::string::npos);
  CHECK(md.find("## accuracy (sd)") != std::string::npos);
  CHECK(md.find("target = label") != std::string::npos);
}

TEST_CASE("empirical reruns reproduce byte for byte across jobs") {
  const Dataset data = cluster_dataset();
  ExperimentConfig cfg;
  cfg.base_seed = 11;
  cfg.reps = 2;
  const std::string a = render_report_csv(run_empirical(data, cfg));
  ExperimentConfig par = cfg;
  par.jobs = 3;
  const std::string b = render_report_csv(run_empirical(data, par));
  CHECK(a == b);
}

TEST_CASE("renderers mark skipped cells with a slash and a note") {
  ExperimentReport rep;
  rep.title = "toy";
  rep.metric_names = {"rpe"};
  rep.scaler_labels = {"No", "RS"};
  rep.model_labels = {"Lasso"};
  rep.values.assign(1, {});
  rep.values[0].assign(2, std::vector<MetricCell>(1));
  rep.values[0][0][0].mean = 1.25;
  rep.values[0][0][0].sd = 0.5;
  rep.values[0][0][0].reps = 4;
  rep.values[0][1][0].skipped = true;
  rep.values[0][1][0].skip_reason = "solver, gave\nup";

  const std::string md = render_report_markdown(rep);
  CHECK(md.find("| No | 1.2500 |") != std::string::npos);
  CHECK(md.find("| RS | / |") != std::string::npos);
  CHECK(md.find("- / RS x Lasso: solver, gave\nup") != std::string::npos);

  const std::string csv = render_report_csv(rep);
  CHECK(csv.find("metric,scaler,model,mean,sd,reps,note") == 0);
  CHECK(csv.find("rpe,No,Lasso,1.2500,0.5000,4,") != std::string::npos);
  CHECK(csv.find("rpe,RS,Lasso,,,0,solver; gave;up") != std::string::npos);
}

TEST_CASE("parallel_for covers the range exactly once in any job count") {
  for (std::size_t jobs : {std::size_t{1}, std::size_t{3}, std::size_t{8}}) {
    std::vector<std::atomic<int>> hits(17);
    for (auto& h : hits) h.store(0);
    parallel_for(17, jobs, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) CHECK(h.load() == 1);
  }
  bool ran = false;
  parallel_for(0, 4, [&](std::size_t) { ran = true; });
  CHECK(!ran);
}

}  // TEST_SUITE
