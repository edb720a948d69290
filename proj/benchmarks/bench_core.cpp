#include <benchmark/benchmark.h>

#include "ascale/classifiers.hpp"
#include "ascale/datagen.hpp"
#include "ascale/regression.hpp"
#include "ascale/rng.hpp"
#include "ascale/scaling.hpp"

namespace {

using namespace ascale;

RealizedSim make_sim() {
  RngStream rng(7, 0);
  return realize(sim1_scenario(), rng);
}

void bm_fit_scaler(benchmark::State& state,
                   ScalerMethod method) {
  const RealizedSim sim = make_sim();
  ScalerSpec spec;
  spec.method = method;
  for (auto _ : state) {
    auto fitted = fit_scaler(spec, sim.x_train, &sim.y_train);
    benchmark::DoNotOptimize(fitted.alpha.data());
  }
}

void bm_transform(benchmark::State& state) {
  const RealizedSim sim = make_sim();
  ScalerSpec spec;
  spec.method = ScalerMethod::Standardization;
  const auto fitted = fit_scaler(spec, sim.x_train, &sim.y_train);
  for (auto _ : state) {
    Matrix out = fitted.transform(sim.x_train);
    benchmark::DoNotOptimize(out.data().data());
  }
}

void bm_lasso_path(benchmark::State& state) {
  const RealizedSim sim = make_sim();
  PenaltySpec spec;
  spec.family = PenaltyFamily::Lasso;
  for (auto _ : state) {
    RngStream rng(7, 1);
    auto cv = cv_select_lambda(sim.x_train, sim.y_train, spec, 5, rng);
    benchmark::DoNotOptimize(cv.lambda_star);
  }
}

void bm_knn(benchmark::State& state) {
  const RealizedSim sim = make_sim();
  std::vector<int> labels(sim.y_train.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    labels[i] = sim.y_train[i] > 0.0 ? 1 : 0;
  const auto model = fit_knn(sim.x_train, labels, 5);
  for (auto _ : state) {
    auto pred = classify(model, sim.x_test);
    benchmark::DoNotOptimize(pred.data());
  }
}

BENCHMARK_CAPTURE(bm_fit_scaler, standardization,
                  ScalerMethod::Standardization);
BENCHMARK_CAPTURE(bm_fit_scaler, adaptive, ScalerMethod::Adaptive);
BENCHMARK(bm_transform);
BENCHMARK(bm_lasso_path);
BENCHMARK(bm_knn);

}  // namespace

BENCHMARK_MAIN();
