#include "ascale/datagen.hpp"

#include <cmath>
#include <cstddef>

#include "ascale/errors.hpp"
#include "ascale/linalg.hpp"

namespace ascale {

KvRecord SimScenario::to_record() const {
  KvRecord rec;
  rec.set("record", "sim_scenario");
  rec.set("name", name);
  rec.set_u64("n", n);
  rec.set_u64("p", p());
  rec.set_doubles("beta", beta);
  rec.set_doubles("mu", mu);
  Vector flat(p() * p());
  for (std::size_t i = 0; i < p(); ++i)
    for (std::size_t j = 0; j < p(); ++j) flat[i * p() + j] = sigma(i, j);
  rec.set_doubles("sigma", flat);
  rec.set_double("noise_sd", noise_sd);
  rec.set_double("train_ratio", train_ratio);
  return rec;
}

SimScenario SimScenario::from_record(const KvRecord& rec) {
  if (rec.get_optional("record").value_or("") != "sim_scenario")
    throw DataError("record is not a sim_scenario");
  SimScenario s;
  s.name = rec.get("name");
  s.n = rec.get_u64("n");
  s.beta = rec.get_doubles("beta");
  s.mu = rec.get_doubles("mu");
  const std::size_t p = rec.get_u64("p");
  if (p != s.beta.size() || p != s.mu.size())
    throw DataError("sim_scenario dimensions are inconsistent");
  const Vector flat = rec.get_doubles("sigma");
  if (flat.size() != p * p)
    throw DataError("sim_scenario sigma has the wrong size");
  s.sigma = Matrix(p, p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) s.sigma(i, j) = flat[i * p + j];
  s.noise_sd = rec.get_double("noise_sd");
  s.train_ratio = rec.get_double("train_ratio");
  return s;
}

SimScenario sim1_scenario() {
  SimScenario s;
  s.name = "sim1";
  s.n = 100;
  s.beta = {3.0, 1.5, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0};
  s.mu.assign(8, 0.0);
  s.sigma = Matrix(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      s.sigma(i, j) = std::pow(0.5, std::abs(static_cast<int>(i) -
                                             static_cast<int>(j)));
  s.noise_sd = 3.0;
  s.train_ratio = 0.5;
  return s;
}

SimScenario sim2_scenario(int sparsity_case, bool correlated,
                          bool raw_offdiag) {
  detail::require(sparsity_case >= 1 && sparsity_case <= 4,
                  "sparsity case must be 1 through 4");
  SimScenario s;
  s.name = "sim2_case" + std::to_string(sparsity_case) +
           (correlated ? "_corr" : "_indep");
  s.n = 1000;
  switch (sparsity_case) {
    case 1: s.beta = {0, 0, 0, 0, 1, 1, 1, 1}; break;
    case 2: s.beta = {1, 1, 1, 1, 0, 0, 0, 0}; break;
    case 3: s.beta = {0, 0, 1, 1, 1, 1, 0, 0}; break;
    default: s.beta = {1, 1, 0, 0, 0, 0, 1, 1}; break;
  }
  s.mu.assign(8, 0.0);
  s.sigma = Matrix(8, 8);
  for (std::size_t i = 0; i < 8; ++i)
    s.sigma(i, i) = std::pow(3.0, static_cast<double>(i + 1));
  if (correlated) {
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j) {
        if (i == j) continue;
        const double base = std::pow(0.5, std::abs(static_cast<int>(i) -
                                                   static_cast<int>(j)));
        s.sigma(i, j) =
            raw_offdiag
                ? base
                : base * std::pow(3.0, static_cast<double>(i + j + 2) / 2.0);
      }
  }
  s.noise_sd = 5.0;
  s.train_ratio = 0.5;
  return s;
}

RealizedSim realize(const SimScenario& scenario, RngStream& rng) {
  detail::require(scenario.n >= 2, "scenario needs at least two rows");
  detail::require(scenario.p() >= 1, "scenario needs at least one feature");
  detail::require(scenario.mu.size() == scenario.p() &&
                      scenario.sigma.rows() == scenario.p() &&
                      scenario.sigma.cols() == scenario.p(),
                  "scenario dimensions are inconsistent");
  detail::require(scenario.noise_sd > 0.0, "noise sd must be positive");
  detail::require(scenario.train_ratio > 0.0 && scenario.train_ratio < 1.0,
                  "train ratio must lie strictly between 0 and 1");

  const std::size_t n = scenario.n;
  const std::size_t p = scenario.p();
  const Matrix x = sample_mvn(scenario.mu, scenario.sigma, n, rng);
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = scenario.noise_sd * rng.next_normal();
    for (std::size_t j = 0; j < p; ++j) v += x(i, j) * scenario.beta[j];
    y[i] = v;
  }

  const auto n_train = static_cast<std::size_t>(
      std::ceil(scenario.train_ratio * static_cast<double>(n)));
  RealizedSim out;
  out.x_train = Matrix(n_train, p);
  out.x_test = Matrix(n - n_train, p);
  out.y_train.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n_train));
  out.y_test.assign(y.begin() + static_cast<std::ptrdiff_t>(n_train), y.end());
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n_train; ++i) out.x_train(i, j) = x(i, j);
    for (std::size_t i = n_train; i < n; ++i)
      out.x_test(i - n_train, j) = x(i, j);
  }
  return out;
}

}  // namespace ascale
