#pragma once

#include <cstddef>
#include <string>

#include "ascale/kv.hpp"
#include "ascale/matrix.hpp"
#include "ascale/rng.hpp"

namespace ascale {

// A fully specified synthetic regression setting: y = x beta + eps with
// x ~ N(mu, sigma) and eps ~ N(0, noise_sd^2).
struct SimScenario {
  std::string name;
  std::size_t n = 0;
  Vector beta;
  Vector mu;
  Matrix sigma;
  double noise_sd = 1.0;
  double train_ratio = 0.5;

  std::size_t p() const { return beta.size(); }

  KvRecord to_record() const;
  static SimScenario from_record(const KvRecord& rec);
};

SimScenario sim1_scenario();

// Four sparsity patterns over features whose variances grow as powers of
// three.  `correlated` adds off-diagonal structure; `raw_offdiag` keeps
// the plain 0.5^|i-j| off-diagonals instead of scaling them to the
// feature variances.
SimScenario sim2_scenario(int sparsity_case, bool correlated,
                          bool raw_offdiag = false);

struct RealizedSim {
  Matrix x_train;
  Vector y_train;
  Matrix x_test;
  Vector y_test;
};

// Draws one dataset and splits it: the first ceil(n * train_ratio) rows
// are the training set, with no shuffling.
RealizedSim realize(const SimScenario& scenario, RngStream& rng);

}  // namespace ascale
