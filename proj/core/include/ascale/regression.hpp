#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ascale/kv.hpp"
#include "ascale/matrix.hpp"
#include "ascale/rng.hpp"

namespace ascale {

enum class PenaltyFamily {
  Ols,
  Lasso,
  AdaptiveLasso,
  Scad,
  Mcp,
  Garrote,
};

struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::Lasso;
  double lambda = 0.0;
  double scad_a = 3.7;
  double mcp_gamma = 3.0;
  // Adaptive lasso per-feature weights; when absent they default to
  // 1 / |ols coefficient| computed on the training data.
  std::optional<Vector> adaptive_weights;
  double tol = 1e-7;
  std::size_t max_sweeps = 10000;
};

struct LinearFit {
  Vector beta;
  double intercept = 0.0;
  std::vector<std::size_t> selected_support;  // indices with beta != 0
  std::vector<double> objective_trace;        // objective after each sweep
  double lambda_used = 0.0;

  KvRecord to_record() const;
};

// Unpenalized least squares with intercept.  Rank-deficient designs get
// the minimum-norm solution.
LinearFit fit_ols(const Matrix& x, const Vector& y);

// Penalized fit at a fixed lambda.  The intercept is never penalized.
LinearFit fit_penalized(const Matrix& x, const Vector& y,
                        const PenaltySpec& spec);

Vector predict_linear(const LinearFit& fit, const Matrix& x);

// Smallest lambda that zeroes every coordinate in one sweep from zero,
// under the given penalty family.
double lambda_max(const Matrix& x, const Vector& y, const PenaltySpec& spec);

// Descending log-spaced grid from lambda_max down to ratio * lambda_max.
std::vector<double> default_lambda_grid(double lam_max, std::size_t count = 50,
                                        double ratio = 1e-3);

struct LambdaCvResult {
  double lambda_star = 0.0;
  std::vector<double> grid;
  std::vector<double> mean_mse;  // aligned with grid
};

// K-fold cross validation over a descending lambda path with warm
// starts.  Ties in the cv score resolve toward the larger lambda.
LambdaCvResult cv_select_lambda(const Matrix& x, const Vector& y,
                                const PenaltySpec& spec, std::size_t folds,
                                RngStream& rng,
                                const std::vector<double>& grid_override = {});

}  // namespace ascale
