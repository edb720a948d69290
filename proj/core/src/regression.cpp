#include "ascale/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "ascale/dataio.hpp"
#include "ascale/errors.hpp"
#include "ascale/linalg.hpp"

namespace ascale {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Penalty values at |beta| = t >= 0; lambda is already folded in.
double scad_penalty(double t, double lambda, double a) {
  if (t <= lambda) return lambda * t;
  if (t <= a * lambda)
    return (2.0 * a * lambda * t - t * t - lambda * lambda) /
           (2.0 * (a - 1.0));
  return lambda * lambda * (a + 1.0) / 2.0;
}

double mcp_penalty(double t, double lambda, double gamma) {
  if (t <= gamma * lambda) return lambda * t - t * t / (2.0 * gamma);
  return gamma * lambda * lambda / 2.0;
}

struct CenteredData {
  Matrix xc;
  Vector yc;
  Vector x_mean;
  double y_mean = 0.0;
  Vector nu;  // squared column norms of xc
};

CenteredData center_data(const Matrix& x, const Vector& y) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  CenteredData d;
  d.xc = x;
  d.yc = y;
  d.x_mean.resize(p);
  d.nu.resize(p);

  for (double v : y) d.y_mean += v;
  d.y_mean /= static_cast<double>(n);
  for (auto& v : d.yc) v -= d.y_mean;

  for (std::size_t j = 0; j < p; ++j) {
    auto col = d.xc.col(j);
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(n);
    d.x_mean[j] = mean;
    double ss = 0.0;
    for (auto& v : col) {
      v -= mean;
      ss += v * v;
    }
    d.nu[j] = ss;
  }
  return d;
}

// Least squares on already-centered data; used for adaptive lasso default
// weights and the garrote base estimate.  Exactly zero columns are dropped
// first and get a zero coefficient; the rest must form a full-rank system
// with more rows than columns.
Vector centered_ols(const CenteredData& d, const char* who) {
  const std::size_t p = d.xc.cols();
  std::vector<std::size_t> live;
  for (std::size_t j = 0; j < p; ++j)
    if (d.nu[j] > 0.0) live.push_back(j);

  Vector beta(p, 0.0);
  if (live.empty()) return beta;

  if (d.xc.rows() <= live.size())
    throw NumericalError(std::string(who) +
                         " needs more rows than live columns for its base "
                         "least squares estimate");

  Matrix sub(d.xc.rows(), live.size());
  for (std::size_t k = 0; k < live.size(); ++k) {
    auto src = d.xc.col(live[k]);
    auto dst = sub.col(k);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  auto ls = solve_least_squares(sub, d.yc);
  if (ls.rank < live.size())
    throw NumericalError(std::string(who) +
                         " needs a full-rank design for its base least "
                         "squares estimate");
  for (std::size_t k = 0; k < live.size(); ++k) beta[live[k]] = ls.beta[k];
  return beta;
}

struct FamilyContext {
  PenaltyFamily family = PenaltyFamily::Lasso;
  double scad_a = 3.7;
  double mcp_gamma = 3.0;
  Vector weights;   // adaptive lasso; +inf pins a coordinate at zero
  Vector ols_beta;  // garrote base estimate
};

FamilyContext make_context(const CenteredData& d, const PenaltySpec& spec) {
  FamilyContext ctx;
  ctx.family = spec.family;
  ctx.scad_a = spec.scad_a;
  ctx.mcp_gamma = spec.mcp_gamma;

  if (spec.family == PenaltyFamily::AdaptiveLasso) {
    if (spec.adaptive_weights) {
      detail::require(spec.adaptive_weights->size() == d.xc.cols(),
                      "adaptive weights length must match feature count");
      for (double w : *spec.adaptive_weights)
        detail::require(w >= 0.0 && !std::isnan(w),
                        "adaptive weights must be nonnegative");
      ctx.weights = *spec.adaptive_weights;
    } else {
      Vector beta = centered_ols(d, "adaptive lasso");
      ctx.weights.resize(beta.size());
      for (std::size_t j = 0; j < beta.size(); ++j)
        ctx.weights[j] = beta[j] == 0.0 ? kInf : 1.0 / std::abs(beta[j]);
    }
  } else if (spec.family == PenaltyFamily::Garrote) {
    ctx.ols_beta = centered_ols(d, "nonnegative garrote");
  }
  return ctx;
}

double penalty_value(const FamilyContext& ctx, double lambda,
                     const Vector& beta) {
  double total = 0.0;
  switch (ctx.family) {
    case PenaltyFamily::Lasso:
      for (double b : beta) total += lambda * std::abs(b);
      break;
    case PenaltyFamily::AdaptiveLasso:
      for (std::size_t j = 0; j < beta.size(); ++j)
        if (beta[j] != 0.0) total += lambda * ctx.weights[j] * std::abs(beta[j]);
      break;
    case PenaltyFamily::Scad:
      for (double b : beta) total += scad_penalty(std::abs(b), lambda, ctx.scad_a);
      break;
    case PenaltyFamily::Mcp:
      for (double b : beta)
        total += mcp_penalty(std::abs(b), lambda, ctx.mcp_gamma);
      break;
    default:
      break;
  }
  return total;
}

// Exact minimizer of h(t) = nu/2 t^2 - z t + p(|t|) for the scad and mcp
// penalties, by evaluating h at every stationary point and region
// boundary.  Ties resolve toward the smaller magnitude.
double nonconvex_coordinate_min(const FamilyContext& ctx, double nu, double z,
                                double lambda) {
  const double az = std::abs(z);
  std::vector<double> cand{0.0};

  if (ctx.family == PenaltyFamily::Scad) {
    const double a = ctx.scad_a;
    const double t1 = (az - lambda) / nu;
    if (t1 >= 0.0 && t1 <= lambda) cand.push_back(t1);
    const double den = nu * (a - 1.0) - 1.0;
    if (den != 0.0) {
      const double t2 = ((a - 1.0) * az - a * lambda) / den;
      if (t2 > lambda && t2 <= a * lambda) cand.push_back(t2);
    }
    const double t3 = az / nu;
    if (t3 > a * lambda) cand.push_back(t3);
    cand.push_back(lambda);
    cand.push_back(a * lambda);
  } else {
    const double g = ctx.mcp_gamma;
    const double den = nu - 1.0 / g;
    if (den != 0.0) {
      const double t1 = (az - lambda) / den;
      if (t1 >= 0.0 && t1 <= g * lambda) cand.push_back(t1);
    }
    const double t2 = az / nu;
    if (t2 > g * lambda) cand.push_back(t2);
    cand.push_back(g * lambda);
  }

  std::sort(cand.begin(), cand.end());
  double best_t = 0.0;
  double best_h = kInf;
  for (double t : cand) {
    const double pen = ctx.family == PenaltyFamily::Scad
                           ? scad_penalty(t, lambda, ctx.scad_a)
                           : mcp_penalty(t, lambda, ctx.mcp_gamma);
    const double h = 0.5 * nu * t * t - az * t + pen;
    if (h < best_h) {
      best_h = h;
      best_t = t;
    }
  }
  return z < 0.0 ? -best_t : best_t;
}

double coordinate_min(const FamilyContext& ctx, std::size_t j, double nu,
                      double z, double lambda) {
  switch (ctx.family) {
    case PenaltyFamily::Lasso:
      return soft_threshold(z, lambda) / nu;
    case PenaltyFamily::AdaptiveLasso: {
      const double w = ctx.weights[j];
      if (std::isinf(w)) return 0.0;
      return soft_threshold(z, lambda * w) / nu;
    }
    default:
      return nonconvex_coordinate_min(ctx, nu, z, lambda);
  }
}

struct CdWork {
  Vector beta;
  Vector r;
};

void cd_solve(const CenteredData& d, const FamilyContext& ctx, double lambda,
              double tol, std::size_t max_sweeps, CdWork& work,
              std::vector<double>& trace) {
  const std::size_t p = d.xc.cols();
  trace.clear();
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double nu = d.nu[j];
      if (nu == 0.0) continue;
      auto col = d.xc.col(j);
      const double z = dot(col, work.r) + nu * work.beta[j];
      const double t = coordinate_min(ctx, j, nu, z, lambda);
      const double delta = t - work.beta[j];
      if (delta != 0.0) {
        work.beta[j] = t;
        for (std::size_t i = 0; i < col.size(); ++i)
          work.r[i] -= delta * col[i];
      }
      max_delta = std::max(max_delta, std::abs(delta));
    }
    trace.push_back(0.5 * dot(work.r, work.r) +
                    penalty_value(ctx, lambda, work.beta));
    if (max_delta < tol) return;
  }
  throw ConvergenceError("coordinate descent did not converge within " +
                             std::to_string(max_sweeps) + " sweeps",
                         trace);
}

// Garrote state holds the nonnegative shrinkage factors c; the reported
// coefficients are c_j * ols_beta_j.
void garrote_solve(const CenteredData& d, const FamilyContext& ctx,
                   double lambda, double tol, std::size_t max_sweeps,
                   CdWork& work, std::vector<double>& trace) {
  const std::size_t p = d.xc.cols();
  trace.clear();
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_delta = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      const double b = ctx.ols_beta[j];
      const double nu_u = b * b * d.nu[j];
      if (nu_u == 0.0) continue;
      auto col = d.xc.col(j);
      const double z = b * dot(col, work.r) + nu_u * work.beta[j];
      const double c = std::max(0.0, (z - lambda) / nu_u);
      const double delta = c - work.beta[j];
      if (delta != 0.0) {
        work.beta[j] = c;
        const double step = delta * b;
        for (std::size_t i = 0; i < col.size(); ++i)
          work.r[i] -= step * col[i];
      }
      max_delta = std::max(max_delta, std::abs(delta));
    }
    double csum = 0.0;
    for (double c : work.beta) csum += c;
    trace.push_back(0.5 * dot(work.r, work.r) + lambda * csum);
    if (max_delta < tol) return;
  }
  throw ConvergenceError("garrote coordinate descent did not converge within " +
                             std::to_string(max_sweeps) + " sweeps",
                         trace);
}

void solve_at(const CenteredData& d, const FamilyContext& ctx,
              const PenaltySpec& spec, double lambda, CdWork& work,
              std::vector<double>& trace) {
  if (ctx.family == PenaltyFamily::Garrote)
    garrote_solve(d, ctx, lambda, spec.tol, spec.max_sweeps, work, trace);
  else
    cd_solve(d, ctx, lambda, spec.tol, spec.max_sweeps, work, trace);
}

Vector output_beta(const FamilyContext& ctx, const CdWork& work) {
  if (ctx.family != PenaltyFamily::Garrote) return work.beta;
  Vector beta(work.beta.size());
  for (std::size_t j = 0; j < beta.size(); ++j)
    beta[j] = work.beta[j] * ctx.ols_beta[j];
  return beta;
}

void validate_inputs(const Matrix& x, const Vector& y,
                     const PenaltySpec& spec) {
  detail::require(x.rows() == y.size(),
                  "x row count must match y length");
  detail::require(x.rows() >= 2, "need at least two rows");
  detail::require(x.cols() >= 1, "need at least one feature");
  detail::require(std::isfinite(spec.lambda) && spec.lambda >= 0.0,
                  "lambda must be finite and nonnegative");
  detail::require(spec.tol > 0.0, "tolerance must be positive");
  detail::require(spec.max_sweeps >= 1, "max_sweeps must be at least 1");
  detail::require(spec.scad_a > 2.0, "scad a parameter must exceed 2");
  detail::require(spec.mcp_gamma > 1.0, "mcp gamma parameter must exceed 1");
}

LinearFit finish_fit(const CenteredData& d, const FamilyContext& ctx,
                     const CdWork& work, std::vector<double> trace,
                     double lambda) {
  LinearFit fit;
  fit.beta = output_beta(ctx, work);
  fit.intercept = d.y_mean - dot(std::span<const double>(d.x_mean),
                                 std::span<const double>(fit.beta));
  for (std::size_t j = 0; j < fit.beta.size(); ++j)
    if (fit.beta[j] != 0.0) fit.selected_support.push_back(j);
  fit.objective_trace = std::move(trace);
  fit.lambda_used = lambda;
  return fit;
}

}  // namespace

KvRecord LinearFit::to_record() const {
  KvRecord rec;
  rec.set("record", "linear_fit");
  rec.set_doubles("beta", beta);
  rec.set_double("intercept", intercept);
  rec.set_double("lambda", lambda_used);
  return rec;
}

LinearFit fit_ols(const Matrix& x, const Vector& y) {
  detail::require(x.rows() == y.size(), "x row count must match y length");
  detail::require(x.rows() >= 2, "need at least two rows");
  CenteredData d = center_data(x, y);
  auto ls = solve_least_squares(d.xc, d.yc);

  LinearFit fit;
  fit.beta = std::move(ls.beta);
  fit.intercept = d.y_mean - dot(std::span<const double>(d.x_mean),
                                 std::span<const double>(fit.beta));
  for (std::size_t j = 0; j < fit.beta.size(); ++j)
    if (fit.beta[j] != 0.0) fit.selected_support.push_back(j);
  return fit;
}

LinearFit fit_penalized(const Matrix& x, const Vector& y,
                        const PenaltySpec& spec) {
  validate_inputs(x, y, spec);
  if (spec.family == PenaltyFamily::Ols) {
    LinearFit fit = fit_ols(x, y);
    fit.lambda_used = 0.0;
    return fit;
  }

  CenteredData d = center_data(x, y);
  FamilyContext ctx = make_context(d, spec);
  CdWork work{Vector(x.cols(), 0.0), d.yc};
  std::vector<double> trace;
  solve_at(d, ctx, spec, spec.lambda, work, trace);
  return finish_fit(d, ctx, work, std::move(trace), spec.lambda);
}

Vector predict_linear(const LinearFit& fit, const Matrix& x) {
  detail::require(x.cols() == fit.beta.size(),
                  "prediction feature count must match fit");
  Vector out(x.rows(), fit.intercept);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const double b = fit.beta[j];
    if (b == 0.0) continue;
    auto col = x.col(j);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b * col[i];
  }
  return out;
}

double lambda_max(const Matrix& x, const Vector& y, const PenaltySpec& spec) {
  detail::require(x.rows() == y.size(), "x row count must match y length");
  detail::require(spec.family != PenaltyFamily::Ols,
                  "lambda_max is undefined for unpenalized least squares");
  CenteredData d = center_data(x, y);
  FamilyContext ctx = make_context(d, spec);

  double best = 0.0;
  for (std::size_t j = 0; j < d.xc.cols(); ++j) {
    if (d.nu[j] == 0.0) continue;
    const double z = dot(d.xc.col(j), std::span<const double>(d.yc));
    double v = 0.0;
    switch (spec.family) {
      case PenaltyFamily::AdaptiveLasso: {
        const double w = ctx.weights[j];
        if (w == 0.0 || std::isinf(w)) continue;
        v = std::abs(z) / w;
        break;
      }
      case PenaltyFamily::Garrote:
        v = std::max(0.0, ctx.ols_beta[j] * z);
        break;
      default:
        v = std::abs(z);
        break;
    }
    best = std::max(best, v);
  }
  return best > 0.0 ? best : 1e-12;
}

std::vector<double> default_lambda_grid(double lam_max, std::size_t count,
                                        double ratio) {
  detail::require(lam_max > 0.0, "lambda grid top must be positive");
  detail::require(count >= 1, "lambda grid needs at least one point");
  detail::require(ratio > 0.0 && ratio < 1.0,
                  "lambda grid ratio must lie in (0, 1)");
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = lam_max;
    return grid;
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double frac =
        static_cast<double>(i) / static_cast<double>(count - 1);
    grid[i] = lam_max * std::pow(ratio, frac);
  }
  return grid;
}

LambdaCvResult cv_select_lambda(const Matrix& x, const Vector& y,
                                const PenaltySpec& spec, std::size_t folds,
                                RngStream& rng,
                                const std::vector<double>& grid_override) {
  validate_inputs(x, y, spec);
  detail::require(spec.family != PenaltyFamily::Ols,
                  "cross validation needs a penalized family");
  const std::size_t n = x.rows();
  auto fold_idx = kfold_indices(n, folds, rng);

  std::vector<double> grid = grid_override;
  if (grid.empty()) {
    grid = default_lambda_grid(lambda_max(x, y, spec));
  } else {
    for (double v : grid)
      detail::require(std::isfinite(v) && v >= 0.0,
                      "lambda grid values must be finite and nonnegative");
    std::sort(grid.begin(), grid.end(), std::greater<>());
  }

  std::vector<double> mean_mse(grid.size(), 0.0);
  for (const auto& val_rows : fold_idx) {
    std::vector<bool> in_val(n, false);
    for (std::size_t i : val_rows) in_val[i] = true;
    const std::size_t n_val = val_rows.size();
    const std::size_t n_tr = n - n_val;

    Matrix xtr(n_tr, x.cols());
    Matrix xval(n_val, x.cols());
    Vector ytr(n_tr), yval(n_val);
    std::size_t it = 0, iv = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (in_val[i]) {
        for (std::size_t j = 0; j < x.cols(); ++j) xval(iv, j) = x(i, j);
        yval[iv++] = y[i];
      } else {
        for (std::size_t j = 0; j < x.cols(); ++j) xtr(it, j) = x(i, j);
        ytr[it++] = y[i];
      }
    }

    CenteredData d = center_data(xtr, ytr);
    FamilyContext ctx = make_context(d, spec);
    CdWork work{Vector(x.cols(), 0.0), d.yc};
    std::vector<double> trace;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      solve_at(d, ctx, spec, grid[g], work, trace);
      Vector beta = output_beta(ctx, work);
      double sse = 0.0;
      for (std::size_t i = 0; i < n_val; ++i) {
        double pred = d.y_mean;
        for (std::size_t j = 0; j < x.cols(); ++j)
          pred += beta[j] * (xval(i, j) - d.x_mean[j]);
        const double e = yval[i] - pred;
        sse += e * e;
      }
      mean_mse[g] += sse / static_cast<double>(n_val);
    }
  }
  for (auto& v : mean_mse) v /= static_cast<double>(fold_idx.size());

  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g)
    if (mean_mse[g] < mean_mse[best]) best = g;

  LambdaCvResult out;
  out.lambda_star = grid[best];
  out.grid = std::move(grid);
  out.mean_mse = std::move(mean_mse);
  return out;
}

}  // namespace ascale
