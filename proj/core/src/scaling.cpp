#include "ascale/scaling.hpp"

#include <cmath>
#include <string>

#include "ascale/dataio.hpp"
#include "ascale/errors.hpp"
#include "ascale/linalg.hpp"

namespace ascale {

namespace {

constexpr double kLevelMeanFloor = 1e-12;

bool uses_gamma(ScalerMethod m) {
  return m == ScalerMethod::GeneralizedAdaptive ||
         m == ScalerMethod::AdaptiveHeuristic;
}

bool needs_target(ScalerMethod m) {
  return m == ScalerMethod::Adaptive || uses_gamma(m);
}

// Centered copy of x; means taken from column_stats.
Matrix center_columns(const Matrix& x, const std::vector<ColumnStats>& stats) {
  Matrix c = x;
  for (std::size_t j = 0; j < c.cols(); ++j) {
    const double m = stats[j].mean;
    for (double& v : c.col(j)) v -= m;
  }
  return c;
}

// Multivariate OLS coefficients of y on centered columns, for the adaptive
// family.  Requires n > p and a full-rank centered design.
Vector adaptive_coefficients(const Matrix& x, const Vector& y,
                             const std::vector<ColumnStats>& stats) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n <= p) {
    throw NumericalError("adaptive scaling needs more rows than features (" +
                         std::to_string(n) + " rows, " + std::to_string(p) +
                         " features)");
  }
  const Matrix xc = center_columns(x, stats);
  const LeastSquaresResult ls = solve_least_squares(xc, y);
  if (ls.rank < p) {
    throw NumericalError(
        "adaptive scaling needs a full-rank design (rank " +
        std::to_string(ls.rank) + " of " + std::to_string(p) + ")");
  }
  return ls.beta;
}

}  // namespace

Matrix FittedScaler::transform(const Matrix& x) const {
  detail::require(x.cols() == n_features(),
                  "transform: column count does not match the fitted scaler");
  Matrix out(x.rows(), x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const double m = mu[j];
    const double a = alpha[j];
    auto src = x.col(j);
    auto dst = out.col(j);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = a * (src[i] - m);
  }
  return out;
}

KvRecord FittedScaler::to_record() const {
  KvRecord r;
  r.set("record", "scaler");
  r.set("method", scaler_name(method));
  if (uses_gamma(method)) r.set_double("gamma", gamma);
  r.set_u64("n_features", n_features());
  r.set_doubles("mu", mu);
  r.set_doubles("alpha", alpha);
  return r;
}

FittedScaler FittedScaler::from_record(const KvRecord& record) {
  FittedScaler f;
  const auto m = parse_scaler_name(record.get("method"));
  if (!m) throw DataError("unknown scaler method \"" + record.get("method") + "\"");
  f.method = *m;
  if (record.has("gamma")) f.gamma = record.get_double("gamma");
  f.mu = record.get_doubles("mu");
  f.alpha = record.get_doubles("alpha");
  if (f.mu.size() != f.alpha.size() ||
      f.mu.size() != record.get_u64("n_features")) {
    throw DataError("scaler record is inconsistent");
  }
  for (std::size_t j = 0; j < f.alpha.size(); ++j) {
    if (f.alpha[j] == 0.0) f.zeroed_features.push_back(j);
  }
  return f;
}

FittedScaler fit_scaler(const ScalerSpec& spec, const Matrix& x_train,
                        const Vector* y_train,
                        const std::vector<FeatureKind>* kinds) {
  const std::size_t n = x_train.rows();
  const std::size_t p = x_train.cols();
  detail::require(n > 0 && p > 0, "fit_scaler needs a nonempty matrix");
  if (uses_gamma(spec.method)) {
    detail::require(spec.gamma >= 0.0 && spec.gamma <= 1.0,
                    "gamma must lie in [0, 1]");
  }
  if (needs_target(spec.method)) {
    detail::require(y_train != nullptr,
                    "this scaling method needs training targets");
    detail::require(y_train->size() == n, "y_train length mismatch");
  }
  if (kinds) {
    detail::require(kinds->size() == p, "kinds length mismatch");
  }

  const std::vector<ColumnStats> stats = column_stats(x_train);

  FittedScaler f;
  f.method = spec.method;
  f.gamma = spec.gamma;
  f.mu.assign(p, 0.0);
  f.alpha.assign(p, 1.0);

  auto zero_constant = [&](std::size_t j) {
    f.alpha[j] = 0.0;
    f.warnings.push_back("column " + std::to_string(j) +
                         " is constant; feature scaled to zero");
  };

  switch (spec.method) {
    case ScalerMethod::None:
      break;
    case ScalerMethod::Standardization:
      for (std::size_t j = 0; j < p; ++j) {
        f.mu[j] = stats[j].mean;
        if (stats[j].sd == 0.0) zero_constant(j);
        else f.alpha[j] = 1.0 / stats[j].sd;
      }
      break;
    case ScalerMethod::Range:
      for (std::size_t j = 0; j < p; ++j) {
        f.mu[j] = stats[j].min;
        const double span = stats[j].max - stats[j].min;
        if (span == 0.0) zero_constant(j);
        else f.alpha[j] = 1.0 / span;
      }
      break;
    case ScalerMethod::Pareto:
      for (std::size_t j = 0; j < p; ++j) {
        f.mu[j] = stats[j].mean;
        if (stats[j].sd == 0.0) zero_constant(j);
        else f.alpha[j] = 1.0 / std::sqrt(stats[j].sd);
      }
      break;
    case ScalerMethod::Gelman2SD:
      for (std::size_t j = 0; j < p; ++j) {
        const bool binary = kinds ? (*kinds)[j] == FeatureKind::Binary
                                  : stats[j].distinct_count <= 2;
        if (binary) continue;  // left untouched: mu 0, alpha 1
        f.mu[j] = stats[j].mean;
        if (stats[j].sd == 0.0) zero_constant(j);
        else f.alpha[j] = 1.0 / (2.0 * stats[j].sd);
      }
      break;
    case ScalerMethod::Vast:
      for (std::size_t j = 0; j < p; ++j) {
        f.mu[j] = stats[j].mean;
        if (stats[j].sd == 0.0) zero_constant(j);
        else f.alpha[j] = stats[j].mean / (stats[j].sd * stats[j].sd);
      }
      break;
    case ScalerMethod::Level:
      for (std::size_t j = 0; j < p; ++j) {
        if (std::abs(stats[j].mean) <= kLevelMeanFloor) {
          throw NumericalError("unstable level scaling: column " +
                               std::to_string(j) +
                               " has mean within 1e-12 of zero");
        }
        f.mu[j] = stats[j].mean;
        f.alpha[j] = 1.0 / stats[j].mean;
      }
      break;
    case ScalerMethod::Adaptive: {
      const Vector beta = adaptive_coefficients(x_train, *y_train, stats);
      for (std::size_t j = 0; j < p; ++j) {
        f.mu[j] = stats[j].mean;
        f.alpha[j] = beta[j];  // sign kept
      }
      break;
    }
    case ScalerMethod::GeneralizedAdaptive: {
      const Vector beta = adaptive_coefficients(x_train, *y_train, stats);
      for (std::size_t j = 0; j < p; ++j) {
        f.mu[j] = stats[j].mean;
        f.alpha[j] = std::pow(std::abs(beta[j]), spec.gamma);
      }
      break;
    }
    case ScalerMethod::AdaptiveHeuristic: {
      for (std::size_t j = 0; j < p; ++j) {
        f.mu[j] = stats[j].mean;
        if (stats[j].sd == 0.0) {
          zero_constant(j);
          continue;
        }
        // Univariate slope of y on the centered column.
        auto c = x_train.col(j);
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = c[i] - stats[j].mean;
          sxx += d * d;
          sxy += d * (*y_train)[i];
        }
        f.alpha[j] = std::pow(std::abs(sxy / sxx), spec.gamma);
      }
      break;
    }
  }

  for (std::size_t j = 0; j < p; ++j) {
    if (f.alpha[j] == 0.0) f.zeroed_features.push_back(j);
  }
  return f;
}

std::string scaler_label(ScalerMethod method) {
  switch (method) {
    case ScalerMethod::None: return "No";
    case ScalerMethod::Standardization: return "Stand";
    case ScalerMethod::Range: return "RS";
    case ScalerMethod::Pareto: return "PS";
    case ScalerMethod::Gelman2SD: return "Gelman";
    case ScalerMethod::Vast: return "VS";
    case ScalerMethod::Level: return "LS";
    case ScalerMethod::Adaptive: return "AS";
    case ScalerMethod::GeneralizedAdaptive: return "GAS";
    case ScalerMethod::AdaptiveHeuristic: return "ASHD";
  }
  return "?";
}

std::string scaler_name(ScalerMethod method) {
  switch (method) {
    case ScalerMethod::None: return "none";
    case ScalerMethod::Standardization: return "standardization";
    case ScalerMethod::Range: return "range";
    case ScalerMethod::Pareto: return "pareto";
    case ScalerMethod::Gelman2SD: return "gelman";
    case ScalerMethod::Vast: return "vast";
    case ScalerMethod::Level: return "level";
    case ScalerMethod::Adaptive: return "adaptive";
    case ScalerMethod::GeneralizedAdaptive: return "gas";
    case ScalerMethod::AdaptiveHeuristic: return "ash";
  }
  return "?";
}

std::optional<ScalerMethod> parse_scaler_name(const std::string& name) {
  if (name == "none" || name == "no") return ScalerMethod::None;
  if (name == "standardization" || name == "stand")
    return ScalerMethod::Standardization;
  if (name == "range" || name == "rs") return ScalerMethod::Range;
  if (name == "pareto" || name == "ps") return ScalerMethod::Pareto;
  if (name == "gelman") return ScalerMethod::Gelman2SD;
  if (name == "vast" || name == "vs") return ScalerMethod::Vast;
  if (name == "level" || name == "ls") return ScalerMethod::Level;
  if (name == "adaptive" || name == "as") return ScalerMethod::Adaptive;
  if (name == "gas") return ScalerMethod::GeneralizedAdaptive;
  if (name == "ash" || name == "ashd") return ScalerMethod::AdaptiveHeuristic;
  return std::nullopt;
}

GammaCvResult select_gamma_cv(const Matrix& x, const Vector& y,
                              const Vector& grid, std::size_t folds,
                              ScalerMethod method, const FoldScorer& downstream,
                              RngStream& rng) {
  detail::require(!grid.empty(), "select_gamma_cv needs a nonempty grid");
  for (double g : grid)
    detail::require(g >= 0.0 && g <= 1.0, "gamma grid values must lie in [0, 1]");
  detail::require(uses_gamma(method),
                  "select_gamma_cv applies to gamma-bearing scalers only");
  detail::require(y.size() == x.rows(), "select_gamma_cv y length mismatch");
  detail::require(downstream != nullptr, "select_gamma_cv needs a scorer");

  RngStream fold_rng = rng.substream(0);
  const auto fold_sets = kfold_indices(x.rows(), folds, fold_rng);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();

  GammaCvResult out;
  out.mean_scores.assign(grid.size(), 0.0);

  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    double total = 0.0;
    for (std::size_t fi = 0; fi < fold_sets.size(); ++fi) {
      const auto& val_rows = fold_sets[fi];
      std::vector<char> in_val(n, 0);
      for (auto r : val_rows) in_val[r] = 1;

      Matrix xtr(n - val_rows.size(), p), xva(val_rows.size(), p);
      Vector ytr, yva;
      ytr.reserve(n - val_rows.size());
      yva.reserve(val_rows.size());
      std::size_t it = 0, iv = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (in_val[i]) {
          for (std::size_t j = 0; j < p; ++j) xva(iv, j) = x(i, j);
          yva.push_back(y[i]);
          ++iv;
        } else {
          for (std::size_t j = 0; j < p; ++j) xtr(it, j) = x(i, j);
          ytr.push_back(y[i]);
          ++it;
        }
      }

      ScalerSpec spec;
      spec.method = method;
      spec.gamma = grid[gi];
      const FittedScaler scaler = fit_scaler(spec, xtr, &ytr);
      // The scorer's stream depends on the fold only, so every gamma
      // candidate sees identical model randomness.
      RngStream scorer_rng = rng.substream(1 + fi);
      total += downstream(scaler.transform(xtr), ytr, scaler.transform(xva),
                          yva, scorer_rng);
    }
    out.mean_scores[gi] = total / static_cast<double>(fold_sets.size());
  }

  std::size_t best = 0;
  for (std::size_t gi = 1; gi < grid.size(); ++gi) {
    const bool better = out.mean_scores[gi] < out.mean_scores[best];
    const bool tie_smaller = out.mean_scores[gi] == out.mean_scores[best] &&
                             grid[gi] < grid[best];
    if (better || tie_smaller) best = gi;
  }
  out.gamma_star = grid[best];
  return out;
}

}  // namespace ascale
