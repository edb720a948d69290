#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ascale/kv.hpp"
#include "ascale/matrix.hpp"
#include "ascale/rng.hpp"

namespace ascale {

enum class ScalerMethod {
  None,
  Standardization,
  Range,
  Pareto,
  Gelman2SD,
  Vast,
  Level,
  Adaptive,
  GeneralizedAdaptive,
  AdaptiveHeuristic,
};

enum class FeatureKind { Numeric, Binary };

struct ScalerSpec {
  ScalerMethod method = ScalerMethod::None;
  // Exponent for GeneralizedAdaptive / AdaptiveHeuristic, in [0, 1].
  double gamma = 1.0;
  // Harness hint: pick gamma by cross-validation instead of using `gamma`.
  bool gamma_by_cv = false;
};

// Fitted per-feature affine map x'_j = alpha_j * (x_j - mu_j).  The target
// is never scaled.  alpha_j == 0 marks a feature zeroed by the fit (constant
// column, or a zero adaptive coefficient).
class FittedScaler {
public:
  ScalerMethod method = ScalerMethod::None;
  double gamma = 1.0;
  Vector mu;
  Vector alpha;
  std::vector<std::size_t> zeroed_features;
  std::vector<std::string> warnings;

  std::size_t n_features() const { return mu.size(); }

  // Applies the stored affine map; never refits.
  Matrix transform(const Matrix& x) const;

  KvRecord to_record() const;
  static FittedScaler from_record(const KvRecord& record);
};

// Fits a scaler on training data.  Adaptive, GeneralizedAdaptive and
// AdaptiveHeuristic need y_train; Gelman2SD leaves binary features (declared
// via `kinds`, or detected as <= 2 distinct training values) untouched.
FittedScaler fit_scaler(const ScalerSpec& spec, const Matrix& x_train,
                        const Vector* y_train = nullptr,
                        const std::vector<FeatureKind>* kinds = nullptr);

// Canonical report label (No, AS, GAS, ASHD, Stand, RS, PS, VS, LS, Gelman).
std::string scaler_label(ScalerMethod method);
// Lowercase parseable name (none, standardization, range, ...).
std::string scaler_name(ScalerMethod method);
std::optional<ScalerMethod> parse_scaler_name(const std::string& name);

// Scores one train/validation pair; lower is better (MSE or error rate).
using FoldScorer =
    std::function<double(const Matrix& x_train, const Vector& y_train,
                         const Matrix& x_val, const Vector& y_val,
                         RngStream& rng)>;

struct GammaCvResult {
  double gamma_star = 0.0;
  Vector mean_scores;  // one per grid entry, grid order
};

// k-fold selection of gamma for a GeneralizedAdaptive / AdaptiveHeuristic
// scaler: per fold, the scaler is fit on the fold-train rows only, both
// partitions are transformed, and `downstream` scores the validation rows.
// Ties go to the smaller gamma.
GammaCvResult select_gamma_cv(const Matrix& x, const Vector& y,
                              const Vector& grid, std::size_t folds,
                              ScalerMethod method, const FoldScorer& downstream,
                              RngStream& rng);

}  // namespace ascale
