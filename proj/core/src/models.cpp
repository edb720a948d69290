#include "ascale/models.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "ascale/errors.hpp"

namespace ascale {
namespace {

PenaltySpec penalty_spec_of(const ModelSpec& spec) {
  PenaltySpec ps;
  switch (spec.kind) {
    case ModelKind::Ols: ps.family = PenaltyFamily::Ols; break;
    case ModelKind::Lasso: ps.family = PenaltyFamily::Lasso; break;
    case ModelKind::AdaptiveLasso: ps.family = PenaltyFamily::AdaptiveLasso; break;
    case ModelKind::Garrote: ps.family = PenaltyFamily::Garrote; break;
    case ModelKind::Scad: ps.family = PenaltyFamily::Scad; break;
    case ModelKind::Mcp: ps.family = PenaltyFamily::Mcp; break;
    default:
      throw ArgumentError("model is not a regression model");
  }
  return ps;
}

double mse(const Vector& y, const Vector& pred) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - pred[i];
    s += e * e;
  }
  return s / static_cast<double>(y.size());
}

ClassifierModel fit_classifier(const Matrix& x, const std::vector<int>& y,
                               const ModelSpec& spec, RngStream& rng) {
  switch (spec.kind) {
    case ModelKind::Knn:
      return fit_knn(x, y, spec.knn_k);
    case ModelKind::KMeans:
      return fit_kmeans_classifier(x, y, rng, spec.kmeans_k);
    case ModelKind::GaussianNb:
      return fit_gaussian_nb(x, y);
    case ModelKind::Logistic:
      return fit_logistic_gd(x, y, spec.logistic);
    case ModelKind::Lda:
      return fit_lda(x, y);
    default:
      throw ArgumentError("model is not a classifier");
  }
}

}  // namespace

bool is_regression(ModelKind kind) {
  switch (kind) {
    case ModelKind::Ols:
    case ModelKind::Lasso:
    case ModelKind::AdaptiveLasso:
    case ModelKind::Garrote:
    case ModelKind::Scad:
    case ModelKind::Mcp:
      return true;
    default:
      return false;
  }
}

std::string model_label(ModelKind kind) {
  switch (kind) {
    case ModelKind::Ols: return "OLS";
    case ModelKind::Lasso: return "Lasso";
    case ModelKind::AdaptiveLasso: return "AdaLasso";
    case ModelKind::Garrote: return "Garrote";
    case ModelKind::Scad: return "SCAD";
    case ModelKind::Mcp: return "MCP";
    case ModelKind::Knn: return "KNN";
    case ModelKind::KMeans: return "KMeans";
    case ModelKind::GaussianNb: return "GNB";
    case ModelKind::Logistic: return "Logistic";
    case ModelKind::Lda: return "LDA";
  }
  return "?";
}

std::optional<ModelKind> parse_model_name(const std::string& name) {
  std::string s;
  for (char c : name)
    s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "ols") return ModelKind::Ols;
  if (s == "lasso") return ModelKind::Lasso;
  if (s == "adalasso" || s == "alasso" || s == "adaptive_lasso")
    return ModelKind::AdaptiveLasso;
  if (s == "garrote" || s == "nng") return ModelKind::Garrote;
  if (s == "scad") return ModelKind::Scad;
  if (s == "mcp") return ModelKind::Mcp;
  if (s == "knn") return ModelKind::Knn;
  if (s == "kmeans") return ModelKind::KMeans;
  if (s == "gnb" || s == "naive_bayes") return ModelKind::GaussianNb;
  if (s == "logistic" || s == "logit") return ModelKind::Logistic;
  if (s == "lda") return ModelKind::Lda;
  return std::nullopt;
}

RegressionEval eval_regression(const Matrix& x_train, const Vector& y_train,
                               const Matrix& x_test, const Vector& y_test,
                               const ModelSpec& spec, RngStream& rng) {
  PenaltySpec ps = penalty_spec_of(spec);
  RegressionEval out;
  LinearFit fit;
  if (ps.family == PenaltyFamily::Ols) {
    fit = fit_ols(x_train, y_train);
  } else {
    auto cv = cv_select_lambda(x_train, y_train, ps, spec.cv_folds, rng);
    ps.lambda = cv.lambda_star;
    fit = fit_penalized(x_train, y_train, ps);
    out.lambda_star = cv.lambda_star;
  }
  out.test_mse = mse(y_test, predict_linear(fit, x_test));
  out.selected = fit.selected_support;
  return out;
}

double eval_classifier_accuracy(const Matrix& x_train, const Vector& y_train,
                                const Matrix& x_test, const Vector& y_test,
                                const ModelSpec& spec, RngStream& rng) {
  const auto ytr = int_labels(y_train);
  const auto yte = int_labels(y_test);
  const ClassifierModel model = fit_classifier(x_train, ytr, spec, rng);
  const auto pred = classify(model, x_test);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < yte.size(); ++i)
    if (pred[i] == yte[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(yte.size());
}

FoldScorer make_fold_scorer(const ModelSpec& spec) {
  if (is_regression(spec.kind)) {
    return [spec](const Matrix& xtr, const Vector& ytr, const Matrix& xval,
                  const Vector& yval, RngStream& rng) {
      auto eval = eval_regression(xtr, ytr, xval, yval, spec, rng);
      return eval.test_mse;
    };
  }
  return [spec](const Matrix& xtr, const Vector& ytr, const Matrix& xval,
                const Vector& yval, RngStream& rng) {
    return 1.0 - eval_classifier_accuracy(xtr, ytr, xval, yval, spec, rng);
  };
}

std::vector<int> int_labels(const Vector& y) {
  std::vector<int> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double v = y[i];
    detail::require(std::isfinite(v) && v == std::floor(v) &&
                        std::abs(v) < 2147483647.0,
                    "labels must be exact integers");
    out[i] = static_cast<int>(v);
  }
  return out;
}

}  // namespace ascale
