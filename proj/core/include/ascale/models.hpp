#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ascale/classifiers.hpp"
#include "ascale/matrix.hpp"
#include "ascale/regression.hpp"
#include "ascale/rng.hpp"
#include "ascale/scaling.hpp"

namespace ascale {

enum class ModelKind {
  Ols,
  Lasso,
  AdaptiveLasso,
  Garrote,
  Scad,
  Mcp,
  Knn,
  KMeans,
  GaussianNb,
  Logistic,
  Lda,
};

bool is_regression(ModelKind kind);

std::string model_label(ModelKind kind);
std::optional<ModelKind> parse_model_name(const std::string& name);

struct ModelSpec {
  ModelKind kind = ModelKind::Lasso;
  std::size_t knn_k = 5;
  std::size_t kmeans_k = 0;  // 0 means one cluster per class
  LogisticOptions logistic;
  std::size_t cv_folds = 5;
};

struct RegressionEval {
  double test_mse = 0.0;
  std::vector<std::size_t> selected;
  double lambda_star = 0.0;
};

// Selects lambda by cross validation on the training rows (unpenalized
// least squares skips that), refits, and scores the test rows.
RegressionEval eval_regression(const Matrix& x_train, const Vector& y_train,
                               const Matrix& x_test, const Vector& y_test,
                               const ModelSpec& spec, RngStream& rng);

// Fits the classifier and returns test accuracy.  Labels are carried as
// doubles and must be exact integers.
double eval_classifier_accuracy(const Matrix& x_train, const Vector& y_train,
                                const Matrix& x_test, const Vector& y_test,
                                const ModelSpec& spec, RngStream& rng);

// Adapter for gamma cross validation: scores a fold with the same model
// the surrounding experiment cell uses.  Lower is better for both model
// groups (validation MSE, or one minus accuracy).
FoldScorer make_fold_scorer(const ModelSpec& spec);

std::vector<int> int_labels(const Vector& y);

}  // namespace ascale
