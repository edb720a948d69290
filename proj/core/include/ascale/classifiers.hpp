#pragma once

#include <cstddef>
#include <vector>

#include "ascale/matrix.hpp"
#include "ascale/rng.hpp"

namespace ascale {

enum class ClassifierKind {
  Knn,
  KMeans,
  GaussianNb,
  Logistic,
  Lda,
};

struct LogisticOptions {
  double learning_rate = 0.1;
  std::size_t max_epochs = 5000;
  double tol = 1e-6;
};

// One model type for all five classifiers; only the members for the
// fitted kind are populated.
struct ClassifierModel {
  ClassifierKind kind = ClassifierKind::Knn;
  std::vector<int> classes;  // sorted ascending

  // knn
  std::size_t k = 0;
  Matrix train_x;
  std::vector<int> train_labels;

  // kmeans
  Matrix centroids;               // one row per cluster
  std::vector<int> cluster_label;  // majority label per cluster

  // gaussian nb
  Matrix class_mean;  // class x feature
  Matrix class_var;
  Vector log_prior;

  // logistic
  Vector weights;
  double bias = 0.0;
  std::size_t epochs_used = 0;

  // lda
  Matrix lda_coef;     // class x feature, sigma^-1 mu_c
  Vector lda_const;    // -mu_c' sigma^-1 mu_c / 2 + log prior
};

ClassifierModel fit_knn(const Matrix& x, const std::vector<int>& y,
                        std::size_t k = 5);

// K-means fitted on the features, each cluster labelled by majority vote
// of the training labels it captured.  k defaults to the class count.
ClassifierModel fit_kmeans_classifier(const Matrix& x,
                                      const std::vector<int>& y,
                                      RngStream& rng, std::size_t k = 0,
                                      std::size_t max_iter = 300);

ClassifierModel fit_gaussian_nb(const Matrix& x, const std::vector<int>& y);

// Full-batch gradient descent on the mean log loss; labels must be 0/1.
ClassifierModel fit_logistic_gd(const Matrix& x, const std::vector<int>& y,
                                const LogisticOptions& options = {});

ClassifierModel fit_lda(const Matrix& x, const std::vector<int>& y);

std::vector<int> classify(const ClassifierModel& model, const Matrix& x);

// Exposed for gradient checking.
double logistic_loss(const Matrix& x, const std::vector<int>& y,
                     const Vector& w, double b);
// Gradient of the mean log loss; last element is the bias derivative.
Vector logistic_gradient(const Matrix& x, const std::vector<int>& y,
                         const Vector& w, double b);

}  // namespace ascale
