#include "ascale/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "ascale/errors.hpp"
#include "ascale/linalg.hpp"

namespace ascale {
namespace {

std::vector<int> sorted_classes(const std::vector<int>& y) {
  std::vector<int> classes = y;
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

std::size_t class_index(const std::vector<int>& classes, int label) {
  auto it = std::lower_bound(classes.begin(), classes.end(), label);
  return static_cast<std::size_t>(it - classes.begin());
}

void check_xy(const Matrix& x, const std::vector<int>& y) {
  detail::require(x.rows() == y.size(), "x row count must match label count");
  detail::require(x.rows() >= 1, "need at least one training row");
  detail::require(x.cols() >= 1, "need at least one feature");
}

// Row-major copy so per-row distance loops walk contiguous memory.
std::vector<double> row_major(const Matrix& x) {
  std::vector<double> out(x.rows() * x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    auto col = x.col(j);
    for (std::size_t i = 0; i < x.rows(); ++i) out[i * x.cols() + j] = col[i];
  }
  return out;
}

double sq_dist(const double* a, const double* b, std::size_t p) {
  double s = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

int majority_label(const std::vector<int>& classes,
                   const std::vector<std::size_t>& counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < classes.size(); ++c)
    if (counts[c] > counts[best]) best = c;
  return classes[best];
}

double log1pexp(double m) {
  if (m > 0.0) return m + std::log1p(std::exp(-m));
  return std::log1p(std::exp(m));
}

double sigmoid(double m) {
  if (m >= 0.0) return 1.0 / (1.0 + std::exp(-m));
  const double e = std::exp(m);
  return e / (1.0 + e);
}

Vector margins(const Matrix& x, const Vector& w, double b) {
  Vector m(x.rows(), b);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    auto col = x.col(j);
    const double wj = w[j];
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += wj * col[i];
  }
  return m;
}

void solve_cholesky_inplace(const Matrix& l, Vector& v) {
  const std::size_t p = l.rows();
  for (std::size_t i = 0; i < p; ++i) {
    double s = v[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * v[k];
    v[i] = s / l(i, i);
  }
  for (std::size_t ii = p; ii-- > 0;) {
    double s = v[ii];
    for (std::size_t k = ii + 1; k < p; ++k) s -= l(k, ii) * v[k];
    v[ii] = s / l(ii, ii);
  }
}

std::vector<int> classify_knn(const ClassifierModel& m, const Matrix& x) {
  const std::size_t p = x.cols();
  const std::size_t n_tr = m.train_x.rows();
  const std::size_t k = std::min(m.k, n_tr);
  const auto train = row_major(m.train_x);
  const auto query = row_major(x);

  std::vector<int> out(x.rows());
  std::vector<std::pair<double, std::size_t>> best(k);
  std::vector<std::size_t> counts(m.classes.size());
  for (std::size_t q = 0; q < x.rows(); ++q) {
    std::size_t filled = 0;
    const double* qp = query.data() + q * p;
    for (std::size_t i = 0; i < n_tr; ++i) {
      const std::pair<double, std::size_t> cand{
          sq_dist(qp, train.data() + i * p, p), i};
      if (filled < k) {
        best[filled++] = cand;
        std::push_heap(best.begin(), best.begin() + filled);
      } else if (cand < best.front()) {
        std::pop_heap(best.begin(), best.end());
        best.back() = cand;
        std::push_heap(best.begin(), best.end());
      }
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < filled; ++i)
      ++counts[class_index(m.classes, m.train_labels[best[i].second])];
    out[q] = majority_label(m.classes, counts);
  }
  return out;
}

std::vector<int> classify_kmeans(const ClassifierModel& m, const Matrix& x) {
  const std::size_t p = x.cols();
  const auto cent = row_major(m.centroids);
  const auto query = row_major(x);
  std::vector<int> out(x.rows());
  for (std::size_t q = 0; q < x.rows(); ++q) {
    const double* qp = query.data() + q * p;
    std::size_t best = 0;
    double best_d = sq_dist(qp, cent.data(), p);
    for (std::size_t c = 1; c < m.centroids.rows(); ++c) {
      const double d = sq_dist(qp, cent.data() + c * p, p);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    out[q] = m.cluster_label[best];
  }
  return out;
}

std::vector<int> classify_gnb(const ClassifierModel& m, const Matrix& x) {
  constexpr double kLog2Pi = 1.8378770664093453;
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
      double score = m.log_prior[c];
      for (std::size_t j = 0; j < x.cols(); ++j) {
        const double var = m.class_var(c, j);
        const double d = x(i, j) - m.class_mean(c, j);
        score -= 0.5 * (kLog2Pi + std::log(var) + d * d / var);
      }
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    out[i] = m.classes[best];
  }
  return out;
}

std::vector<int> classify_logistic(const ClassifierModel& m, const Matrix& x) {
  const Vector mg = margins(x, m.weights, m.bias);
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = mg[i] > 0.0 ? 1 : 0;
  return out;
}

std::vector<int> classify_lda(const ClassifierModel& m, const Matrix& x) {
  std::vector<int> out(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
      double score = m.lda_const[c];
      for (std::size_t j = 0; j < x.cols(); ++j)
        score += m.lda_coef(c, j) * x(i, j);
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    out[i] = m.classes[best];
  }
  return out;
}

}  // namespace

ClassifierModel fit_knn(const Matrix& x, const std::vector<int>& y,
                        std::size_t k) {
  check_xy(x, y);
  detail::require(k >= 1, "knn needs k >= 1");
  detail::require(k <= x.rows(), "knn needs k <= number of training rows");
  ClassifierModel m;
  m.kind = ClassifierKind::Knn;
  m.classes = sorted_classes(y);
  m.k = k;
  m.train_x = x;
  m.train_labels = y;
  return m;
}

ClassifierModel fit_kmeans_classifier(const Matrix& x,
                                      const std::vector<int>& y,
                                      RngStream& rng, std::size_t k,
                                      std::size_t max_iter) {
  check_xy(x, y);
  ClassifierModel m;
  m.kind = ClassifierKind::KMeans;
  m.classes = sorted_classes(y);
  if (k == 0) k = m.classes.size();
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  detail::require(k <= n, "kmeans needs at least one row per cluster");

  const auto rows = row_major(x);
  std::vector<double> cent(k * p);
  auto copy_row = [&](std::size_t c, std::size_t i) {
    std::copy(rows.data() + i * p, rows.data() + (i + 1) * p,
              cent.data() + c * p);
  };

  // kmeans++ seeding: first centroid uniform, the rest proportional to
  // squared distance from the nearest centroid chosen so far.
  std::vector<double> best_d2(n, std::numeric_limits<double>::infinity());
  copy_row(0, rng.next_below(n));
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = sq_dist(rows.data() + i * p,
                               cent.data() + (c - 1) * p, p);
      best_d2[i] = std::min(best_d2[i], d);
      total += best_d2[i];
    }
    std::size_t pick = n - 1;
    if (total > 0.0) {
      const double u = rng.next_double() * total;
      double cum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        cum += best_d2[i];
        if (cum > u) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.next_below(n);
    }
    copy_row(c, pick);
  }

  std::vector<std::size_t> assign(n);
  auto assign_all = [&]() {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double* xp = rows.data() + i * p;
      std::size_t best = 0;
      double bd = sq_dist(xp, cent.data(), p);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = sq_dist(xp, cent.data() + c * p, p);
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      best_d2[i] = bd;
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    return changed;
  };

  std::fill(assign.begin(), assign.end(), k);  // force first pass to count
  assign_all();
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    std::vector<std::size_t> count(k, 0);
    std::fill(cent.begin(), cent.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      ++count[assign[i]];
      const double* xp = rows.data() + i * p;
      double* cp = cent.data() + assign[i] * p;
      for (std::size_t j = 0; j < p; ++j) cp[j] += xp[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] == 0) continue;
      double* cp = cent.data() + c * p;
      for (std::size_t j = 0; j < p; ++j)
        cp[j] /= static_cast<double>(count[c]);
    }
    // An empty cluster takes over the point farthest from its centroid.
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] != 0) continue;
      std::size_t far = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (best_d2[i] > best_d2[far]) far = i;
      copy_row(c, far);
      assign[far] = c;
      best_d2[far] = 0.0;
      count[c] = 1;
    }
    if (!assign_all()) break;
  }

  m.centroids = Matrix(k, p);
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < p; ++j) m.centroids(c, j) = cent[c * p + j];

  m.cluster_label.resize(k);
  std::vector<std::vector<std::size_t>> votes(
      k, std::vector<std::size_t>(m.classes.size(), 0));
  for (std::size_t i = 0; i < n; ++i)
    ++votes[assign[i]][class_index(m.classes, y[i])];
  for (std::size_t c = 0; c < k; ++c)
    m.cluster_label[c] = majority_label(m.classes, votes[c]);
  return m;
}

ClassifierModel fit_gaussian_nb(const Matrix& x, const std::vector<int>& y) {
  check_xy(x, y);
  ClassifierModel m;
  m.kind = ClassifierKind::GaussianNb;
  m.classes = sorted_classes(y);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const std::size_t nc = m.classes.size();

  std::vector<std::size_t> count(nc, 0);
  for (int label : y) ++count[class_index(m.classes, label)];
  for (std::size_t c = 0; c < nc; ++c)
    detail::require(count[c] >= 2,
                    "gaussian nb needs at least two rows per class");

  m.class_mean = Matrix(nc, p);
  m.class_var = Matrix(nc, p);
  m.log_prior.resize(nc);
  for (std::size_t c = 0; c < nc; ++c)
    m.log_prior[c] = std::log(static_cast<double>(count[c]) /
                              static_cast<double>(n));

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = class_index(m.classes, y[i]);
    for (std::size_t j = 0; j < p; ++j) m.class_mean(c, j) += x(i, j);
  }
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t j = 0; j < p; ++j)
      m.class_mean(c, j) /= static_cast<double>(count[c]);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = class_index(m.classes, y[i]);
    for (std::size_t j = 0; j < p; ++j) {
      const double d = x(i, j) - m.class_mean(c, j);
      m.class_var(c, j) += d * d;
    }
  }
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t j = 0; j < p; ++j)
      m.class_var(c, j) /= static_cast<double>(count[c] - 1);

  const auto stats = column_stats(x);
  for (std::size_t j = 0; j < p; ++j) {
    const double floor = 1e-9 * (stats[j].sd * stats[j].sd + 1e-12);
    for (std::size_t c = 0; c < nc; ++c)
      m.class_var(c, j) = std::max(m.class_var(c, j), floor);
  }
  return m;
}

ClassifierModel fit_logistic_gd(const Matrix& x, const std::vector<int>& y,
                                const LogisticOptions& options) {
  check_xy(x, y);
  for (int label : y)
    detail::require(label == 0 || label == 1,
                    "logistic regression labels must be 0 or 1");
  detail::require(options.learning_rate > 0.0,
                  "learning rate must be positive");
  detail::require(options.tol > 0.0, "tolerance must be positive");

  ClassifierModel m;
  m.kind = ClassifierKind::Logistic;
  m.classes = sorted_classes(y);
  m.weights.assign(x.cols(), 0.0);
  m.bias = 0.0;

  double prev_loss = std::numeric_limits<double>::infinity();
  std::size_t rising = 0;
  for (std::size_t epoch = 0; epoch < options.max_epochs; ++epoch) {
    const double loss = logistic_loss(x, y, m.weights, m.bias);
    if (loss > prev_loss) {
      if (++rising >= 10)
        throw TrainingError(
            "logistic gradient descent is diverging; use a smaller "
            "learning rate");
    } else {
      rising = 0;
    }
    prev_loss = loss;

    const Vector g = logistic_gradient(x, y, m.weights, m.bias);
    double gmax = 0.0;
    for (double v : g) gmax = std::max(gmax, std::abs(v));
    if (gmax < options.tol) break;

    for (std::size_t j = 0; j < x.cols(); ++j)
      m.weights[j] -= options.learning_rate * g[j];
    m.bias -= options.learning_rate * g.back();
    m.epochs_used = epoch + 1;
  }
  return m;
}

ClassifierModel fit_lda(const Matrix& x, const std::vector<int>& y) {
  check_xy(x, y);
  ClassifierModel m;
  m.kind = ClassifierKind::Lda;
  m.classes = sorted_classes(y);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const std::size_t nc = m.classes.size();
  detail::require(n > nc, "lda needs more rows than classes");

  std::vector<std::size_t> count(nc, 0);
  for (int label : y) ++count[class_index(m.classes, label)];

  Matrix mean(nc, p);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = class_index(m.classes, y[i]);
    for (std::size_t j = 0; j < p; ++j) mean(c, j) += x(i, j);
  }
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t j = 0; j < p; ++j)
      mean(c, j) /= static_cast<double>(count[c]);

  Matrix sigma(p, p);
  Vector dev(p);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = class_index(m.classes, y[i]);
    for (std::size_t j = 0; j < p; ++j) dev[j] = x(i, j) - mean(c, j);
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = a; b < p; ++b) sigma(a, b) += dev[a] * dev[b];
  }
  const double div = static_cast<double>(n - nc);
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a; b < p; ++b) {
      sigma(a, b) /= div;
      sigma(b, a) = sigma(a, b);
    }

  double trace = 0.0;
  for (std::size_t j = 0; j < p; ++j) trace += sigma(j, j);
  const double jitter = 1e-8 * trace / static_cast<double>(p);
  for (std::size_t j = 0; j < p; ++j) sigma(j, j) += jitter;

  const Matrix l = cholesky_factor(sigma);

  m.lda_coef = Matrix(nc, p);
  m.lda_const.resize(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    Vector a(p);
    for (std::size_t j = 0; j < p; ++j) a[j] = mean(c, j);
    solve_cholesky_inplace(l, a);
    double quad = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      m.lda_coef(c, j) = a[j];
      quad += mean(c, j) * a[j];
    }
    m.lda_const[c] = -0.5 * quad + std::log(static_cast<double>(count[c]) /
                                            static_cast<double>(n));
  }
  return m;
}

std::vector<int> classify(const ClassifierModel& model, const Matrix& x) {
  detail::require(x.rows() >= 1, "nothing to classify");
  switch (model.kind) {
    case ClassifierKind::Knn:
      detail::require(x.cols() == model.train_x.cols(),
                      "feature count must match the training data");
      return classify_knn(model, x);
    case ClassifierKind::KMeans:
      detail::require(x.cols() == model.centroids.cols(),
                      "feature count must match the training data");
      return classify_kmeans(model, x);
    case ClassifierKind::GaussianNb:
      detail::require(x.cols() == model.class_mean.cols(),
                      "feature count must match the training data");
      return classify_gnb(model, x);
    case ClassifierKind::Logistic:
      detail::require(x.cols() == model.weights.size(),
                      "feature count must match the training data");
      return classify_logistic(model, x);
    case ClassifierKind::Lda:
      detail::require(x.cols() == model.lda_coef.cols(),
                      "feature count must match the training data");
      return classify_lda(model, x);
  }
  throw ArgumentError("unknown classifier kind");
}

double logistic_loss(const Matrix& x, const std::vector<int>& y,
                     const Vector& w, double b) {
  const Vector m = margins(x, w, b);
  double loss = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    loss += log1pexp(m[i]) - static_cast<double>(y[i]) * m[i];
  return loss / static_cast<double>(m.size());
}

Vector logistic_gradient(const Matrix& x, const std::vector<int>& y,
                         const Vector& w, double b) {
  const std::size_t n = x.rows();
  const Vector m = margins(x, w, b);
  Vector resid(n);
  for (std::size_t i = 0; i < n; ++i)
    resid[i] = sigmoid(m[i]) - static_cast<double>(y[i]);

  Vector g(x.cols() + 1, 0.0);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    auto col = x.col(j);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += resid[i] * col[i];
    g[j] = s / static_cast<double>(n);
  }
  double s = 0.0;
  for (double r : resid) s += r;
  g[x.cols()] = s / static_cast<double>(n);
  return g;
}

}  // namespace ascale
