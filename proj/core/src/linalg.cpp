#include "ascale/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ascale/errors.hpp"

namespace ascale {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace {

// Reflector accumulated during the right-sided annihilation step of the
// complete orthogonal factorization.  u has an implicit 1 at position `row`
// and the stored tail at positions r..p-1.
struct RowReflector {
  std::size_t row = 0;
  double tau = 0.0;
  Vector tail;
};

}  // namespace

LeastSquaresResult solve_least_squares(const Matrix& a, const Vector& y) {
  const std::size_t n = a.rows();
  const std::size_t p = a.cols();
  detail::require(n > 0 && p > 0, "solve_least_squares needs a nonempty matrix");
  detail::require(y.size() == n, "solve_least_squares y length mismatch");

  Matrix w = a;           // factored in place
  Vector qty = y;         // Q^T y, built up reflector by reflector
  std::vector<std::size_t> perm(p);
  for (std::size_t j = 0; j < p; ++j) perm[j] = j;
  Vector tau(std::min(n, p), 0.0);

  const std::size_t kmax = std::min(n, p);
  std::size_t steps = 0;
  double r00 = 0.0;

  for (std::size_t k = 0; k < kmax; ++k) {
    // Pivot on the largest remaining column norm, recomputed exactly.
    std::size_t best = k;
    double best_ss = -1.0;
    for (std::size_t j = k; j < p; ++j) {
      double ss = 0.0;
      for (std::size_t i = k; i < n; ++i) ss += w(i, j) * w(i, j);
      if (ss > best_ss) {
        best_ss = ss;
        best = j;
      }
    }
    if (best_ss <= 0.0) break;
    if (best != k) {
      for (std::size_t i = 0; i < n; ++i) std::swap(w(i, k), w(i, best));
      std::swap(perm[k], perm[best]);
    }

    const double normx = std::sqrt(best_ss);
    const double alpha = w(k, k);
    const double beta = alpha >= 0.0 ? -normx : normx;
    const double v0 = alpha - beta;
    if (v0 == 0.0) {
      // Column already reduced to a single entry.
      tau[k] = 0.0;
      ++steps;
      if (k == 0) r00 = std::abs(beta);
      continue;
    }
    for (std::size_t i = k + 1; i < n; ++i) w(i, k) /= v0;
    tau[k] = (beta - alpha) / beta;
    w(k, k) = beta;
    if (k == 0) r00 = std::abs(beta);

    for (std::size_t j = k + 1; j < p; ++j) {
      double s = w(k, j);
      for (std::size_t i = k + 1; i < n; ++i) s += w(i, k) * w(i, j);
      s *= tau[k];
      w(k, j) -= s;
      for (std::size_t i = k + 1; i < n; ++i) w(i, j) -= s * w(i, k);
    }
    double s = qty[k];
    for (std::size_t i = k + 1; i < n; ++i) s += w(i, k) * qty[i];
    s *= tau[k];
    qty[k] -= s;
    for (std::size_t i = k + 1; i < n; ++i) qty[i] -= s * w(i, k);
    ++steps;
  }

  // Numerical rank from the pivoted diagonal of R.
  const double tol =
      r00 * static_cast<double>(std::max(n, p)) * std::numeric_limits<double>::epsilon();
  std::size_t r = 0;
  for (std::size_t k = 0; k < steps; ++k) {
    if (std::abs(w(k, k)) > tol) ++r;
  }

  LeastSquaresResult out;
  out.rank = r;
  out.beta.assign(p, 0.0);
  if (r == 0) return out;

  Vector v(p, 0.0);
  if (r == p) {
    for (std::size_t k = p; k-- > 0;) {
      double s = qty[k];
      for (std::size_t j = k + 1; j < p; ++j) s -= w(k, j) * v[j];
      v[k] = s / w(k, k);
    }
  } else {
    // Annihilate R12 from the right: [R11 R12] -> [T 0] * Z with Z a product
    // of reflectors touching columns {i} U {r..p-1}.
    std::vector<RowReflector> zs;
    zs.reserve(r);
    for (std::size_t i = r; i-- > 0;) {
      RowReflector ref;
      ref.row = i;
      ref.tail.assign(p - r, 0.0);
      double ss = 0.0;
      for (std::size_t q = 0; q < p - r; ++q) {
        ref.tail[q] = w(i, r + q);
        ss += ref.tail[q] * ref.tail[q];
      }
      const double alpha = w(i, i);
      if (ss == 0.0) {
        ref.tau = 0.0;
        zs.push_back(std::move(ref));
        continue;
      }
      const double normx = std::sqrt(alpha * alpha + ss);
      const double beta = alpha >= 0.0 ? -normx : normx;
      const double v0 = alpha - beta;
      for (auto& t : ref.tail) t /= v0;
      ref.tau = (beta - alpha) / beta;
      w(i, i) = beta;
      for (std::size_t q = 0; q < p - r; ++q) w(i, r + q) = 0.0;
      // Apply to the rows above.
      for (std::size_t m = 0; m < i; ++m) {
        double s = w(m, i);
        for (std::size_t q = 0; q < p - r; ++q) s += w(m, r + q) * ref.tail[q];
        s *= ref.tau;
        w(m, i) -= s;
        for (std::size_t q = 0; q < p - r; ++q) w(m, r + q) -= s * ref.tail[q];
      }
      zs.push_back(std::move(ref));
    }

    // Solve T u1 = (Q^T y)[0:r]; the minimum-norm solution keeps u2 = 0.
    for (std::size_t k = r; k-- > 0;) {
      double s = qty[k];
      for (std::size_t j = k + 1; j < r; ++j) s -= w(k, j) * v[j];
      v[k] = s / w(k, k);
    }
    // v = H_{r-1} ... H_1 H_0 u with H_0 acting first; zs was built from
    // i = r-1 down to 0, so walk it backwards.
    for (auto it = zs.rbegin(); it != zs.rend(); ++it) {
      const auto& ref = *it;
      double s = v[ref.row];
      for (std::size_t q = 0; q < p - r; ++q) s += ref.tail[q] * v[r + q];
      s *= ref.tau;
      v[ref.row] -= s;
      for (std::size_t q = 0; q < p - r; ++q) v[r + q] -= s * ref.tail[q];
    }
  }

  for (std::size_t j = 0; j < p; ++j) out.beta[perm[j]] = v[j];
  return out;
}

Matrix cholesky_factor(const Matrix& s) {
  const std::size_t p = s.rows();
  detail::require(p > 0 && s.cols() == p, "cholesky_factor needs a square matrix");
  Matrix l(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d <= 1e-12) {
      throw NumericalError("cholesky pivot " + std::to_string(j) +
                           " is not positive (" + std::to_string(d) + ")");
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < p; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return l;
}

Matrix sample_mvn(const Vector& mu, const Matrix& sigma, std::size_t n,
                  RngStream& rng) {
  const std::size_t p = mu.size();
  detail::require(p > 0, "sample_mvn needs a nonempty mean");
  detail::require(sigma.rows() == p && sigma.cols() == p,
                  "sample_mvn dimension mismatch");
  detail::require(n > 0, "sample_mvn needs n > 0");
  const Matrix l = cholesky_factor(sigma);
  Matrix x(n, p);
  Vector z(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) z[j] = rng.next_normal();
    for (std::size_t j = 0; j < p; ++j) {
      double v = mu[j];
      for (std::size_t k = 0; k <= j; ++k) v += l(j, k) * z[k];
      x(i, j) = v;
    }
  }
  return x;
}

}  // namespace ascale
