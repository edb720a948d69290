#include "ascale/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ascale/errors.hpp"

namespace ascale {

namespace {

void check_finite(const Vector& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw ArgumentError("matrix element " + std::to_string(i) +
                          " is not finite");
    }
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, Vector column_major)
    : rows_(rows), cols_(cols), data_(std::move(column_major)) {
  detail::require(data_.size() == rows * cols,
                  "matrix data size does not match rows * cols");
  check_finite(data_);
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
  if (rows.empty()) return Matrix();
  const std::size_t n = rows.size();
  const std::size_t p = rows.front().size();
  Matrix m(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    detail::require(rows[i].size() == p, "ragged row lengths in from_rows");
    for (std::size_t j = 0; j < p; ++j) m(i, j) = rows[i][j];
  }
  check_finite(m.data_);
  return m;
}

Vector Matrix::row(std::size_t i) const {
  Vector out(cols_);
  for (std::size_t j = 0; j < cols_; ++j) out[j] = (*this)(i, j);
  return out;
}

std::vector<ColumnStats> column_stats(const Matrix& x) {
  detail::require(x.rows() > 0, "column_stats needs at least one row");
  std::vector<ColumnStats> stats(x.cols());
  const double n = static_cast<double>(x.rows());
  Vector scratch;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    auto c = x.col(j);
    ColumnStats s;
    s.min = c[0];
    s.max = c[0];
    double sum = 0.0;
    for (double v : c) {
      sum += v;
      s.min = std::min(s.min, v);
      s.max = std::max(s.max, v);
    }
    if (s.min == s.max) {
      // Constant column: mean is the constant itself and sd is exactly 0,
      // independent of accumulation round-off.
      s.mean = s.min;
      s.sd = 0.0;
    } else {
      s.mean = sum / n;
      double ss = 0.0;
      for (double v : c) {
        const double d = v - s.mean;
        ss += d * d;
      }
      s.sd = std::sqrt(ss / (n - 1.0));
    }
    scratch.assign(c.begin(), c.end());
    std::sort(scratch.begin(), scratch.end());
    s.distinct_count = static_cast<std::size_t>(
        std::unique(scratch.begin(), scratch.end()) - scratch.begin());
    stats[j] = s;
  }
  return stats;
}

}  // namespace ascale
