#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ascale {

using Vector = std::vector<double>;

// Dense column-major matrix of doubles.  Constructors that accept data
// validate finiteness; the zero-initializing constructor has nothing to
// check.  Internal routines mutate entries freely after construction.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  Matrix(std::size_t rows, std::size_t cols, Vector column_major);

  static Matrix from_rows(const std::vector<Vector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[j * rows_ + i]; }
  const double& operator()(std::size_t i, std::size_t j) const { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const { return {data_.data() + j * rows_, rows_}; }

  Vector row(std::size_t i) const;

  const Vector& data() const { return data_; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

struct ColumnStats {
  double mean = 0.0;
  double sd = 0.0;  // sample sd, n-1 divisor; exactly 0 for constant columns
  double min = 0.0;
  double max = 0.0;
  std::size_t distinct_count = 0;
};

// Per-column summaries.  distinct_count counts exact double values.
std::vector<ColumnStats> column_stats(const Matrix& x);

}  // namespace ascale
