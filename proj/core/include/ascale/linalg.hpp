#pragma once

#include <cstddef>

#include "ascale/matrix.hpp"
#include "ascale/rng.hpp"

namespace ascale {

class RngStream;

struct LeastSquaresResult {
  Vector beta;
  std::size_t rank = 0;
};

// Minimum-norm least-squares solution of min ||y - A beta||.  Householder QR
// with column pivoting, followed by a complete orthogonal factorization when
// the numerical rank is deficient; the normal equations are never formed.
LeastSquaresResult solve_least_squares(const Matrix& a, const Vector& y);

// Lower-triangular L with L L^T = s.  A pivot at or below 1e-12 throws a
// NumericalError naming the pivot index.
Matrix cholesky_factor(const Matrix& s);

// n rows of N(mu, sigma), drawn row by row (p normals per row, in column
// order) so output is a pure function of the stream position.
Matrix sample_mvn(const Vector& mu, const Matrix& sigma, std::size_t n,
                  RngStream& rng);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace ascale
