#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ascale/matrix.hpp"

namespace ascale {

// Mean squared prediction error relative to the noise variance.
double rpe(const Vector& y_true, const Vector& y_pred, double noise_sd);

struct SelectionRates {
  double fake = 0.0;  // share of truly-null variables selected
  double lost = 0.0;  // share of truly-active variables missed
};

// Aggregates selection quality over repetitions.  Each entry of
// `selected` is one repetition's selected index set; `truth` is the
// active set; p is the total variable count.
SelectionRates selection_rates(
    const std::vector<std::vector<std::size_t>>& selected,
    const std::vector<std::size_t>& truth, std::size_t p);

struct AccuracyStats {
  double mean = 0.0;
  double sd = 0.0;  // sample sd, n-1 divisor; 0 when n == 1
};

AccuracyStats accuracy_stats(const std::vector<double>& values);

// Fixed-order pairwise summation, so totals do not depend on how the
// inputs were produced.
double pairwise_sum(std::span<const double> values);

}  // namespace ascale
