#include "ascale/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ascale/errors.hpp"

namespace ascale {

double rpe(const Vector& y_true, const Vector& y_pred, double noise_sd) {
  detail::require(y_true.size() == y_pred.size(),
                  "prediction length must match truth");
  detail::require(!y_true.empty(), "need at least one prediction");
  detail::require(noise_sd > 0.0, "noise sd must be positive");
  Vector sq(y_true.size());
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double e = y_true[i] - y_pred[i];
    sq[i] = e * e;
  }
  const double mse = pairwise_sum(sq) / static_cast<double>(sq.size());
  return mse / (noise_sd * noise_sd);
}

SelectionRates selection_rates(
    const std::vector<std::vector<std::size_t>>& selected,
    const std::vector<std::size_t>& truth, std::size_t p) {
  detail::require(!selected.empty(), "need at least one repetition");
  std::set<std::size_t> truth_set(truth.begin(), truth.end());
  detail::require(truth_set.size() == truth.size(),
                  "truth indices must be distinct");
  for (std::size_t j : truth)
    detail::require(j < p, "truth index out of range");

  const std::size_t n_null = p - truth_set.size();
  std::size_t fake_hits = 0;
  std::size_t lost_hits = 0;
  for (const auto& rep : selected) {
    std::set<std::size_t> sel(rep.begin(), rep.end());
    for (std::size_t j : sel) {
      detail::require(j < p, "selected index out of range");
      if (!truth_set.count(j)) ++fake_hits;
    }
    for (std::size_t j : truth_set)
      if (!sel.count(j)) ++lost_hits;
  }

  const auto reps = static_cast<double>(selected.size());
  SelectionRates out;
  if (n_null > 0)
    out.fake = static_cast<double>(fake_hits) /
               (static_cast<double>(n_null) * reps);
  if (!truth_set.empty())
    out.lost = static_cast<double>(lost_hits) /
               (static_cast<double>(truth_set.size()) * reps);
  return out;
}

AccuracyStats accuracy_stats(const std::vector<double>& values) {
  detail::require(!values.empty(), "need at least one value");
  for (double v : values)
    detail::require(v >= 0.0 && v <= 1.0, "accuracy must lie in [0, 1]");

  AccuracyStats out;
  out.mean = pairwise_sum(values) / static_cast<double>(values.size());
  if (values.size() > 1) {
    Vector sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - out.mean;
      sq[i] = d * d;
    }
    out.sd = std::sqrt(pairwise_sum(sq) /
                       static_cast<double>(values.size() - 1));
  }
  return out;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace ascale
