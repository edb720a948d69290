#include <bit>
#include <cstdint>
#include <vector>

#include "ascale/errors.hpp"
#include "ascale/metrics.hpp"
#include "doctest.h"

using namespace ascale;
using doctest::Approx;

namespace {

const Vector kMixed = {1e6,    1e-3,  -2e-3, 3.5e5,      -1.25e-4, 7e5,
                       0.1,    -0.2,  2.5e-7, -4e5,      0.3,      123456.789,
                       -9.875e-2, 5e4, -6e-5,  11.25};

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("rpe is the mse over the noise variance") {
  const Vector yt = {1.0, 2.0, 3.0, 4.0};
  const Vector yp = {1.5, 1.5, 3.25, 3.5};
  // mse = (0.25 + 0.25 + 0.0625 + 0.25) / 4 = 0.203125
  CHECK(rpe(yt, yp, 2.0) == Approx(0.05078125).epsilon(1e-14));
  CHECK(rpe(yt, yt, 2.0) == 0.0);
}

TEST_CASE("rpe validates its inputs") {
  const Vector a = {1.0, 2.0};
  const Vector b = {1.0};
  CHECK_THROWS_AS(rpe(a, b, 1.0), ArgumentError);
  CHECK_THROWS_AS(rpe(a, a, 0.0), ArgumentError);
}

TEST_CASE("selection rates on a hand counted example") {
  // p = 5, truth {0, 1}; three repetitions.
  const std::vector<std::vector<std::size_t>> sel = {
      {0, 1}, {0, 2}, {3, 4}};
  const SelectionRates r = selection_rates(sel, {0, 1}, 5);
  // Fake hits: rep2 selects 2; rep3 selects 3 and 4 -> 3 of 9 null cells.
  CHECK(r.fake == Approx(3.0 / 9.0).epsilon(1e-14));
  // Lost hits: rep2 misses 1; rep3 misses both -> 3 of 6 truth cells.
  CHECK(r.lost == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("empty denominators give zero rates") {
  const std::vector<std::vector<std::size_t>> sel = {{0, 1}, {}};
  const SelectionRates no_null = selection_rates(sel, {0, 1}, 2);
  CHECK(no_null.fake == 0.0);
  const SelectionRates no_truth = selection_rates(sel, {}, 2);
  CHECK(no_truth.lost == 0.0);
}

TEST_CASE("selection rates validate indices") {
  const std::vector<std::vector<std::size_t>> sel = {{0}};
  CHECK_THROWS_AS(selection_rates(sel, {0, 0}, 3), ArgumentError);
  CHECK_THROWS_AS(selection_rates(sel, {5}, 3), ArgumentError);
  CHECK_THROWS_AS(selection_rates({{7}}, {0}, 3), ArgumentError);
  CHECK_THROWS_AS(selection_rates({}, {0}, 3), ArgumentError);
}

TEST_CASE("accuracy stats use the sample standard deviation") {
  const AccuracyStats s = accuracy_stats({0.5, 0.75, 1.0});
  CHECK(s.mean == Approx(0.75).epsilon(1e-14));
  CHECK(s.sd == Approx(0.25).epsilon(1e-14));
  const AccuracyStats one = accuracy_stats({0.8});
  CHECK(one.mean == 0.8);
  CHECK(one.sd == 0.0);
}

TEST_CASE("accuracy stats validate the unit interval") {
  CHECK_THROWS_AS(accuracy_stats({1.2}), ArgumentError);
  CHECK_THROWS_AS(accuracy_stats({-0.1}), ArgumentError);
  CHECK_THROWS_AS(accuracy_stats({}), ArgumentError);
}

TEST_CASE("pairwise sum matches sequential addition up to eight terms") {
  Vector v(kMixed.begin(), kMixed.begin() + 8);
  double seq = 0.0;
  for (double x : v) seq += x;
  CHECK(pairwise_sum(v) == seq);
}

TEST_CASE("pairwise split is pinned at nine terms") {
  // Nine terms split 4 + 5, which rounds differently from a straight
  // left to right pass on this data; both values are frozen.
  Vector v(kMixed.begin(), kMixed.begin() + 9);
  const double got = pairwise_sum(v);
  CHECK(bits(got) == 0x413f47cfe61cb03aULL);
  double seq = 0.0;
  for (double x : v) seq += x;
  CHECK(got != seq);
}

TEST_CASE("pairwise sum of the full mixed vector is frozen bit for bit") {
  CHECK(bits(pairwise_sum(kMixed)) == 0x413bd2ec2399c7beULL);
}

TEST_CASE("pairwise sum of an empty span is zero") {
  CHECK(pairwise_sum({}) == 0.0);
}

}  // TEST_SUITE
