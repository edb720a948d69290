#include "ascale/rng.hpp"

#include <cmath>

#include "ascale/errors.hpp"

namespace ascale {

namespace {

constexpr std::uint64_t kPcgMultiplier = 6364136223846793005ULL;

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : state_(0), inc_((stream_id << 1u) | 1u), seed_(seed), stream_id_(stream_id) {
  state_ = state_ * kPcgMultiplier + inc_;
  state_ += seed;
  state_ = state_ * kPcgMultiplier + inc_;
}

std::uint32_t RngStream::next_u32() {
  const std::uint64_t old = state_;
  state_ = old * kPcgMultiplier + inc_;
  const std::uint32_t xorshifted =
      static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  const std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_double() - 1.0;
    v = 2.0 * next_double() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

std::uint64_t RngStream::next_below(std::uint64_t n) {
  detail::require(n > 0, "next_below needs n > 0");
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return r % n;
  }
}

RngStream RngStream::substream(std::uint64_t tag) const {
  const std::uint64_t child =
      splitmix_finalize(stream_id_ * 0x9E3779B97F4A7C15ULL + tag + 1u);
  return RngStream(seed_, child);
}

}  // namespace ascale
