#pragma once

#include <cstdint>

namespace ascale {

// Deterministic random stream keyed by a (seed, stream_id) pair.
//
// The generator is PCG32 (O'Neill's pcg32_srandom with initstate = seed and
// initseq = stream_id), so streams are cheap to split and sequences are
// identical across platforms; the published reference outputs for
// (42, 54) are pinned in the tests.  Normal deviates use the polar method on
// 53-bit uniforms rather than std::normal_distribution, whose output is
// implementation-defined.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();  // high word drawn first

  // Uniform on [0, 1) with 53 random bits.
  double next_double();

  // Standard normal via Marsaglia's polar method; pairs are cached.
  double next_normal();

  // Uniform on {0, ..., n-1}, unbiased via rejection.
  std::uint64_t next_below(std::uint64_t n);

  // Child stream derived from (seed, stream_id, tag) only; independent of
  // how much this stream has been consumed.
  RngStream substream(std::uint64_t tag) const;

private:
  std::uint64_t state_;
  std::uint64_t inc_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ascale
