#pragma once

#include <array>
#include <cstdint>

namespace chaoslab {

/// Philox 4x32-10 counter-based generator (Salmon et al., SC 2011).
/// Pure function of (counter, key); every 128-bit counter value yields an
/// independent 128-bit block.
std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key);

/// One independent random stream per (seed, trial, cell, tag).
///
/// The key is the seed combined with injective hashes of (cell, tag); the
/// counter holds (trial, draw index). Distinct streams never share counter
/// blocks, so trials, cells, copies and purposes are independent by
/// construction, and any single draw is reproducible in isolation.
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t trial, uint32_t cell, uint32_t tag);

  /// Uniform on (0, 1), strictly inside, with 53-bit resolution.
  double next_u01();

  /// Standard normal via the Box-Muller transform (two uniforms per draw).
  double next_normal();

  /// Poisson(mu). Inversion by sequential search for mu <= 30, transformed
  /// rejection (Hormann's PTRS) for larger mu.
  long next_poisson(double mu);

 private:
  uint64_t next_bits();

  std::array<uint32_t, 2> key_;
  std::array<uint32_t, 4> base_;
  uint32_t draw_ = 0;
  uint64_t buffer_ = 0;
  bool has_buffer_ = false;
};

/// Stream purpose tags. Bits [0,4) hold the purpose, bits [4,32) hold a copy
/// index so that independent copies of a measure reuse the cell layout.
namespace stream_tag {
constexpr uint32_t kGaussianIncrement = 0;
constexpr uint32_t kPoissonIncrement = 1;
constexpr uint32_t kBrownianStep = 2;
constexpr uint32_t kMeta = 3;  // auxiliary draws (test fixtures, kernel generation)

constexpr uint32_t with_copy(uint32_t base, uint32_t copy) { return base + (copy << 4); }
}  // namespace stream_tag

}  // namespace chaoslab
