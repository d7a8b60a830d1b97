#include "chaoslab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace chaoslab {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline std::array<uint32_t, 4> philox_round(const std::array<uint32_t, 4>& x,
                                            const std::array<uint32_t, 2>& k) {
  const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * x[0];
  const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * x[2];
  const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
  const uint32_t lo0 = static_cast<uint32_t>(p0);
  const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
  const uint32_t lo1 = static_cast<uint32_t>(p1);
  return {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> counter,
                                   std::array<uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    counter = philox_round(counter, key);
  }
  return counter;
}

// (cell, tag) are folded into the key through injective odd-multiplier
// hashes, so within one seed every (trial, cell, tag) stream owns a disjoint
// set of (key, counter) blocks: the counter is (trial, draw index).
CounterRng::CounterRng(uint64_t seed, uint64_t trial, uint32_t cell, uint32_t tag)
    : key_{static_cast<uint32_t>(seed) ^ (cell * 0x9E3779B9u),
           static_cast<uint32_t>(seed >> 32) ^ (tag * 0xBB67AE85u + 0x6A09E667u)},
      base_{static_cast<uint32_t>(trial), static_cast<uint32_t>(trial >> 32), 0, 0} {}

uint64_t CounterRng::next_bits() {
  if (has_buffer_) {
    has_buffer_ = false;
    return buffer_;
  }
  std::array<uint32_t, 4> ctr = base_;
  ctr[2] = draw_;
  ++draw_;
  const std::array<uint32_t, 4> out = philox4x32(ctr, key_);
  buffer_ = (static_cast<uint64_t>(out[2]) << 32) | out[3];
  has_buffer_ = true;
  return (static_cast<uint64_t>(out[0]) << 32) | out[1];
}

double CounterRng::next_u01() {
  // (bits >> 11) + 0.5 maps to (0, 2^53), so the result is strictly in (0,1).
  return (static_cast<double>(next_bits() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_normal() {
  const double u1 = next_u01();
  const double u2 = next_u01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

long CounterRng::next_poisson(double mu) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw std::invalid_argument("poisson: bad mean");
  if (mu == 0.0) return 0;
  if (mu <= 30.0) {
    // Inversion by sequential search; one uniform per draw.
    const double u = next_u01();
    double p = std::exp(-mu);
    double cum = p;
    long k = 0;
    while (u > cum && k < 4000) {
      ++k;
      p *= mu / static_cast<double>(k);
      cum += p;
    }
    return k;
  }
  // Hormann's transformed rejection with squeeze (PTRS); two uniforms per
  // proposal, valid for mu >= 10.
  const double slam = std::sqrt(mu);
  const double loglam = std::log(mu);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = next_u01() - 0.5;
    const double v = next_u01();
    const double us = 0.5 - std::fabs(u);
    const long k = static_cast<long>(std::floor((2.0 * a / us + b) * u + mu + 0.43));
    if (us >= 0.07 && v <= vr) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mu + static_cast<double>(k) * loglam - std::lgamma(static_cast<double>(k) + 1.0)) {
      return k;
    }
  }
}

}  // namespace chaoslab
