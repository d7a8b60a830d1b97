#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// random is drawn from the project's own counter-based streams so expected
// values are frozen across platforms and runs.

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "chaoslab/chaos.hpp"
#include "chaoslab/kernels.hpp"
#include "chaoslab/partition.hpp"
#include "chaoslab/rng.hpp"

namespace testsupport {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline chaoslab::PartitionPtr random_partition(int cells, uint64_t seed, uint32_t salt) {
  chaoslab::CounterRng rng(seed, 0, salt, chaoslab::stream_tag::kMeta);
  std::vector<std::pair<double, double>> spec;
  for (int i = 0; i < cells; ++i) {
    const double mass = 0.5 + 1.5 * rng.next_u01();
    const double tau = (i + rng.next_u01()) / cells;  // distinct by construction
    spec.emplace_back(mass, tau);
  }
  return chaoslab::build_partition(spec);
}

inline chaoslab::SymmetricKernel random_kernel2(chaoslab::PartitionPtr partition, uint64_t seed,
                                                uint32_t salt, bool offdiag_only) {
  chaoslab::SymmetricKernel f(partition, 2, offdiag_only);
  chaoslab::CounterRng rng(seed, 1, salt, chaoslab::stream_tag::kMeta);
  const int n = partition->size();
  for (int i = 0; i < n; ++i) {
    for (int j = offdiag_only ? i + 1 : i; j < n; ++j) {
      const std::array<int, 2> ids{i, j};
      f.set(std::span<const int>(ids.data(), 2), 2.0 * rng.next_u01() - 1.0);
    }
  }
  return f;
}

// ---------------------------------------------------------------------------
// Brute-force contraction: a plain sum over all ordered index tuples, kept
// deliberately independent of the library's join-based implementation.
// ---------------------------------------------------------------------------
inline double brute_contract_at(const chaoslab::SymmetricKernel& f,
                                const chaoslab::SymmetricKernel& g, int r, int l,
                                std::span<const int> out_ids) {
  const int p = f.order();
  const int q = g.order();
  const auto& partition = f.partition();
  const int n = partition.size();
  const int kept = r - l;
  std::vector<int> fa(static_cast<size_t>(p));
  std::vector<int> ga(static_cast<size_t>(q));
  // out_ids layout: gamma_1..gamma_{r-l}, t_1..t_{p-r}, s_1..s_{q-r}
  for (int i = 0; i < kept; ++i) {
    fa[static_cast<size_t>(l + i)] = out_ids[i];
    ga[static_cast<size_t>(l + i)] = out_ids[i];
  }
  for (int i = 0; i < p - r; ++i) fa[static_cast<size_t>(r + i)] = out_ids[kept + i];
  for (int i = 0; i < q - r; ++i) ga[static_cast<size_t>(r + i)] = out_ids[kept + p - r + i];

  // Sum the l identified coordinates over all cells.
  std::vector<int> z(static_cast<size_t>(l), 0);
  double acc = 0.0;
  for (;;) {
    for (int i = 0; i < l; ++i) {
      fa[static_cast<size_t>(i)] = z[static_cast<size_t>(i)];
      ga[static_cast<size_t>(i)] = z[static_cast<size_t>(i)];
    }
    double w = 1.0;
    for (int i = 0; i < l; ++i) w *= partition.mass(z[static_cast<size_t>(i)]);
    acc += w * f.value(fa) * g.value(ga);
    int pos = l - 1;
    while (pos >= 0 && ++z[static_cast<size_t>(pos)] == n) {
      z[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Polynomial oracle: multiple integrals of block kernels expanded as
// polynomials in the per-cell increments M_0..M_{n-1} (compensated Poisson).
// Checks the product formula's coefficients symbolically, independent of any
// sampling.
// ---------------------------------------------------------------------------
class Poly {
 public:
  using Monomial = std::array<uint8_t, 8>;  // exponents of M_0..M_7

  static Poly constant(double c) {
    Poly p;
    if (c != 0.0) p.terms_[Monomial{}] = c;
    return p;
  }
  static Poly variable(int cell) {
    Poly p;
    Monomial m{};
    m[static_cast<size_t>(cell)] = 1;
    p.terms_[m] = 1.0;
    return p;
  }

  Poly operator+(const Poly& o) const {
    Poly out = *this;
    for (const auto& [m, c] : o.terms_) out.terms_[m] += c;
    return out;
  }
  Poly operator*(const Poly& o) const {
    Poly out;
    for (const auto& [ma, ca] : terms_) {
      for (const auto& [mb, cb] : o.terms_) {
        Monomial m = ma;
        for (size_t i = 0; i < m.size(); ++i) m[i] = static_cast<uint8_t>(m[i] + mb[i]);
        out.terms_[m] += ca * cb;
      }
    }
    return out;
  }
  Poly operator*(double c) const { return *this * constant(c); }
  Poly operator-(const Poly& o) const { return *this + o * (-1.0); }

  double max_abs_coeff() const {
    double m = 0.0;
    for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c));
    return m;
  }

 private:
  std::map<Monomial, double> terms_;
};

// I_d of a symmetric block kernel as a polynomial in the increments, built
// from the factorization over cells with the compensated-Poisson second-order
// atom D_i = M_i^2 - M_i - mu_i.
inline Poly poly_multiple_integral(const chaoslab::SymmetricKernel& f) {
  const auto& partition = f.partition();
  Poly total = Poly::constant(0.0);
  if (f.order() == 0) return Poly::constant(f.scalar_value());
  double fact = 1.0;
  for (int i = 2; i <= f.order(); ++i) fact *= i;
  f.for_each_class([&](std::span<const int> ids, double v) {
    Poly term = Poly::constant(v * fact);
    size_t i = 0;
    while (i < ids.size()) {
      size_t j = i;
      while (j < ids.size() && ids[j] == ids[i]) ++j;
      const int mult = static_cast<int>(j - i);
      const int cell = ids[i];
      const Poly m = Poly::variable(cell);
      if (mult == 1) {
        term = term * m;
      } else if (mult == 2) {
        const Poly atom = m * m - m - Poly::constant(partition.mass(cell));
        term = term * atom * 0.5;  // divide by 2! of the repeated pair
      } else {
        throw std::runtime_error("poly oracle: multiplicity above 2");
      }
      i = j;
    }
    total = total + term;
  });
  return total;
}

}  // namespace testsupport
