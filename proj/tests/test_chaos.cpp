#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "chaoslab/chaos.hpp"
#include "chaoslab/harness.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chaoslab;
using testsupport::Poly;
using testsupport::poly_multiple_integral;
using testsupport::random_kernel2;
using testsupport::random_partition;
using testsupport::rel_err;

namespace {

SymmetricKernel pair_kernel(PartitionPtr p, int a, int b, double v) {
  SymmetricKernel f(p, 2);
  const std::array<int, 2> ids{a, b};
  f.set(std::span<const int>(ids.data(), 2), v);
  return f;
}

}  // namespace

TEST_CASE("order-2 evaluation on disjoint and within-cell blocks") {
  auto p = build_partition({{1.0, 0.3}, {2.0, 0.6}});
  const SymmetricKernel f01 = pair_kernel(p, 0, 1, 1.0);
  const SymmetricKernel f00 = pair_kernel(p, 0, 0, 1.0);
  for (MeasureLaw law : {MeasureLaw::gaussian, MeasureLaw::cpoisson}) {
    for (uint64_t t = 0; t < 200; ++t) {
      const MeasureSample s = sample_measure(p, law, 301, t);
      const double m0 = s.increments[0];
      const double m1 = s.increments[1];
      CHECK(eval_multiple_integral(s, f01) == doctest::Approx(2.0 * m0 * m1).epsilon(1e-14));
      const double atom = law == MeasureLaw::cpoisson ? m0 * m0 - m0 - 1.0 : m0 * m0 - 1.0;
      CHECK(eval_multiple_integral(s, f00) == doctest::Approx(atom).epsilon(1e-14));
    }
  }
  SymmetricKernel zero(p, 2);
  const MeasureSample s = sample_measure(p, MeasureLaw::cpoisson, 301, 0);
  CHECK(eval_multiple_integral(s, zero) == 0.0);
  CHECK(eval_multiple_integral(s, SymmetricKernel::constant(p, 2.5)) == 2.5);
}

TEST_CASE("d=1 evaluation equals the first-order integral") {
  auto p = random_partition(5, 302, 1);
  CounterRng rng(302, 0, 9, stream_tag::kMeta);
  Eigen::VectorXd hv(5);
  for (int i = 0; i < 5; ++i) hv[i] = 2.0 * rng.next_u01() - 1.0;
  const SymmetricKernel f = SymmetricKernel::from_vector(p, hv);
  for (uint64_t t = 0; t < 50; ++t) {
    const MeasureSample s = sample_measure(p, MeasureLaw::cpoisson, 302, t);
    CHECK(eval_multiple_integral(s, f) ==
          doctest::Approx(integrate_first_order(s, {p, hv})).epsilon(1e-14));
  }
}

TEST_CASE("orders 3 and 4 on distinct cells: d! times the product") {
  auto p = build_partition({{1.0, 0.2}, {0.5, 0.4}, {2.0, 0.6}, {1.5, 0.8}});
  SymmetricKernel f3(p, 3);
  const std::array<int, 3> ids3{0, 1, 3};
  f3.set(std::span<const int>(ids3.data(), 3), 0.7);
  SymmetricKernel f4(p, 4);
  const std::array<int, 4> ids4{0, 1, 2, 3};
  f4.set(std::span<const int>(ids4.data(), 4), -0.3);
  for (uint64_t t = 0; t < 100; ++t) {
    const MeasureSample s = sample_measure(p, MeasureLaw::cpoisson, 303, t);
    const auto& m = s.increments;
    CHECK(eval_multiple_integral(s, f3) ==
          doctest::Approx(6.0 * 0.7 * m[0] * m[1] * m[3]).epsilon(1e-13));
    CHECK(eval_multiple_integral(s, f4) ==
          doctest::Approx(24.0 * -0.3 * m[0] * m[1] * m[2] * m[3]).epsilon(1e-13));
  }
  // multiplicity 2 factorizes through the within-cell atom
  SymmetricKernel g3(p, 3);
  const std::array<int, 3> rep{1, 1, 2};
  g3.set(std::span<const int>(rep.data(), 3), 1.0);
  const MeasureSample s = sample_measure(p, MeasureLaw::cpoisson, 303, 7);
  const double d1 = chaos_atom(s.law, s.increments[1], p->mass(1));
  CHECK(eval_multiple_integral(s, g3) == doctest::Approx(3.0 * d1 * s.increments[2]).epsilon(1e-13));

  // multiplicity 3 is out of scope
  SymmetricKernel bad(p, 3);
  const std::array<int, 3> tri{2, 2, 2};
  bad.set(std::span<const int>(tri.data(), 3), 1.0);
  CHECK_THROWS_AS(eval_multiple_integral(s, bad), std::invalid_argument);
}

TEST_CASE("product formula: unit-mass indicator expansion") {
  auto p = build_partition({{1.0, 0.5}});
  Eigen::VectorXd one(1);
  one << 1.0;
  const SymmetricKernel f = SymmetricKernel::from_vector(p, one);
  for (uint64_t t = 0; t < 500; ++t) {
    const MeasureSample s = sample_measure(p, MeasureLaw::cpoisson, 304, t);
    const auto [lhs, rhs] = product_formula_check(s, f, f);
    const double m = s.increments[0];
    CHECK(lhs == doctest::Approx(m * m).epsilon(1e-13));
    CHECK(rel_err(lhs, rhs) < 1e-12);
    // rhs decomposes as (M^2 - M - 1) + M + 1
    CHECK(rhs == doctest::Approx((m * m - m - 1.0) + m + 1.0).epsilon(1e-12));
  }
}

TEST_CASE("product formula is a polynomial identity in the increments") {
  // Symbolic oracle: both sides expanded in M_0..M_4 must agree coefficient
  // by coefficient, which pins every combinatorial factor.
  auto p = random_partition(5, 305, 2);
  const auto check_pair = [&](const SymmetricKernel& f, const SymmetricKernel& g) {
    Poly lhs = poly_multiple_integral(f) * poly_multiple_integral(g);
    Poly rhs = Poly::constant(0.0);
    const int pp = f.order(), qq = g.order();
    for (int r = 0; r <= std::min(pp, qq); ++r) {
      double rfact = 1.0;
      for (int i = 2; i <= r; ++i) rfact *= i;
      auto binom = [](int nn, int kk) {
        double b = 1.0;
        for (int i = 0; i < kk; ++i) b = b * (nn - i) / (i + 1);
        return b;
      };
      for (int l = 0; l <= r; ++l) {
        const SymmetricKernel term = symmetrize(contract(f, g, r, l));
        rhs = rhs + poly_multiple_integral(term) *
                        (rfact * binom(pp, r) * binom(qq, r) * binom(r, l));
      }
    }
    CHECK((lhs - rhs).max_abs_coeff() < 1e-12);
  };

  // order-1 pairs, overlapping and general
  CounterRng rng(305, 3, 0, stream_tag::kMeta);
  Eigen::VectorXd fv(5), gv(5);
  for (int i = 0; i < 5; ++i) {
    fv[i] = 2.0 * rng.next_u01() - 1.0;
    gv[i] = 2.0 * rng.next_u01() - 1.0;
  }
  check_pair(SymmetricKernel::from_vector(p, fv), SymmetricKernel::from_vector(p, gv));

  // order-2 simple pairs: same, overlapping, disjoint
  check_pair(pair_kernel(p, 0, 1, 1.0), pair_kernel(p, 0, 1, 1.0));
  check_pair(pair_kernel(p, 0, 1, 0.8), pair_kernel(p, 1, 2, -1.2));
  check_pair(pair_kernel(p, 0, 1, 0.8), pair_kernel(p, 2, 3, 0.6));

  // general off-diagonal order-2 kernels and the mixed order case
  check_pair(random_kernel2(p, 305, 11, true), random_kernel2(p, 305, 12, true));
  check_pair(SymmetricKernel::from_vector(p, fv), random_kernel2(p, 305, 13, true));
}

TEST_CASE("product formula per trial on random kernels") {
  auto p = random_partition(5, 306, 4);
  const SymmetricKernel f = random_kernel2(p, 306, 5, true);
  const SymmetricKernel g = random_kernel2(p, 306, 6, true);
  for (uint64_t t = 0; t < 1000; ++t) {
    const MeasureSample s = sample_measure(p, MeasureLaw::cpoisson, 306, t);
    const auto [lhs, rhs] = product_formula_check(s, f, g);
    CHECK(rel_err(lhs, rhs) < 1e-10);
  }
  // gaussian law is rejected
  const MeasureSample s = sample_measure(p, MeasureLaw::gaussian, 306, 0);
  CHECK_THROWS_AS(product_formula_check(s, f, g), std::invalid_argument);
}

TEST_CASE("conditional projection") {
  auto p = build_partition({{1.0, 0.2}, {1.0, 0.7}});
  const Resolution res(p);
  const SymmetricKernel f = pair_kernel(p, 0, 1, 1.5);
  const SymmetricKernel at1 = conditional_projection(f, res, 1.0);
  const SymmetricKernel at0 = conditional_projection(f, res, 0.0);
  const SymmetricKernel mid = conditional_projection(f, res, 0.5);
  const std::array<int, 2> ids{0, 1};
  CHECK(at1.value(std::span<const int>(ids.data(), 2)) == 1.5);
  CHECK(kernel_norm_sq(at0) == 0.0);
  CHECK(kernel_norm_sq(mid) == 0.0);  // the pair needs both cells inside Z_t
}

TEST_CASE("martingale property of the projection, Monte Carlo") {
  auto p = build_partition({{1.0, 0.1}, {0.8, 0.3}, {1.2, 0.5}, {0.6, 0.7}, {1.0, 0.9}});
  const Resolution res(p);
  const SymmetricKernel f = random_kernel2(p, 307, 7, false);
  const double t_cut = 0.55;
  const SymmetricKernel proj = conditional_projection(f, res, t_cut);
  const ChaosEvaluator eval_f(f);
  const ChaosEvaluator eval_p(proj);
  const int trials = 100000;
  std::vector<double> diff(trials);
  for (int t = 0; t < trials; ++t) {
    const MeasureSample s = sample_measure(p, MeasureLaw::cpoisson, 307, static_cast<uint64_t>(t));
    // a bounded functional of the observed cells (ids 0..2 lie inside Z_t)
    const double phi = std::tanh(s.increments[0] + 0.5 * s.increments[2]);
    diff[static_cast<size_t>(t)] = phi * (eval_f(s) - eval_p(s));
  }
  const McStats stats = mc_aggregate(diff);
  CHECK(std::abs(stats.mean) < 4.0 * stats.std_error);
}

TEST_CASE("adapted integrand slices") {
  auto p = build_partition({{1.0, 0.2}, {1.0, 0.7}});
  const Resolution fwd(p);
  const Resolution rev(p, Direction::reversed);
  const SymmetricKernel f = pair_kernel(p, 0, 1, 1.0);
  const MeasureSample s = sample_measure(p, MeasureLaw::cpoisson, 308, 3);
  const AdaptedIntegrand uf = adapted_integrand(f, fwd, s);
  CHECK(uf.values[0] == 0.0);
  CHECK(uf.values[1] == doctest::Approx(2.0 * s.increments[0]).epsilon(1e-14));
  const AdaptedIntegrand ur = adapted_integrand(f, rev, s);
  CHECK(ur.values[1] == 0.0);
  CHECK(ur.values[0] == doctest::Approx(2.0 * s.increments[1]).epsilon(1e-14));

  // d = 1 integrands are deterministic
  Eigen::VectorXd hv(2);
  hv << 0.3, -0.4;
  const AdaptedIntegrand u1 = adapted_integrand(SymmetricKernel::from_vector(p, hv), fwd, s);
  CHECK(u1.values == hv);
  CHECK(adapted_integral(u1, s) == doctest::Approx(integrate_first_order(s, {p, hv})));
}

TEST_CASE("round trip through the adapted integral is exact off-diagonal") {
  auto p = random_partition(10, 309, 8);
  const SymmetricKernel f = random_kernel2(p, 309, 9, true);
  const ChaosEvaluator eval(f);
  for (Direction dir : {Direction::forward, Direction::reversed}) {
    const Resolution res(p, dir);
    for (MeasureLaw law : {MeasureLaw::gaussian, MeasureLaw::cpoisson}) {
      for (uint64_t t = 0; t < 250; ++t) {
        const MeasureSample s = sample_measure(p, law, 309, t);
        const AdaptedIntegrand u = adapted_integrand(f, res, s);
        CHECK(rel_err(adapted_integral(u, s), eval(s)) < 1e-12);
      }
    }
  }
}

TEST_CASE("adapted integral enforces provenance") {
  auto p = build_partition({{1.0, 0.4}, {1.0, 0.8}});
  const Resolution res(p);
  const SymmetricKernel f = pair_kernel(p, 0, 1, 1.0);
  const MeasureSample s = sample_measure(p, MeasureLaw::cpoisson, 310, 0);
  const MeasureSample other = sample_measure(p, MeasureLaw::cpoisson, 310, 1);
  const MeasureSample copy = sample_measure(p, MeasureLaw::cpoisson, 310, 0, 1);
  const AdaptedIntegrand u = adapted_integrand(f, res, s);
  CHECK_THROWS_AS(adapted_integral(u, other), std::invalid_argument);
  CHECK_THROWS_AS(decoupled_adapted_integral(u, s), std::invalid_argument);
  CHECK(decoupled_adapted_integral(u, copy) ==
        doctest::Approx(u.values[0] * copy.increments[0] + u.values[1] * copy.increments[1]));
}

TEST_CASE("isometry: Var I_d(f) = d! ||f||^2, both laws, d = 1, 2") {
  auto p = random_partition(6, 311, 10);
  CounterRng rng(311, 4, 0, stream_tag::kMeta);
  Eigen::VectorXd hv(6);
  for (int i = 0; i < 6; ++i) hv[i] = 2.0 * rng.next_u01() - 1.0;
  const SymmetricKernel f1 = SymmetricKernel::from_vector(p, hv);
  const SymmetricKernel f2 = random_kernel2(p, 311, 11, false);  // includes diagonal mass
  const int trials = 100000;
  for (MeasureLaw law : {MeasureLaw::gaussian, MeasureLaw::cpoisson}) {
    for (const SymmetricKernel* f : {&f1, &f2}) {
      const ChaosEvaluator eval(*f);
      std::vector<double> xs(trials);
      for (int t = 0; t < trials; ++t) {
        xs[static_cast<size_t>(t)] =
            eval(sample_measure(p, law, 311, static_cast<uint64_t>(t)));
      }
      const double fact = f->order() == 1 ? 1.0 : 2.0;
      const VarianceStats v = mc_variance(xs);
      CHECK(std::abs(v.variance - fact * kernel_norm_sq(*f)) < 4.0 * v.std_error);
      const McStats mean = mc_aggregate(xs);
      CHECK(std::abs(mean.mean) < 4.0 * mean.std_error);
    }
  }
}

TEST_CASE("orthogonality of different orders") {
  auto p = random_partition(6, 312, 12);
  CounterRng rng(312, 5, 0, stream_tag::kMeta);
  Eigen::VectorXd hv(6);
  for (int i = 0; i < 6; ++i) hv[i] = 2.0 * rng.next_u01() - 1.0;
  const SymmetricKernel f1 = SymmetricKernel::from_vector(p, hv);
  const SymmetricKernel f2 = random_kernel2(p, 312, 13, false);
  const ChaosEvaluator e1(f1), e2(f2);
  const int trials = 100000;
  for (MeasureLaw law : {MeasureLaw::gaussian, MeasureLaw::cpoisson}) {
    std::vector<double> a(trials), b(trials);
    for (int t = 0; t < trials; ++t) {
      const MeasureSample s = sample_measure(p, law, 312, static_cast<uint64_t>(t));
      a[static_cast<size_t>(t)] = e1(s);
      b[static_cast<size_t>(t)] = e2(s);
    }
    const CovarianceStats c = mc_covariance(a, b);
    CHECK(std::abs(c.covariance) < 4.0 * c.std_error);
  }
}

TEST_CASE("decoupled integral: conditionally gaussian characteristic function") {
  auto p = random_partition(6, 313, 14);
  const SymmetricKernel f = random_kernel2(p, 313, 15, true);
  const Resolution res(p);
  const MeasureSample main = sample_measure(p, MeasureLaw::gaussian, 313, 0);
  const AdaptedIntegrand u = adapted_integrand(f, res, main);
  const int copies = 20000;
  for (double lambda : {0.5, 1.0}) {
    std::vector<std::complex<double>> w(copies);
    for (int c = 0; c < copies; ++c) {
      const MeasureSample copy =
          sample_measure(p, MeasureLaw::gaussian, 313, 0, static_cast<uint32_t>(c + 1));
      w[static_cast<size_t>(c)] = std::exp(
          std::complex<double>(0.0, lambda * decoupled_adapted_integral(u, copy)));
    }
    const McStatsComplex s = mc_aggregate(std::span<const std::complex<double>>(w));
    const double target = std::exp(-0.5 * lambda * lambda * u.norm_sq());
    CHECK(std::abs(s.mean - target) < 4.0 * s.std_error);
  }
}

TEST_CASE("decoupled integral: poisson conditional characteristic function") {
  auto p = random_partition(5, 314, 16);
  const SymmetricKernel f = random_kernel2(p, 314, 17, true);
  const Resolution res(p);
  const MeasureSample main = sample_measure(p, MeasureLaw::cpoisson, 314, 0);
  const AdaptedIntegrand u = adapted_integrand(f, res, main);
  const FirstOrderKernel realized{p, u.values};
  const int copies = 20000;
  for (double lambda : {0.7, 1.5}) {
    std::vector<std::complex<double>> w(copies);
    for (int c = 0; c < copies; ++c) {
      const MeasureSample copy =
          sample_measure(p, MeasureLaw::cpoisson, 314, 0, static_cast<uint32_t>(c + 1));
      w[static_cast<size_t>(c)] = std::exp(
          std::complex<double>(0.0, lambda * decoupled_adapted_integral(u, copy)));
    }
    const McStatsComplex s = mc_aggregate(std::span<const std::complex<double>>(w));
    const std::complex<double> target = std::exp(levy_exponent(MeasureLaw::cpoisson, realized, lambda));
    CHECK(std::abs(s.mean - target) < 4.0 * s.std_error);
  }
}

TEST_CASE("adapted integral second moment matches E||u||^2") {
  auto p = random_partition(6, 315, 18);
  const SymmetricKernel f = random_kernel2(p, 315, 19, true);
  const Resolution res(p);
  const int trials = 100000;
  std::vector<double> sq(trials);
  std::vector<double> usq(trials);
  for (int t = 0; t < trials; ++t) {
    const MeasureSample s = sample_measure(p, MeasureLaw::cpoisson, 315, static_cast<uint64_t>(t));
    const AdaptedIntegrand u = adapted_integrand(f, res, s);
    const double j = adapted_integral(u, s);
    sq[static_cast<size_t>(t)] = j * j;
    usq[static_cast<size_t>(t)] = u.norm_sq();
  }
  const McStats second = mc_aggregate(sq);
  const McStats norm = mc_aggregate(usq);
  CHECK(std::abs(second.mean - norm.mean) <
        4.0 * std::hypot(second.std_error, norm.std_error));
}
