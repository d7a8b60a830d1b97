#include <cmath>
#include <vector>

#include "chaoslab/clt_suite.hpp"
#include "chaoslab/rng.hpp"
#include "chaoslab/scenarios.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace chaoslab;
using testsupport::random_kernel2;
using testsupport::random_partition;

TEST_CASE("block family analytic values, exact") {
  for (int n : {1, 10, 100, 1000}) {
    const BlockExample block = block_example_kernel(n);
    const AssumptionNRecord rec = check_assumption_n(block.kernel);
    CHECK(std::abs(rec.norm_half - 1.0) < 1e-12);
    CHECK(std::abs(rec.fourth_power - 1.0 / (4.0 * n)) < 1e-12 / (4.0 * n) + 1e-15);
    CHECK(std::isfinite(rec.integrability));
    const auto [c11, c21] = check_gstar(block.kernel);
    CHECK(std::abs(c11 - 1.0 / (4.0 * n)) < 1e-12);
    CHECK(std::abs(c21 - 1.0 / (4.0 * n)) < 1e-12);
  }
  SymmetricKernel zero(block_example_kernel(2).partition, 2);
  const AssumptionNRecord z = check_assumption_n(zero);
  CHECK(z.integrability == 0.0);
  CHECK(z.norm_half == 0.0);
  CHECK(z.fourth_power == 0.0);
  const auto [zc11, zc21] = check_gstar(zero);
  CHECK(zc11 == 0.0);
  CHECK(zc21 == 0.0);
}

TEST_CASE("gstar on a single off-diagonal pair of unit cells") {
  // hand expansion: both contraction norms equal 2 a^4
  auto p = build_partition({{1.0, 0.3}, {1.0, 0.7}});
  const double a = 0.8;
  SymmetricKernel f(p, 2, true);
  const std::array<int, 2> ids{0, 1};
  f.set(std::span<const int>(ids.data(), 2), a);
  const auto [c11, c21] = check_gstar(f);
  const double want = 2.0 * a * a * a * a;
  CHECK(c11 == doctest::Approx(want).epsilon(1e-13));
  CHECK(c21 == doctest::Approx(want).epsilon(1e-13));
}

TEST_CASE("findev components and closed forms on the block family") {
  for (int n : {1, 4, 16}) {
    const BlockExample block = block_example_kernel(n);
    const FindevResult res = findev_identity(block.kernel, 1, 500, 1);
    CHECK(2.0 * res.norm_sq == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(res.c11 == doctest::Approx(1.0 / (4.0 * n)).epsilon(1e-12));
    CHECK(res.c21 == doctest::Approx(1.0 / (4.0 * n)).epsilon(1e-12));
    CHECK(res.c10_raw == doctest::Approx(1.0 / (4.0 * n)).epsilon(1e-12));
    // the block contraction f *_1^0 f is already symmetric
    CHECK(res.c10_sym == doctest::Approx(res.c10_raw).epsilon(1e-12));
    // exact second moment: 3 + 40/n
    CHECK(res.rhs == doctest::Approx(3.0 + 40.0 / n).epsilon(1e-12));
    // the same norms recombined with the (48, 96 raw, 4) weights give 3 + 37/n
    const double alt = 3.0 * (2.0 * res.norm_sq) * (2.0 * res.norm_sq) + 48.0 * res.c11 +
                       96.0 * res.c10_raw + 4.0 * res.c21;
    CHECK(alt == doctest::Approx(3.0 + 37.0 / n).epsilon(1e-12));
  }
}

TEST_CASE("findev identity holds for the block family, Monte Carlo") {
  for (int n : {1, 4}) {
    const BlockExample block = block_example_kernel(n);
    const FindevResult res = findev_identity(block.kernel, 400000, 501, 2);
    CHECK(std::abs(res.lhs_mc - res.rhs) < 4.0 * res.lhs_se);
  }
}

TEST_CASE("findev identity holds for random kernels, Monte Carlo") {
  for (uint32_t rep = 0; rep < 10; ++rep) {
    auto p = random_partition(4 + static_cast<int>(rep % 3), 502 + rep, 30 + rep);
    const SymmetricKernel f = random_kernel2(p, 502 + rep, 40 + rep, true);
    const FindevResult res = findev_identity(f, 150000, 503 + rep, 2);
    CHECK(std::abs(res.lhs_mc - res.rhs) < 4.0 * res.lhs_se);
  }
  // zero kernel: both sides vanish
  auto p = random_partition(3, 599, 1);
  const FindevResult z = findev_identity(SymmetricKernel(p, 2), 100, 0, 1);
  CHECK(z.lhs_mc == 0.0);
  CHECK(z.rhs == 0.0);
}

TEST_CASE("ks_to_normal edge cases") {
  CHECK(ks_to_normal({0.0, 0.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(ks_to_normal({-100.0, 100.0}) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_THROWS_AS(ks_to_normal({}), std::invalid_argument);
  // true normal sample of 1e5 sits below 0.01 (far beyond the DKW band)
  CounterRng rng(504, 0, 0, stream_tag::kMeta);
  std::vector<double> xs(100000);
  for (auto& v : xs) v = rng.next_normal();
  CHECK(ks_to_normal(xs) < 0.01);
}

TEST_CASE("clt pipeline on the block family, reduced budget") {
  CltOptions options;
  options.workers = 2;
  options.poc_trials = 800;
  options.poc_lambda_grid = lambda_grid(-2.0, 2.0, 5);
  options.poc_pairs = block_clt_scenario(16).make_pair;
  const std::vector<int> ns = {4, 16, 64};
  const CltReport report =
      clt_pipeline([](int n) { return block_example_kernel(n).kernel; }, ns, 20000, 505, options);
  REQUIRE(report.records.size() == 3);
  double prev_ks = 1.0;
  double prev_poc = 10.0;
  for (const CltRecord& rec : report.records) {
    CHECK(rec.assumption_n.norm_half == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rec.gstar1 == doctest::Approx(1.0 / (4.0 * rec.n)).epsilon(1e-10));
    // fourth moment heads towards 3 + 50/n within a loose Monte-Carlo band
    CHECK(std::abs(rec.fourth_moment - (3.0 + 50.0 / rec.n)) < 6.0 * rec.fourth_moment_se);
    CHECK(rec.findev_rhs == doctest::Approx(3.0 + 40.0 / rec.n).epsilon(1e-12));
    CHECK(std::abs(rec.findev_lhs - rec.findev_rhs) < 6.0 * rec.findev_lhs_se);
    CHECK(rec.ks < prev_ks);
    prev_ks = rec.ks;
    CHECK(rec.poc_distance < prev_poc);
    prev_poc = rec.poc_distance;
    REQUIRE(rec.tail_moment.size() == 3);
    CHECK(rec.tail_moment[0] >= rec.tail_moment[1]);
    CHECK(rec.tail_moment[1] >= rec.tail_moment[2]);
  }
}

TEST_CASE("clt pipeline on a fixed kernel plateaus") {
  auto family = [](int) {
    auto p = build_partition({{1.0, 0.4}, {1.0, 0.8}});
    SymmetricKernel f(p, 2, true);
    const std::array<int, 2> ids{0, 1};
    f.set(std::span<const int>(ids.data(), 2), 0.5);
    return f;
  };
  CltOptions options;
  options.workers = 2;
  const std::vector<int> ns = {4, 64};
  const CltReport report = clt_pipeline(family, ns, 20000, 506, options);
  CHECK(report.records[0].ks > 0.2);
  CHECK(report.records[1].ks > 0.2);
  CHECK(std::abs(report.records[0].ks - report.records[1].ks) < 0.02);
  // the normalization holds but the contractions do not vanish
  CHECK(report.records[0].assumption_n.norm_half == doctest::Approx(1.0));
  CHECK(report.records[0].gstar1 == doctest::Approx(0.125));
}
