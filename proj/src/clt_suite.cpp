#include "chaoslab/clt_suite.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chaoslab/chaos.hpp"
#include "chaoslab/harness.hpp"

namespace chaoslab {

AssumptionNRecord check_assumption_n(const SymmetricKernel& f) {
  if (f.order() != 2) throw std::invalid_argument("check_assumption_n: order-2 kernel required");
  const CellPartition& partition = f.partition();
  const int n = partition.size();
  AssumptionNRecord rec;
  // row_sq(x) = integral of f(z, x)^2 dmu(z), one value per cell x.
  Eigen::VectorXd row_sq = Eigen::VectorXd::Zero(n);
  f.for_each_class([&](std::span<const int> ids, double v) {
    const int i = ids[0];
    const int j = ids[1];
    row_sq[j] += v * v * partition.mass(i);
    if (i != j) row_sq[i] += v * v * partition.mass(j);
  });
  double integrability = 0.0;
  for (int x = 0; x < n; ++x) integrability += row_sq[x] * row_sq[x] * partition.mass(x);
  rec.integrability = integrability;
  rec.norm_half = 2.0 * kernel_norm_sq(f);
  rec.fourth_power = kernel_norm_sq(pointwise_power(f, 2));
  return rec;
}

std::pair<double, double> check_gstar(const SymmetricKernel& f) {
  if (f.order() != 2) throw std::invalid_argument("check_gstar: order-2 kernel required");
  const double c11 = kernel_norm_sq(contract(f, f, 1, 1));
  const double c21 = kernel_norm_sq(contract(f, f, 2, 1));
  return {c11, c21};
}

FindevResult findev_identity(const SymmetricKernel& f, int64_t trials, uint64_t seed,
                             int workers) {
  if (f.order() != 2) throw std::invalid_argument("findev_identity: order-2 kernel required");
  if (trials < 1) throw std::invalid_argument("findev_identity: trial budget must be positive");
  FindevResult res;
  res.norm_sq = kernel_norm_sq(f);
  res.c11 = kernel_norm_sq(contract(f, f, 1, 1));
  const KernelTable c10 = contract(f, f, 1, 0);
  res.c10_raw = kernel_norm_sq(c10);
  res.c10_sym = kernel_norm_sq(symmetrize(c10));
  res.c21 = kernel_norm_sq(contract(f, f, 2, 1));
  const double a = 2.0 * res.norm_sq;
  res.rhs = 3.0 * a * a + 48.0 * res.c11 + 96.0 * res.c10_sym + 16.0 * res.c21;

  const ChaosEvaluator eval_f(f);
  const ChaosEvaluator eval_fsq(pointwise_power(f, 2));
  std::vector<double> samples(static_cast<size_t>(trials));
  PartitionPtr partition = f.partition_ptr();
  parallel_trials(trials, workers, [&](int64_t t) {
    const MeasureSample s =
        sample_measure(partition, MeasureLaw::cpoisson, seed, static_cast<uint64_t>(t));
    const double big_f = eval_f(s);
    const double centered = big_f * big_f - 2.0 * eval_fsq(s);
    samples[static_cast<size_t>(t)] = centered * centered;
  });
  const McStats stats = mc_aggregate(std::span<const double>(samples));
  res.lhs_mc = stats.mean;
  res.lhs_se = stats.std_error;
  return res;
}

double ks_to_normal(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("ks_to_normal: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-samples[i] / std::numbers::sqrt2);
    const double hi = (static_cast<double>(i) + 1.0) / n - cdf;
    const double lo = cdf - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

CltReport clt_pipeline(const std::function<SymmetricKernel(int)>& family,
                       std::span<const int> n_values, int64_t trials, uint64_t seed,
                       const CltOptions& options) {
  if (!family) throw std::invalid_argument("clt_pipeline: no kernel family");
  if (trials < 1) throw std::invalid_argument("clt_pipeline: trial budget must be positive");
  CltReport report;
  for (int n : n_values) {
    const SymmetricKernel f = family(n);
    CltRecord rec;
    rec.n = n;
    rec.assumption_n = check_assumption_n(f);
    if (!std::isfinite(rec.assumption_n.integrability))
      throw std::invalid_argument("clt_pipeline: kernel fails the integrability check");
    std::tie(rec.gstar1, rec.gstar2) = check_gstar(f);

    const ChaosEvaluator eval_f(f);
    const ChaosEvaluator eval_fsq(pointwise_power(f, 2));
    PartitionPtr partition = f.partition_ptr();
    std::vector<double> samples(static_cast<size_t>(trials));
    std::vector<double> findev(static_cast<size_t>(trials));
    parallel_trials(trials, options.workers, [&](int64_t t) {
      const MeasureSample s =
          sample_measure(partition, MeasureLaw::cpoisson, seed, static_cast<uint64_t>(t));
      const double big_f = eval_f(s);
      samples[static_cast<size_t>(t)] = big_f;
      const double centered = big_f * big_f - 2.0 * eval_fsq(s);
      findev[static_cast<size_t>(t)] = centered * centered;
    });
    {
      const McStats fd = mc_aggregate(std::span<const double>(findev));
      rec.findev_lhs = fd.mean;
      rec.findev_lhs_se = fd.std_error;
      const double a = rec.assumption_n.norm_half;
      const KernelTable c10 = contract(f, f, 1, 0);
      rec.findev_rhs = 3.0 * a * a + 48.0 * rec.gstar1 +
                       96.0 * kernel_norm_sq(symmetrize(c10)) + 16.0 * rec.gstar2;
    }

    std::vector<double> fourth(static_cast<size_t>(trials));
    for (size_t i = 0; i < samples.size(); ++i) {
      const double x = samples[i];
      fourth[i] = x * x * x * x;
    }
    const McStats m4 = mc_aggregate(std::span<const double>(fourth));
    rec.fourth_moment = m4.mean;
    rec.fourth_moment_se = m4.std_error;
    for (double cut : options.tail_cuts) {
      double acc = 0.0;
      for (size_t i = 0; i < samples.size(); ++i) {
        if (std::abs(samples[i]) > cut) acc += fourth[i];
      }
      rec.tail_moment.push_back(acc / static_cast<double>(trials));
    }
    rec.ks = ks_to_normal(samples);

    if (options.poc_pairs && options.poc_lambda_grid.size() > 0) {
      const Eigen::VectorXd& grid = options.poc_lambda_grid;
      const int lam_count = static_cast<int>(grid.size());
      std::vector<double> dist(static_cast<size_t>(options.poc_trials * lam_count));
      parallel_trials(options.poc_trials, options.workers, [&](int64_t t) {
        const TangentArrayPair pair = options.poc_pairs(n, seed, static_cast<uint64_t>(t));
        for (int k = 0; k < lam_count; ++k) {
          const std::complex<double> cf = conditional_cf_decoupled(pair, grid[k]);
          const double target = std::exp(-0.5 * grid[k] * grid[k]);
          dist[static_cast<size_t>(t * lam_count + k)] = std::abs(cf - target);
        }
      });
      std::vector<double> col(static_cast<size_t>(options.poc_trials));
      double mean_over_grid = 0.0;
      for (int k = 0; k < lam_count; ++k) {
        for (int64_t t = 0; t < options.poc_trials; ++t) {
          col[static_cast<size_t>(t)] = dist[static_cast<size_t>(t * lam_count + k)];
        }
        const McStats s = mc_aggregate(std::span<const double>(col));
        rec.poc_by_lambda.push_back(s.mean);
        mean_over_grid += s.mean;
      }
      rec.poc_distance = mean_over_grid / lam_count;
    }
    report.records.push_back(std::move(rec));
    report.n_values.push_back(n);
  }
  return report;
}

}  // namespace chaoslab
