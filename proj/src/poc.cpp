#include "chaoslab/poc.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "chaoslab/harness.hpp"

namespace chaoslab {

double AdaptedArray::total() const {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < phi.size(); ++j) acc += phi[j] * increments[j];
  return acc;
}

double AdaptedArray::head_sum() const {
  double acc = 0.0;
  for (int j = 0; j < boundary_r; ++j) acc += phi[j] * increments[j];
  return acc;
}

TangentArrayPair build_tangent_pair(const IntegrandSpec& spec, PartitionPtr partition,
                                    const Resolution& resolution, MeasureLaw law, uint64_t seed,
                                    uint64_t trial) {
  if (!spec.phi) throw std::invalid_argument("build_tangent_pair: spec has no coefficient rule");
  if (!(spec.t_boundary >= 0.0) || !(spec.t_boundary <= 1.0))
    throw std::invalid_argument("build_tangent_pair: boundary outside [0, 1]");
  if (resolution.partition_ptr().get() != partition.get())
    throw std::invalid_argument("build_tangent_pair: partition mismatch");

  const MeasureSample main = sample_measure(partition, law, seed, trial, 0);
  const MeasureSample copy = sample_measure(partition, law, seed, trial, 1);

  const std::vector<int> order = resolution.order();
  const int n = static_cast<int>(order.size());

  AdaptedArray original;
  original.partition = partition;
  original.law = law;
  original.order = order;
  original.masses.resize(n);
  original.phi.resize(n);
  original.increments.resize(n);
  for (int j = 0; j < n; ++j) {
    original.masses[j] = partition->mass(order[j]);
    original.increments[j] = main.increments[order[j]];
  }
  // Coefficients see only the strictly earlier main increments.
  for (int j = 0; j < n; ++j) {
    original.phi[j] =
        spec.phi(j, std::span<const double>(original.increments.data(), static_cast<size_t>(j)),
                 std::span<const int>(order.data(), order.size()));
  }
  original.boundary_r = 0;
  for (int j = 0; j < n; ++j) {
    if (resolution.effective_tau(order[j]) <= spec.t_boundary) original.boundary_r = j + 1;
  }

  AdaptedArray decoupled = original;
  for (int j = 0; j < n; ++j) decoupled.increments[j] = copy.increments[order[j]];

  return TangentArrayPair{std::move(original), std::move(decoupled)};
}

std::complex<double> conditional_cf_decoupled(const TangentArrayPair& pair, double lambda) {
  const AdaptedArray& a = pair.original;
  if (a.law == MeasureLaw::gaussian) {
    double nsq = 0.0;
    for (Eigen::Index j = 0; j < a.phi.size(); ++j) nsq += a.phi[j] * a.phi[j] * a.masses[j];
    return {std::exp(-0.5 * lambda * lambda * nsq), 0.0};
  }
  std::complex<double> psi(0.0, 0.0);
  for (Eigen::Index j = 0; j < a.phi.size(); ++j) {
    const double t = lambda * a.phi[j];
    if (t == 0.0) continue;
    psi += a.masses[j] * std::complex<double>(std::cos(t) - 1.0, std::sin(t) - t);
  }
  return std::exp(psi);
}

CharFnEstimate estimate_stable_cf(std::span<const double> x_samples,
                                  std::span<const std::complex<double>> z_samples,
                                  const Eigen::VectorXd& grid) {
  if (x_samples.size() != z_samples.size())
    throw std::invalid_argument("estimate_stable_cf: sample length mismatch");
  if (x_samples.empty()) throw std::invalid_argument("estimate_stable_cf: empty sample");
  CharFnEstimate est;
  est.lambda_grid = grid;
  est.values.resize(grid.size());
  est.std_errors.resize(grid.size());
  est.weighted = false;
  for (const auto& z : z_samples) {
    if (z != std::complex<double>(1.0, 0.0)) {
      est.weighted = true;
      break;
    }
  }
  std::vector<std::complex<double>> w(x_samples.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const double lambda = grid[k];
    for (size_t t = 0; t < x_samples.size(); ++t) {
      w[t] = z_samples[t] * std::exp(std::complex<double>(0.0, lambda * x_samples[t]));
    }
    const McStatsComplex s = mc_aggregate(std::span<const std::complex<double>>(w));
    est.values[k] = s.mean;
    est.std_errors[k] = s.std_error;
  }
  return est;
}

namespace {

bool decreasing_with_allowance(const std::vector<double>& v, int allowed) {
  int violations = 0;
  for (size_t i = 1; i < v.size(); ++i) {
    if (v[i] >= v[i - 1]) ++violations;
  }
  return violations <= allowed;
}

}  // namespace

PocReport poc_verdict(const PocScenario& scenario, const std::vector<int>& n_values,
                      const Eigen::VectorXd& grid, int64_t trials, uint64_t seed, int workers,
                      const PocTolerances& tol) {
  PocReport report;
  const int lam_count = static_cast<int>(grid.size());
  for (int n : n_values) {
    std::vector<double> head_sq_orig(static_cast<size_t>(trials));
    std::vector<double> head_sq_dec(static_cast<size_t>(trials));
    std::vector<double> totals(static_cast<size_t>(trials));
    // Row-major per-trial tables over the lambda grid.
    std::vector<double> cp2_abs(static_cast<size_t>(trials * lam_count));
    std::vector<std::complex<double>> target(static_cast<size_t>(trials * lam_count));

    parallel_trials(trials, workers, [&](int64_t t) {
      const TangentArrayPair pair = scenario.make_pair(n, seed, static_cast<uint64_t>(t));
      const double ho = pair.original.head_sum();
      const double hd = pair.decoupled.head_sum();
      head_sq_orig[static_cast<size_t>(t)] = ho * ho;
      head_sq_dec[static_cast<size_t>(t)] = hd * hd;
      totals[static_cast<size_t>(t)] = pair.original.total();
      for (int k = 0; k < lam_count; ++k) {
        const std::complex<double> cf = conditional_cf_decoupled(pair, grid[k]);
        const std::complex<double> tgt = scenario.phi_target(pair, grid[k]);
        cp2_abs[static_cast<size_t>(t * lam_count + k)] = std::abs(cf - tgt);
        target[static_cast<size_t>(t * lam_count + k)] = tgt;
      }
    });

    const McStats head_o = mc_aggregate(std::span<const double>(head_sq_orig));
    const McStats head_d = mc_aggregate(std::span<const double>(head_sq_dec));
    report.rows.push_back({n, 0.0, "head_second_moment_original", head_o.mean, head_o.std_error});
    report.rows.push_back({n, 0.0, "head_second_moment_decoupled", head_d.mean, head_d.std_error});

    double cp2_sum = 0.0;
    double conclusion_sum = 0.0;
    std::vector<double> col(static_cast<size_t>(trials));
    std::vector<std::complex<double>> tcol(static_cast<size_t>(trials));
    std::vector<std::complex<double>> ecf(static_cast<size_t>(trials));
    for (int k = 0; k < lam_count; ++k) {
      for (int64_t t = 0; t < trials; ++t) {
        col[static_cast<size_t>(t)] = cp2_abs[static_cast<size_t>(t * lam_count + k)];
        tcol[static_cast<size_t>(t)] = target[static_cast<size_t>(t * lam_count + k)];
        ecf[static_cast<size_t>(t)] =
            std::exp(std::complex<double>(0.0, grid[k] * totals[static_cast<size_t>(t)]));
      }
      const McStats cp2 = mc_aggregate(std::span<const double>(col));
      const McStatsComplex tmean = mc_aggregate(std::span<const std::complex<double>>(tcol));
      const McStatsComplex cf = mc_aggregate(std::span<const std::complex<double>>(ecf));
      const double conclusion = std::abs(cf.mean - tmean.mean);
      const double conclusion_se = std::hypot(cf.std_error, tmean.std_error);
      report.rows.push_back({n, grid[k], "cp2_distance", cp2.mean, cp2.std_error});
      report.rows.push_back({n, grid[k], "conclusion_distance", conclusion, conclusion_se});
      if (std::abs(tmean.mean) < tol.clip_abs) {
        report.rows.push_back({n, grid[k], "target_clipped", 1.0, 0.0});
      }
      cp2_sum += cp2.mean;
      conclusion_sum += conclusion;
    }
    report.cp2_by_n.push_back(cp2_sum / lam_count);
    report.conclusion_by_n.push_back(conclusion_sum / lam_count);
  }
  report.cp2_trend_decreasing = decreasing_with_allowance(report.cp2_by_n, tol.allowed_violations);
  report.conclusion_trend_decreasing =
      decreasing_with_allowance(report.conclusion_by_n, tol.allowed_violations);
  for (size_t i = 0; i < n_values.size(); ++i) {
    report.rows.push_back({n_values[i], 0.0, "cp2_mean", report.cp2_by_n[i], 0.0});
    report.rows.push_back({n_values[i], 0.0, "conclusion_mean", report.conclusion_by_n[i], 0.0});
  }
  report.rows.push_back(
      {0, 0.0, "trend_cp2_decreasing", report.cp2_trend_decreasing ? 1.0 : 0.0, 0.0});
  report.rows.push_back({0, 0.0, "trend_conclusion_decreasing",
                         report.conclusion_trend_decreasing ? 1.0 : 0.0, 0.0});
  return report;
}

}  // namespace chaoslab
