#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/kernels.hpp"
#include "chaoslab/poc.hpp"
#include "chaoslab/rmeasure.hpp"

namespace chaoslab {

/// Integrability, normalization and fourth-power functionals of an order-2
/// kernel: (integral of (integral of f(z,.)^2 dmu)^2 dmu, 2||f||^2,
/// integral of f^4 over the product space).
struct AssumptionNRecord {
  double integrability = 0.0;
  double norm_half = 0.0;     // 2 ||f||^2, unit target
  double fourth_power = 0.0;  // vanishing target
};

AssumptionNRecord check_assumption_n(const SymmetricKernel& f);

/// (||f *_1^1 f||^2 over the product space, ||f *_2^1 f||^2 over the base
/// space): both must vanish along a family for the normal limit.
std::pair<double, double> check_gstar(const SymmetricKernel& f);

/// Second moment of F^2 - 2 I_2(f^2) with F = I_2(f), compensated Poisson.
/// The orthogonal expansion of F^2 gives the exact value
///   rhs = 3 (2||f||^2)^2 + 48 ||f *_1^1 f||^2
///         + 96 ||sym(f *_1^0 f)||^2 + 16 ||f *_2^1 f||^2,
/// exposed together with its raw contraction norms.
struct FindevResult {
  double lhs_mc = 0.0;
  double lhs_se = 0.0;
  double rhs = 0.0;           // the exact expansion above
  double norm_sq = 0.0;       // ||f||^2
  double c11 = 0.0;           // ||f *_1^1 f||^2
  double c10_raw = 0.0;       // ||f *_1^0 f||^2 (unsymmetrized)
  double c10_sym = 0.0;       // ||sym(f *_1^0 f)||^2
  double c21 = 0.0;           // ||f *_2^1 f||^2
};

FindevResult findev_identity(const SymmetricKernel& f, int64_t trials, uint64_t seed,
                             int workers);

/// Two-sided Kolmogorov-Smirnov distance of the sample to the standard
/// normal CDF, evaluated at the jump points of the empirical CDF.
double ks_to_normal(std::vector<double> samples);

struct CltRecord {
  int n = 0;
  AssumptionNRecord assumption_n;
  double gstar1 = 0.0;
  double gstar2 = 0.0;
  double fourth_moment = 0.0;
  double fourth_moment_se = 0.0;
  double ks = 0.0;
  double findev_lhs = 0.0;  // sampled E[(F^2 - 2 I_2(f^2))^2]
  double findev_lhs_se = 0.0;
  double findev_rhs = 0.0;  // exact second-moment expansion
  double poc_distance = 0.0;  // mean over the poc lambda grid
  std::vector<double> poc_by_lambda;
  std::vector<double> tail_moment;  // E[F^4 1{|F| > K}] for K in tail_cuts
};

struct CltOptions {
  int workers = 1;
  int64_t poc_trials = 5000;
  /// Tangent pairs carrying the realized adapted integrand of f_n; when set,
  /// the pipeline reports the mean distance of the conditional CF of the
  /// decoupled total to exp(-lambda^2 / 2) over poc_lambda_grid.
  std::function<TangentArrayPair(int n, uint64_t seed, uint64_t trial)> poc_pairs;
  Eigen::VectorXd poc_lambda_grid;
  std::vector<double> tail_cuts = {3.0, 5.0, 8.0};
};

struct CltReport {
  std::vector<int> n_values;
  std::vector<CltRecord> records;
};

/// Per n: analytic conditions of the kernel family, the Monte-Carlo fourth
/// moment, the KS distance of the I_2 sample to the standard normal, and the
/// conditional-CF route distance computed from the realized adapted
/// integrand on a refined copy of the family's partition.
CltReport clt_pipeline(const std::function<SymmetricKernel(int)>& family,
                       std::span<const int> n_values, int64_t trials, uint64_t seed,
                       const CltOptions& options = {});

}  // namespace chaoslab
