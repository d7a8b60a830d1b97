#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/harness.hpp"
#include "chaoslab/partition.hpp"
#include "chaoslab/rmeasure.hpp"

namespace chaoslab {

/// Generator of an elementary adapted integrand: phi(j, prefix, order) must
/// return the coefficient of the j-th summand using only the increments of
/// strictly earlier positions (`prefix`), which makes adaptedness hold by
/// construction. `order` maps positions to cell ids. t_boundary marks the
/// nesting cut. During construction phi is called exactly once per position,
/// in increasing order, so a spec instance may carry running state; reuse one
/// instance for at most one array build.
struct IntegrandSpec {
  std::string name;
  double t_boundary = 0.0;
  std::function<double(int j, std::span<const double> prefix, std::span<const int> order)> phi;
};

/// One adapted array of summands phi_j * dM_j, listed in resolution order.
struct AdaptedArray {
  PartitionPtr partition;
  MeasureLaw law = MeasureLaw::gaussian;
  std::vector<int> order;      // cell ids by position
  Eigen::VectorXd masses;      // by position
  Eigen::VectorXd phi;         // by position
  Eigen::VectorXd increments;  // by position, this array's own stream
  int boundary_r = 0;

  double total() const;
  double head_sum() const;  // positions [0, boundary_r)
};

/// The original array plus its decoupled companion: identical coefficients
/// phi (functions of the main stream), increments from an independent copy.
/// Conditionally on the main stream the decoupled summands are independent.
struct TangentArrayPair {
  AdaptedArray original;
  AdaptedArray decoupled;
};

TangentArrayPair build_tangent_pair(const IntegrandSpec& spec, PartitionPtr partition,
                                    const Resolution& resolution, MeasureLaw law, uint64_t seed,
                                    uint64_t trial);

/// Conditional characteristic function of the decoupled total given the main
/// stream, in closed form through the Levy-Khinchine exponent of the realized
/// integrand:
///   gaussian: exp(-lambda^2 sum phi_j^2 mu_j / 2)
///   cpoisson: exp(sum mu_j (e^{i lambda phi_j} - 1 - i lambda phi_j)).
std::complex<double> conditional_cf_decoupled(const TangentArrayPair& pair, double lambda);

/// Empirical (optionally weighted) characteristic function table.
struct CharFnEstimate {
  Eigen::VectorXd lambda_grid;
  Eigen::VectorXcd values;
  Eigen::VectorXd std_errors;
  bool weighted = false;
};

/// Per lambda: mean of z_t * exp(i lambda x_t) with its standard error.
/// Unit weights recover the plain empirical characteristic function.
CharFnEstimate estimate_stable_cf(std::span<const double> x_samples,
                                  std::span<const std::complex<double>> z_samples,
                                  const Eigen::VectorXd& lambda_grid);

/// A family of tangent pairs indexed by n, with the (possibly random)
/// limiting characteristic function evaluated per trial from the pair's main
/// stream.
struct PocScenario {
  std::string name;
  std::function<TangentArrayPair(int n, uint64_t seed, uint64_t trial)> make_pair;
  std::function<std::complex<double>(const TangentArrayPair& pair, double lambda)> phi_target;
};

struct PocTolerances {
  double clip_abs = 1e-6;      // |target| below this is flagged as ill-conditioned
  int allowed_violations = 1;  // per monotone-trend flag
};

struct PocRow {
  int n = 0;
  double lambda = 0.0;
  std::string metric;
  double value = 0.0;
  double std_err = 0.0;
};

struct PocReport {
  std::vector<PocRow> rows;
  bool cp2_trend_decreasing = false;
  bool conclusion_trend_decreasing = false;
  std::vector<double> cp2_by_n;         // mean over the lambda grid
  std::vector<double> conclusion_by_n;  // mean over the lambda grid
};

/// Runs the scenario over the n grid and reports, per n:
///   head_second_moment      MC second moment of the head sums (negligibility)
///   cp2_distance            MC mean |conditional cf - target| per lambda
///   conclusion_distance     |empirical cf of originals - mean target| per lambda
/// plus monotone-trend flags. Distances are reported, never asserted.
PocReport poc_verdict(const PocScenario& scenario, const std::vector<int>& n_values,
                      const Eigen::VectorXd& lambda_grid, int64_t trials, uint64_t seed,
                      int workers, const PocTolerances& tol = {});

}  // namespace chaoslab
