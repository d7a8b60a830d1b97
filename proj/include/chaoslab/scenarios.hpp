#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

#include "chaoslab/chaos.hpp"
#include "chaoslab/kernels.hpp"
#include "chaoslab/partition.hpp"
#include "chaoslab/poc.hpp"

namespace chaoslab {

/// The explicit double-Poisson block family: n unit-mass cells with entry
/// times j/n and kernel value (2n)^{-1/2} on each within-cell block {j, j},
/// so that 2||f_n||^2 = 1 for every n.
struct BlockExample {
  PartitionPtr partition;
  SymmetricKernel kernel;
  int n = 0;
};

BlockExample block_example_kernel(int n);

/// The same I_2 evaluated directly from the increments:
///   n^{-1/2} sum_j 2^{-1/2} (M_j^2 - M_j - 1).
double block_example_closed_form(const MeasureSample& sample, int n);

/// The block family restated on a partition that splits every cell into
/// `subcells` equal sub-cells with interleaved entry times; I_2 is invariant
/// under the refinement while the adapted-integrand route becomes
/// non-degenerate.
BlockExample block_refined_example(int n, int subcells);

/// A standard Brownian path on the uniform grid k/steps.
struct BrownianPath {
  int steps = 0;
  Eigen::VectorXd increments;  // i.i.d. Normal(0, 1/steps)
  Eigen::VectorXd values;      // W_{k/steps}, size steps+1, fixed-order prefix sums
  double terminal = 0.0;       // W_1
};

BrownianPath simulate_brownian_path(int steps, uint64_t seed, uint64_t trial,
                                    uint32_t stream = 0);

/// Time reversal W*_t = W_1 - W_{1-t} on the same grid.
BrownianPath reverse_path(const BrownianPath& path);

/// One draw of the switching functional: simulates W on `steps` steps, uses
/// W for odd n and the time-reversed path for even n, evaluates
///   A_n = integral of t^{2n} [ (W^(n)_1)^2 - (W^(n)_t)^2 ] dt
/// by the trapezoid rule, and returns the scaled value sqrt(n)(2n+1) A_n.
/// `ito_sum` is the cross-check evaluation through the stochastic-integral
/// reduction plus its explicit sqrt(n)/(2n+2) remainder; `gap` is the
/// per-trial difference between the two routes.
struct SwitchingDraw {
  double w1 = 0.0;
  double a_prime = 0.0;
  double ito_sum = 0.0;
  double gap = 0.0;
};

SwitchingDraw simulate_switching_functional(int n, int steps, uint64_t seed, uint64_t trial);

/// Precomputed grid powers t^{2n}, t^{2n+1}, t^{4n+2} shared across trials.
struct SwitchingWeights {
  int n = 0;
  int steps = 0;
  Eigen::VectorXd pow_2n;    // at k/steps, k = 0..steps
  Eigen::VectorXd pow_2n1;   // at k/steps, k = 0..steps-1 (left endpoints)
  Eigen::VectorXd pow_4n2;   // at k/steps, k = 0..steps

  static SwitchingWeights make(int n, int steps);
};

/// Same draw as simulate_switching_functional, evaluated on a caller-supplied
/// base path; `path` must already be time-reversed for even n.
SwitchingDraw switching_draw(const BrownianPath& base, const BrownianPath& path,
                             const SwitchingWeights& weights);
double switching_norm_limit(const BrownianPath& path, const SwitchingWeights& weights);

/// E[exp(i gamma W_1 - lambda^2 W_1^2 / 2)]
///   = (1 + lambda^2)^{-1/2} exp(-gamma^2 / (2 (1 + lambda^2))),
/// the limiting weighted characteristic function of the switching sequence.
std::complex<double> switching_target_cf(double gamma, double lambda);

/// Trapezoid value of 4n * integral of (W^(n)_s)^2 s^{4n+2} ds, the squared
/// norm of the realized integrand; converges to W_1^2 in probability.
double switching_norm_limit(const BrownianPath& path, int n);

/// Tangent-pair scenarios for the decoupling verdicts.
PocScenario block_clt_scenario(int subcells);
PocScenario switching_scenario(int steps);
/// Deterministic-coefficient control: unit-norm fixed integrand, Gaussian
/// law; every decoupling metric sits at the Monte-Carlo noise floor.
PocScenario deterministic_control_scenario();

}  // namespace chaoslab
