#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "chaoslab/partition.hpp"

namespace chaoslab {

/// Law of the independently scattered measure on each cell B:
///   gaussian  -> M(B) ~ Normal(0, mu(B))
///   cpoisson  -> M(B) = N - mu(B) with N ~ Poisson(mu(B))
/// Either way E[M(B)] = 0 and Var[M(B)] = mu(B).
enum class MeasureLaw { gaussian, cpoisson };

MeasureLaw parse_law(const std::string& name);  // "gaussian" | "cpoisson"
std::string law_name(MeasureLaw law);
uint32_t law_stream_tag(MeasureLaw law);

/// One realization {M(B_i)} of the measure over a partition's cells.
/// Increments on distinct cells come from independent streams; regenerating
/// with the same (seed, trial, stream) reproduces identical bits.
struct MeasureSample {
  PartitionPtr partition;
  MeasureLaw law = MeasureLaw::gaussian;
  Eigen::VectorXd increments;  // by cell id
  uint64_t seed = 0;
  uint64_t trial = 0;
  uint32_t stream = 0;  // 0 = main; >= 1 are independent copies
};

MeasureSample sample_measure(PartitionPtr partition, MeasureLaw law, uint64_t seed,
                             uint64_t trial, uint32_t stream = 0);

/// A first-order integrand h, constant on each cell.
struct FirstOrderKernel {
  PartitionPtr partition;
  Eigen::VectorXd values;  // by cell id

  /// ||h||^2 = sum h_i^2 mu_i, accumulated in cell order.
  double norm_sq() const;
};

/// X(h) = sum_i h_i M(B_i).
double integrate_first_order(const MeasureSample& sample, const FirstOrderKernel& h);

/// Finite-atom jump intensity: weight w at jump size x per unit of control
/// measure.
struct JumpAtom {
  double x = 0.0;
  double weight = 0.0;
};

/// Characteristics of an infinitely divisible cell law, constant over the
/// space: Gaussian density sigma^2 plus a finite list of jump atoms. The two
/// sampled laws are {sigma^2 = 1, no atoms} and {sigma^2 = 0, atom (1, 1)};
/// general atom lists are supported for exponent evaluation only.
struct LevyCharacteristics {
  double sigma_sq = 0.0;
  std::vector<JumpAtom> atoms;

  static LevyCharacteristics from_law(MeasureLaw law);
};

/// Levy-Khinchine exponent of X(h):
///   psi(h; lambda) = sum_i mu_i * K(lambda * h_i), with
///   K(t) = -t^2 sigma^2 / 2 + sum_atoms w (e^{i t x} - 1 - i t x),
/// so that E[exp(i lambda X(h))] = exp(psi(h; lambda)).
std::complex<double> levy_exponent(const LevyCharacteristics& chars, const FirstOrderKernel& h,
                                   double lambda);
std::complex<double> levy_exponent(MeasureLaw law, const FirstOrderKernel& h, double lambda);

}  // namespace chaoslab
