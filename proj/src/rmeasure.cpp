#include "chaoslab/rmeasure.hpp"

#include <cmath>
#include <stdexcept>

#include "chaoslab/rng.hpp"

namespace chaoslab {

MeasureLaw parse_law(const std::string& name) {
  if (name == "gaussian") return MeasureLaw::gaussian;
  if (name == "cpoisson") return MeasureLaw::cpoisson;
  throw std::invalid_argument("unknown law \"" + name + "\" (expected gaussian or cpoisson)");
}

std::string law_name(MeasureLaw law) {
  return law == MeasureLaw::gaussian ? "gaussian" : "cpoisson";
}

uint32_t law_stream_tag(MeasureLaw law) {
  return law == MeasureLaw::gaussian ? stream_tag::kGaussianIncrement
                                     : stream_tag::kPoissonIncrement;
}

MeasureSample sample_measure(PartitionPtr partition, MeasureLaw law, uint64_t seed,
                             uint64_t trial, uint32_t stream) {
  if (!partition) throw std::invalid_argument("sample_measure: null partition");
  MeasureSample s;
  s.partition = partition;
  s.law = law;
  s.seed = seed;
  s.trial = trial;
  s.stream = stream;
  const int n = partition->size();
  s.increments.resize(n);
  const uint32_t tag = stream_tag::with_copy(law_stream_tag(law), stream);
  for (int i = 0; i < n; ++i) {
    CounterRng rng(seed, trial, static_cast<uint32_t>(i), tag);
    const double mu = partition->mass(i);
    if (law == MeasureLaw::gaussian) {
      s.increments[i] = std::sqrt(mu) * rng.next_normal();
    } else {
      s.increments[i] = static_cast<double>(rng.next_poisson(mu)) - mu;
    }
  }
  return s;
}

double FirstOrderKernel::norm_sq() const {
  if (!partition) throw std::invalid_argument("first-order kernel: null partition");
  double acc = 0.0;
  for (int i = 0; i < partition->size(); ++i) {
    acc += values[i] * values[i] * partition->mass(i);
  }
  return acc;
}

double integrate_first_order(const MeasureSample& sample, const FirstOrderKernel& h) {
  if (sample.partition.get() != h.partition.get())
    throw std::invalid_argument("integrate_first_order: partition mismatch");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < sample.increments.size(); ++i) {
    acc += h.values[i] * sample.increments[i];
  }
  return acc;
}

LevyCharacteristics LevyCharacteristics::from_law(MeasureLaw law) {
  if (law == MeasureLaw::gaussian) return {1.0, {}};
  return {0.0, {JumpAtom{1.0, 1.0}}};
}

std::complex<double> levy_exponent(const LevyCharacteristics& chars, const FirstOrderKernel& h,
                                   double lambda) {
  std::complex<double> acc(0.0, 0.0);
  for (int i = 0; i < h.partition->size(); ++i) {
    const double t = lambda * h.values[i];
    std::complex<double> k(-0.5 * t * t * chars.sigma_sq, 0.0);
    for (const JumpAtom& atom : chars.atoms) {
      const double tx = t * atom.x;
      k += atom.weight * (std::complex<double>(std::cos(tx) - 1.0, std::sin(tx) - tx));
    }
    acc += h.partition->mass(i) * k;
  }
  return acc;
}

std::complex<double> levy_exponent(MeasureLaw law, const FirstOrderKernel& h, double lambda) {
  if (law == MeasureLaw::gaussian) {
    // Real exponent: -lambda^2 ||h||^2 / 2.
    return {-0.5 * lambda * lambda * h.norm_sq(), 0.0};
  }
  std::complex<double> acc(0.0, 0.0);
  for (int i = 0; i < h.partition->size(); ++i) {
    const double t = lambda * h.values[i];
    acc += h.partition->mass(i) * std::complex<double>(std::cos(t) - 1.0, std::sin(t) - t);
  }
  return acc;
}

}  // namespace chaoslab
