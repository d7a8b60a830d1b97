#include "chaoslab/chaos.hpp"

#include <cmath>
#include <stdexcept>

namespace chaoslab {

double chaos_atom(MeasureLaw law, double m, double mu) {
  return law == MeasureLaw::gaussian ? m * m - mu : m * m - m - mu;
}

ChaosEvaluator::ChaosEvaluator(const SymmetricKernel& f)
    : partition_(f.partition_ptr()), order_(f.order()) {
  if (order_ == 0) {
    scalar_ = f.scalar_value();
    return;
  }
  double fact = 1.0;
  for (int i = 2; i <= order_; ++i) fact *= i;
  f.for_each_class([&](std::span<const int> ids, double v) {
    Term term;
    term.ids = {-1, -1, -1, -1};
    term.counts = {0, 0, 0, 0};
    double stabilizer = 1.0;
    for (size_t i = 0; i < ids.size(); ++i) {
      if (term.distinct > 0 && term.ids[term.distinct - 1] == ids[i]) {
        const int c = ++term.counts[term.distinct - 1];
        stabilizer *= c;
        if (c > 2)
          throw std::invalid_argument(
              "eval_multiple_integral: id multiplicity above 2 is unsupported");
      } else {
        term.ids[term.distinct] = ids[i];
        term.counts[term.distinct] = 1;
        ++term.distinct;
      }
    }
    term.coeff = v * fact / stabilizer;
    terms_.push_back(term);
  });
}

double ChaosEvaluator::operator()(const MeasureSample& sample) const {
  if (sample.partition.get() != partition_.get())
    throw std::invalid_argument("eval_multiple_integral: partition mismatch");
  if (order_ == 0) return scalar_;
  const Eigen::VectorXd& m = sample.increments;
  const CellPartition& partition = *partition_;
  double acc = 0.0;
  for (const Term& term : terms_) {
    double prod = term.coeff;
    for (int i = 0; i < term.distinct; ++i) {
      const int id = term.ids[i];
      prod *= term.counts[i] == 1 ? m[id]
                                  : chaos_atom(sample.law, m[id], partition.mass(id));
    }
    acc += prod;
  }
  return acc;
}

double eval_multiple_integral(const MeasureSample& sample, const SymmetricKernel& f) {
  return ChaosEvaluator(f)(sample);
}

namespace {

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
  return b;
}

}  // namespace

std::pair<double, double> product_formula_check(const MeasureSample& sample,
                                                const SymmetricKernel& f,
                                                const SymmetricKernel& g) {
  if (sample.law != MeasureLaw::cpoisson)
    throw std::invalid_argument("product_formula_check: compensated Poisson law required");
  const int p = f.order();
  const int q = g.order();
  if (p < 1 || p > 2 || q < 1 || q > 2)
    throw std::invalid_argument("product_formula_check: orders must lie in {1, 2}");
  const double lhs = eval_multiple_integral(sample, f) * eval_multiple_integral(sample, g);
  double rhs = 0.0;
  for (int r = 0; r <= std::min(p, q); ++r) {
    double rfact = 1.0;
    for (int i = 2; i <= r; ++i) rfact *= i;
    const double outer = rfact * binomial(p, r) * binomial(q, r);
    for (int l = 0; l <= r; ++l) {
      const SymmetricKernel term = symmetrize(contract(f, g, r, l));
      rhs += outer * binomial(r, l) * eval_multiple_integral(sample, term);
    }
  }
  return {lhs, rhs};
}

SymmetricKernel conditional_projection(const SymmetricKernel& f, const Resolution& resolution,
                                       double t) {
  if (resolution.partition_ptr().get() != f.partition_ptr().get())
    throw std::invalid_argument("conditional_projection: partition mismatch");
  if (!(t >= 0.0) || !(t <= 1.0))
    throw std::invalid_argument("conditional_projection: t must lie in [0, 1]");
  SymmetricKernel out(f.partition_ptr(), f.order(), f.offdiag_only());
  if (f.order() == 0) return SymmetricKernel::constant(f.partition_ptr(), f.scalar_value());
  f.for_each_class([&](std::span<const int> ids, double v) {
    for (int id : ids) {
      if (resolution.effective_tau(id) > t) return;
    }
    out.set(ids, v);
  });
  return out;
}

double AdaptedIntegrand::norm_sq() const {
  double acc = 0.0;
  for (int i = 0; i < partition->size(); ++i) acc += values[i] * values[i] * partition->mass(i);
  return acc;
}

AdaptedIntegrand adapted_integrand(const SymmetricKernel& f, const Resolution& resolution,
                                   const MeasureSample& sample) {
  if (f.order() < 1 || f.order() > 2)
    throw std::invalid_argument("adapted_integrand: order must be 1 or 2");
  if (f.partition_ptr().get() != sample.partition.get() ||
      resolution.partition_ptr().get() != sample.partition.get())
    throw std::invalid_argument("adapted_integrand: partition mismatch");
  AdaptedIntegrand u;
  u.partition = sample.partition;
  u.direction = resolution.direction();
  u.law = sample.law;
  u.seed = sample.seed;
  u.trial = sample.trial;
  u.stream = sample.stream;
  u.values = Eigen::VectorXd::Zero(sample.partition->size());
  if (f.order() == 1) {
    u.values = f.vector();
    u.source = "order-1 kernel (deterministic)";
    return u;
  }
  f.for_each_class([&](std::span<const int> ids, double v) {
    const int a = ids[0];
    const int b = ids[1];
    if (a == b) return;  // the strict order excludes the cell itself
    const int later = precedes(resolution, a, b) ? b : a;
    const int earlier = later == b ? a : b;
    u.values[later] += 2.0 * v * sample.increments[earlier];
  });
  u.source = "order-2 kernel slice";
  return u;
}

double adapted_integral(const AdaptedIntegrand& u, const MeasureSample& sample) {
  if (u.partition.get() != sample.partition.get())
    throw std::invalid_argument("adapted_integral: partition mismatch");
  if (u.seed != sample.seed || u.trial != sample.trial || u.stream != sample.stream)
    throw std::invalid_argument("adapted_integral: integrand built from a different stream");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.values.size(); ++i) acc += u.values[i] * sample.increments[i];
  return acc;
}

double decoupled_adapted_integral(const AdaptedIntegrand& u, const MeasureSample& copy) {
  if (u.partition.get() != copy.partition.get())
    throw std::invalid_argument("decoupled_adapted_integral: partition mismatch");
  if (u.seed == copy.seed && u.trial == copy.trial && u.stream == copy.stream)
    throw std::invalid_argument("decoupled_adapted_integral: copy shares the integrand's stream");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.values.size(); ++i) acc += u.values[i] * copy.increments[i];
  return acc;
}

}  // namespace chaoslab
