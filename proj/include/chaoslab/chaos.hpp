#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "chaoslab/kernels.hpp"
#include "chaoslab/partition.hpp"
#include "chaoslab/rmeasure.hpp"

namespace chaoslab {

/// Within-cell second-order chaos value on a cell with increment m and mass
/// mu. Squaring the first-order integral of an indicator and expanding the
/// product into orthogonal terms gives
///   compensated Poisson: M^2 = I_2(1_{B^2}) + M + mu  =>  D = M^2 - M - mu,
///   Gaussian:            M^2 = I_2(1_{B^2}) + mu      =>  D = M^2 - mu,
/// which is what makes block-kernel evaluation exact at any partition.
double chaos_atom(MeasureLaw law, double m, double mu);

/// Precomputed evaluation plan for I_d of one kernel; build once, evaluate
/// per sample. Orders 3 and 4 factor over cells as
///   I_d(class) = (d! / prod k_j!) * value * prod (M_i or D_i),
/// where k_j are the id multiplicities; multiplicities above 2 are not
/// supported.
class ChaosEvaluator {
 public:
  explicit ChaosEvaluator(const SymmetricKernel& f);
  double operator()(const MeasureSample& sample) const;

 private:
  struct Term {
    std::array<int, 4> ids;     // canonical class ids
    std::array<int, 4> counts;  // multiplicities, aligned with ids
    int distinct = 0;
    double coeff = 0.0;  // value * d! / prod k_j!
  };
  PartitionPtr partition_;
  int order_ = 0;
  double scalar_ = 0.0;
  std::vector<Term> terms_;
};

/// I_d^M(f): the multiple integral of a symmetric block kernel.
///   d = 0 -> the constant;
///   d = 1 -> sum f_i M_i;
///   d = 2 -> sum_{i<j} 2 f_ij M_i M_j + sum_i f_ii D_i;
///   d in {3, 4} -> factorized over cells, id multiplicities <= 2.
/// Linear in f; exact per trial.
double eval_multiple_integral(const MeasureSample& sample, const SymmetricKernel& f);

/// Both sides of the multiplication formula for compensated-Poisson multiple
/// integrals on one sample:
///   lhs: I_p(f) I_q(g)
///   rhs: sum_{r=0}^{p^q} r! C(p,r) C(q,r) sum_{l=0}^{r} C(r,l)
///            I_{p+q-r-l}(symmetrize(f *_r^l g)).
/// Supported for p, q in {1, 2}.
std::pair<double, double> product_formula_check(const MeasureSample& sample,
                                                const SymmetricKernel& f,
                                                const SymmetricKernel& g);

/// E[I_d(f) | F_t] at block level: zeroes every class not contained in the
/// time slice Z_t.
SymmetricKernel conditional_projection(const SymmetricKernel& f, const Resolution& resolution,
                                       double t);

/// A per-cell random integrand whose value at cell c depends only on
/// increments of cells strictly preceding c.
struct AdaptedIntegrand {
  PartitionPtr partition;
  Direction direction = Direction::forward;
  Eigen::VectorXd values;  // by cell id
  MeasureLaw law = MeasureLaw::gaussian;
  uint64_t seed = 0;
  uint64_t trial = 0;
  uint32_t stream = 0;
  std::string source;

  /// sum values_c^2 mu_c in cell order.
  double norm_sq() const;
};

/// The projected-derivative integrand h(c) = d * I_{d-1}(f(c, .) restricted
/// to cells strictly before c). For d = 2 with an off-diagonal kernel,
/// summing h(c) M_c recovers I_2(f) exactly; within-cell classes contribute
/// nothing here because the strict order excludes the cell itself.
AdaptedIntegrand adapted_integrand(const SymmetricKernel& f, const Resolution& resolution,
                                   const MeasureSample& sample);

/// J(u) = sum_c u_c M_c against the integrand's own sample.
double adapted_integral(const AdaptedIntegrand& u, const MeasureSample& sample);

/// J~(u) = sum_c u_c M~_c against an independent copy of the measure.
double decoupled_adapted_integral(const AdaptedIntegrand& u, const MeasureSample& copy);

}  // namespace chaoslab
