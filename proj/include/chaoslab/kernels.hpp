#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/partition.hpp"

namespace chaoslab {

/// Cell-id tuple of order <= 4, padded with -1.
using TupleKey = std::array<int, 4>;

TupleKey make_tuple_key(std::span<const int> ids);

constexpr int kMaxKernelOrder = 4;

/// Symmetric kernel of order d on the partition: a function on d-tuples of
/// cells invariant under argument permutations, stored by unordered id
/// multiset. Orders 0/1/2 are scalar/vector/dense-matrix backed, orders 3 and
/// 4 are sparse tuple maps.
///
/// A value on a multiset with a repeated id {i,i} denotes the function
/// constant on the off-diagonal part {(x,y) in B_i^2 : x != y} of the cell
/// square; all L^2 bookkeeping weighs such blocks by the full product mass
/// mu_i^2, matching a non-atomic control measure. Immutable once built.
class SymmetricKernel {
 public:
  SymmetricKernel(PartitionPtr partition, int order, bool offdiag_only = false);

  static SymmetricKernel from_dense(PartitionPtr partition, const Eigen::MatrixXd& values,
                                    bool offdiag_only = false);
  static SymmetricKernel from_vector(PartitionPtr partition, const Eigen::VectorXd& values);
  static SymmetricKernel constant(PartitionPtr partition, double value);

  int order() const { return order_; }
  bool offdiag_only() const { return offdiag_only_; }
  const PartitionPtr& partition_ptr() const { return partition_; }
  const CellPartition& partition() const { return *partition_; }

  double value(std::span<const int> ids) const;
  /// Sets the value on the unordered class of `ids` (any argument order).
  void set(std::span<const int> ids, double value);
  void add(std::span<const int> ids, double value);

  /// Visits every nonzero unordered class in ascending key order with the
  /// canonical (sorted) id tuple.
  void for_each_class(const std::function<void(std::span<const int>, double)>& fn) const;

  const Eigen::MatrixXd& dense() const;   // order 2
  const Eigen::VectorXd& vector() const;  // order 1
  double scalar_value() const;            // order 0

 private:
  PartitionPtr partition_;
  int order_;
  bool offdiag_only_;
  double scalar_ = 0.0;
  Eigen::VectorXd vec_;
  Eigen::MatrixXd mat_;
  std::map<TupleKey, double> sparse_;  // orders 3, 4
};

/// Kernel values indexed by ordered tuples; the general, possibly asymmetric
/// intermediate produced by tensor products and contractions.
class KernelTable {
 public:
  KernelTable(PartitionPtr partition, int order);

  int order() const { return order_; }
  const PartitionPtr& partition_ptr() const { return partition_; }

  double value(std::span<const int> ids) const;
  void add(std::span<const int> ids, double value);
  void set(std::span<const int> ids, double value);
  size_t entry_count() const { return values_.size(); }

  void for_each_entry(const std::function<void(std::span<const int>, double)>& fn) const;

 private:
  PartitionPtr partition_;
  int order_;
  std::map<TupleKey, double> values_;
};

/// Symmetrization: output(t) = (1/d!) sum over permutations of input(sigma t).
SymmetricKernel symmetrize(const KernelTable& input);
/// Order-2 convenience: (A + A^T) / 2.
SymmetricKernel symmetrize(PartitionPtr partition, const Eigen::MatrixXd& values);

/// Drops every class with a repeated cell id; the result is flagged
/// offdiag_only.
SymmetricKernel zero_diagonal(const SymmetricKernel& f);

/// Tensor product f(t_1..t_p) g(s_1..s_q), not symmetrized.
KernelTable tensor(const SymmetricKernel& f, const SymmetricKernel& g);

/// Contraction f *_r^l g: identifies r arguments of f and g and integrates l
/// of them against the control measure,
///   (z_1..z_l integrated) f(z,gamma,t) g(z,gamma,s) -> out(gamma, t, s).
/// Identified-but-not-integrated variables range over full cells. The result
/// is generally asymmetric; callers symmetrize when needed.
KernelTable contract(const SymmetricKernel& f, const SymmetricKernel& g, int r, int l);

/// ||f||^2 over ordered tuples, weighted by product masses and accumulated in
/// fixed index order.
double kernel_norm_sq(const SymmetricKernel& f);
double kernel_norm_sq(const KernelTable& f);

/// Pointwise power on classes (e.g. f^2 = f *_2^0 f for order 2).
SymmetricKernel pointwise_power(const SymmetricKernel& f, int exponent);

/// Kernel JSON: {"order":2,"entries":[[i,j,value],...]}; ids per entry are an
/// unordered multiset. Order-1 entries are [i,value]. An optional inline
/// {"partition":{...}} is used when no partition is supplied.
SymmetricKernel load_kernel_json(const std::string& path, PartitionPtr partition = nullptr);
SymmetricKernel parse_kernel_json(const std::string& text, PartitionPtr partition = nullptr);

}  // namespace chaoslab
