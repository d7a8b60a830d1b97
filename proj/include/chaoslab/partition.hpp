#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace chaoslab {

/// One cell of the discretized measure space: a set of positive mass `mass`
/// that enters the increasing family of observed sets at time `tau`.
struct Cell {
  int id = 0;
  double mass = 0.0;
  double tau = 0.0;
};

/// Finite partition of the underlying space into disjoint cells with a
/// positive control-measure weight per cell. Cells are indexed 0..n-1 in
/// construction order, and all entry times are pairwise distinct so that the
/// induced time order on cells is total. Immutable after construction.
class CellPartition {
 public:
  static CellPartition from_spec(const std::vector<std::pair<double, double>>& mass_tau);

  int size() const { return static_cast<int>(cells_.size()); }
  const Cell& cell(int id) const { return cells_.at(static_cast<size_t>(id)); }
  const std::vector<Cell>& cells() const { return cells_; }
  double mass(int id) const { return cells_.at(static_cast<size_t>(id)).mass; }
  double tau(int id) const { return cells_.at(static_cast<size_t>(id)).tau; }
  /// Per-cell masses as a vector, indexed by cell id.
  const Eigen::VectorXd& masses() const { return masses_; }
  /// Sum of cell masses, accumulated in id order.
  double total_mass() const { return total_mass_; }

 private:
  std::vector<Cell> cells_;
  Eigen::VectorXd masses_;
  double total_mass_ = 0.0;
};

using PartitionPtr = std::shared_ptr<const CellPartition>;

/// Builds a partition from (mass, tau) pairs. Rejects nonpositive masses,
/// entry times outside (0, 1], and duplicate entry times.
PartitionPtr build_partition(const std::vector<std::pair<double, double>>& spec);

/// Reads a partition from JSON: {"cells":[{"mass":1.0,"tau":0.5}, ...]}.
/// Order in the file defines the cell ids.
PartitionPtr load_partition_json(const std::string& path);
PartitionPtr parse_partition_json(const std::string& text);

enum class Direction { forward, reversed };

/// A resolution of the identity over a partition: the increasing family of
/// cell sets Z_t = {c : effective_tau(c) <= t}, t in [0,1].
///
/// The reversed direction re-orders the same cells by mapping
/// tau -> 1 - tau + g, where g is the smallest gap in the sorted sequence
/// (0, tau_(1), ..., tau_(n)). The shift keeps every effective entry time in
/// (0, 1] while exactly reversing the order, so forward and reversed
/// resolutions share one partition.
class Resolution {
 public:
  explicit Resolution(PartitionPtr partition, Direction direction = Direction::forward);

  const CellPartition& partition() const { return *partition_; }
  const PartitionPtr& partition_ptr() const { return partition_; }
  Direction direction() const { return direction_; }

  double effective_tau(int id) const;
  /// Cell ids sorted by increasing effective entry time.
  std::vector<int> order() const;

 private:
  PartitionPtr partition_;
  Direction direction_;
  double reversal_gap_ = 0.0;
};

/// Z_t: ids of the cells observed by time t, ascending by id. Requires
/// t in [0, 1]; time_slice(0) is empty and time_slice(1) is every cell.
std::vector<int> time_slice(const Resolution& resolution, double t);

/// Strict time order on cells: true iff effective_tau(a) < effective_tau(b).
bool precedes(const Resolution& resolution, int a, int b);

}  // namespace chaoslab
