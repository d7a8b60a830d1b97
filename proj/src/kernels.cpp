#include "chaoslab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace chaoslab {

namespace {

void check_ids(const CellPartition& partition, std::span<const int> ids) {
  for (int id : ids) {
    if (id < 0 || id >= partition.size())
      throw std::invalid_argument("kernel: cell id out of range");
  }
}

bool has_repeat(std::span<const int> sorted_ids) {
  for (size_t i = 1; i < sorted_ids.size(); ++i) {
    if (sorted_ids[i] == sorted_ids[i - 1]) return true;
  }
  return false;
}

// Number of distinct orderings of the sorted multiset: d! / prod(k_j!).
double ordering_count(std::span<const int> sorted_ids) {
  const int d = static_cast<int>(sorted_ids.size());
  double count = 1.0;
  for (int i = 2; i <= d; ++i) count *= i;
  int i = 0;
  while (i < d) {
    int j = i;
    while (j < d && sorted_ids[j] == sorted_ids[i]) ++j;
    for (int k = 2; k <= j - i; ++k) count /= k;
    i = j;
  }
  return count;
}

double mass_product(const CellPartition& partition, std::span<const int> ids) {
  double m = 1.0;
  for (int id : ids) m *= partition.mass(id);
  return m;
}

}  // namespace

TupleKey make_tuple_key(std::span<const int> ids) {
  TupleKey key{-1, -1, -1, -1};
  for (size_t i = 0; i < ids.size(); ++i) key[i] = ids[i];
  return key;
}

SymmetricKernel::SymmetricKernel(PartitionPtr partition, int order, bool offdiag_only)
    : partition_(std::move(partition)), order_(order), offdiag_only_(offdiag_only) {
  if (!partition_) throw std::invalid_argument("kernel: null partition");
  if (order < 0 || order > kMaxKernelOrder)
    throw std::invalid_argument("kernel: order must lie in [0, 4]");
  const int n = partition_->size();
  if (order == 1) vec_ = Eigen::VectorXd::Zero(n);
  if (order == 2) mat_ = Eigen::MatrixXd::Zero(n, n);
}

SymmetricKernel SymmetricKernel::from_dense(PartitionPtr partition, const Eigen::MatrixXd& values,
                                            bool offdiag_only) {
  SymmetricKernel k(std::move(partition), 2, offdiag_only);
  if (values.rows() != k.partition().size() || values.cols() != k.partition().size())
    throw std::invalid_argument("kernel: dense size mismatch");
  if (!values.isApprox(values.transpose(), 0.0))
    throw std::invalid_argument("kernel: dense input must be symmetric");
  k.mat_ = values;
  if (offdiag_only) k.mat_.diagonal().setZero();
  return k;
}

SymmetricKernel SymmetricKernel::from_vector(PartitionPtr partition,
                                             const Eigen::VectorXd& values) {
  SymmetricKernel k(std::move(partition), 1);
  if (values.size() != k.partition().size())
    throw std::invalid_argument("kernel: vector size mismatch");
  k.vec_ = values;
  return k;
}

SymmetricKernel SymmetricKernel::constant(PartitionPtr partition, double value) {
  SymmetricKernel k(std::move(partition), 0);
  k.scalar_ = value;
  return k;
}

double SymmetricKernel::value(std::span<const int> ids) const {
  if (static_cast<int>(ids.size()) != order_)
    throw std::invalid_argument("kernel: arity mismatch");
  check_ids(*partition_, ids);
  switch (order_) {
    case 0:
      return scalar_;
    case 1:
      return vec_[ids[0]];
    case 2:
      if (offdiag_only_ && ids[0] == ids[1]) return 0.0;
      return mat_(ids[0], ids[1]);
    default: {
      std::array<int, 4> sorted{-1, -1, -1, -1};
      for (size_t i = 0; i < ids.size(); ++i) sorted[i] = ids[i];
      std::sort(sorted.begin(), sorted.begin() + order_);
      auto it = sparse_.find(sorted);
      return it == sparse_.end() ? 0.0 : it->second;
    }
  }
}

void SymmetricKernel::set(std::span<const int> ids, double value) {
  if (static_cast<int>(ids.size()) != order_)
    throw std::invalid_argument("kernel: arity mismatch");
  check_ids(*partition_, ids);
  if (order_ == 0) {
    scalar_ = value;
    return;
  }
  std::array<int, 4> sorted{-1, -1, -1, -1};
  for (size_t i = 0; i < ids.size(); ++i) sorted[i] = ids[i];
  std::sort(sorted.begin(), sorted.begin() + order_);
  if (offdiag_only_ && has_repeat(std::span<const int>(sorted.data(), ids.size())))
    throw std::invalid_argument("kernel: repeated id in an off-diagonal kernel");
  switch (order_) {
    case 0:
      scalar_ = value;
      return;
    case 1:
      vec_[ids[0]] = value;
      return;
    case 2:
      mat_(sorted[0], sorted[1]) = value;
      mat_(sorted[1], sorted[0]) = value;
      return;
    default: {
      TupleKey key = make_tuple_key(std::span<const int>(sorted.data(), ids.size()));
      if (value == 0.0) {
        sparse_.erase(key);
      } else {
        sparse_[key] = value;
      }
      return;
    }
  }
}

void SymmetricKernel::add(std::span<const int> ids, double value) {
  this->set(ids, this->value(ids) + value);
}

void SymmetricKernel::for_each_class(
    const std::function<void(std::span<const int>, double)>& fn) const {
  const int n = partition_->size();
  switch (order_) {
    case 0: {
      if (scalar_ != 0.0) fn(std::span<const int>(), scalar_);
      return;
    }
    case 1: {
      for (int i = 0; i < n; ++i) {
        if (vec_[i] != 0.0) {
          fn(std::span<const int>(&i, 1), vec_[i]);
        }
      }
      return;
    }
    case 2: {
      std::array<int, 2> ids;
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          const double v = mat_(i, j);
          if (v != 0.0 && !(offdiag_only_ && i == j)) {
            ids = {i, j};
            fn(std::span<const int>(ids.data(), 2), v);
          }
        }
      }
      return;
    }
    default: {
      for (const auto& [key, v] : sparse_) {
        fn(std::span<const int>(key.data(), static_cast<size_t>(order_)), v);
      }
      return;
    }
  }
}

const Eigen::MatrixXd& SymmetricKernel::dense() const {
  if (order_ != 2) throw std::invalid_argument("kernel: dense() needs order 2");
  return mat_;
}

const Eigen::VectorXd& SymmetricKernel::vector() const {
  if (order_ != 1) throw std::invalid_argument("kernel: vector() needs order 1");
  return vec_;
}

double SymmetricKernel::scalar_value() const {
  if (order_ != 0) throw std::invalid_argument("kernel: scalar_value() needs order 0");
  return scalar_;
}

KernelTable::KernelTable(PartitionPtr partition, int order)
    : partition_(std::move(partition)), order_(order) {
  if (!partition_) throw std::invalid_argument("kernel table: null partition");
  if (order < 0 || order > kMaxKernelOrder)
    throw std::invalid_argument("kernel table: order must lie in [0, 4]");
}

double KernelTable::value(std::span<const int> ids) const {
  if (static_cast<int>(ids.size()) != order_)
    throw std::invalid_argument("kernel table: arity mismatch");
  auto it = values_.find(make_tuple_key(ids));
  return it == values_.end() ? 0.0 : it->second;
}

void KernelTable::add(std::span<const int> ids, double value) {
  if (static_cast<int>(ids.size()) != order_)
    throw std::invalid_argument("kernel table: arity mismatch");
  check_ids(*partition_, ids);
  if (value == 0.0) return;
  values_[make_tuple_key(ids)] += value;
}

void KernelTable::set(std::span<const int> ids, double value) {
  if (static_cast<int>(ids.size()) != order_)
    throw std::invalid_argument("kernel table: arity mismatch");
  check_ids(*partition_, ids);
  values_[make_tuple_key(ids)] = value;
}

void KernelTable::for_each_entry(
    const std::function<void(std::span<const int>, double)>& fn) const {
  for (const auto& [key, v] : values_) {
    if (v != 0.0) fn(std::span<const int>(key.data(), static_cast<size_t>(order_)), v);
  }
}

SymmetricKernel symmetrize(const KernelTable& input) {
  const int d = input.order();
  SymmetricKernel out(input.partition_ptr(), d);
  if (d == 0) {
    out = SymmetricKernel::constant(input.partition_ptr(), input.value({}));
    return out;
  }
  // Accumulate sum over permutations per canonical class, then divide by d!.
  std::map<TupleKey, double> acc;
  input.for_each_entry([&](std::span<const int> ids, double v) {
    std::array<int, 4> sorted{-1, -1, -1, -1};
    for (size_t i = 0; i < ids.size(); ++i) sorted[i] = ids[i];
    std::sort(sorted.begin(), sorted.begin() + d);
    acc[sorted] += v;
  });
  for (const auto& [key, total] : acc) {
    std::span<const int> ids(key.data(), static_cast<size_t>(d));
    // (1/d!) sum_sigma input(sigma t): the stabilizer of the class repeats
    // each distinct ordering d!/ordering_count times.
    out.set(ids, total / ordering_count(ids));
  }
  return out;
}

SymmetricKernel symmetrize(PartitionPtr partition, const Eigen::MatrixXd& values) {
  if (values.rows() != values.cols()) throw std::invalid_argument("symmetrize: square input");
  Eigen::MatrixXd sym = 0.5 * (values + values.transpose());
  return SymmetricKernel::from_dense(std::move(partition), sym);
}

SymmetricKernel zero_diagonal(const SymmetricKernel& f) {
  SymmetricKernel out(f.partition_ptr(), f.order(), true);
  if (f.order() == 0) return out;
  f.for_each_class([&](std::span<const int> ids, double v) {
    if (!has_repeat(ids)) out.set(ids, v);
  });
  return out;
}

namespace {

// Distinct ordered expansions of each nonzero class, as flat id arrays.
struct OrderedEntry {
  std::array<int, 4> ids;
  double value;
};

std::vector<OrderedEntry> ordered_entries(const SymmetricKernel& f) {
  std::vector<OrderedEntry> out;
  const int d = f.order();
  f.for_each_class([&](std::span<const int> ids, double v) {
    std::array<int, 4> tuple{-1, -1, -1, -1};
    for (size_t i = 0; i < ids.size(); ++i) tuple[i] = ids[i];
    do {
      out.push_back(OrderedEntry{tuple, v});
    } while (std::next_permutation(tuple.begin(), tuple.begin() + d));
  });
  return out;
}

}  // namespace

KernelTable tensor(const SymmetricKernel& f, const SymmetricKernel& g) {
  return contract(f, g, 0, 0);
}

KernelTable contract(const SymmetricKernel& f, const SymmetricKernel& g, int r, int l) {
  if (f.partition_ptr().get() != g.partition_ptr().get())
    throw std::invalid_argument("contract: partition mismatch");
  const int p = f.order();
  const int q = g.order();
  if (r < 0 || r > std::min(p, q)) throw std::invalid_argument("contract: r out of range");
  if (l < 0 || l > r) throw std::invalid_argument("contract: l out of range");
  const int out_order = p + q - r - l;
  if (out_order > kMaxKernelOrder)
    throw std::invalid_argument("contract: output order exceeds 4");
  KernelTable out(f.partition_ptr(), out_order);
  const CellPartition& partition = f.partition();

  const std::vector<OrderedEntry> fe = ordered_entries(f);
  const std::vector<OrderedEntry> ge = ordered_entries(g);

  // Group g's ordered tuples by their leading r identified coordinates.
  std::map<TupleKey, std::vector<const OrderedEntry*>> g_by_prefix;
  for (const OrderedEntry& e : ge) {
    TupleKey prefix{-1, -1, -1, -1};
    for (int i = 0; i < r; ++i) prefix[i] = e.ids[i];
    g_by_prefix[prefix].push_back(&e);
  }

  std::array<int, 4> out_ids{-1, -1, -1, -1};
  for (const OrderedEntry& ef : fe) {
    TupleKey prefix{-1, -1, -1, -1};
    for (int i = 0; i < r; ++i) prefix[i] = ef.ids[i];
    auto it = g_by_prefix.find(prefix);
    if (it == g_by_prefix.end()) continue;
    double integrated = 1.0;
    for (int i = 0; i < l; ++i) integrated *= partition.mass(ef.ids[i]);
    for (const OrderedEntry* eg : it->second) {
      int pos = 0;
      for (int i = l; i < r; ++i) out_ids[pos++] = ef.ids[i];       // shared, kept
      for (int i = r; i < p; ++i) out_ids[pos++] = ef.ids[i];       // f-only
      for (int i = r; i < q; ++i) out_ids[pos++] = eg->ids[i];      // g-only
      out.add(std::span<const int>(out_ids.data(), static_cast<size_t>(out_order)),
              ef.value * eg->value * integrated);
    }
  }
  return out;
}

double kernel_norm_sq(const SymmetricKernel& f) {
  const CellPartition& partition = f.partition();
  if (f.order() == 0) {
    const double v = f.scalar_value();
    return v * v;
  }
  if (f.order() == 2) {
    // Full ordered index space in row-major order.
    const Eigen::MatrixXd& m = f.dense();
    const int n = partition.size();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double v = (f.offdiag_only() && i == j) ? 0.0 : m(i, j);
        acc += v * v * partition.mass(i) * partition.mass(j);
      }
    }
    return acc;
  }
  double acc = 0.0;
  f.for_each_class([&](std::span<const int> ids, double v) {
    acc += ordering_count(ids) * v * v * mass_product(partition, ids);
  });
  return acc;
}

double kernel_norm_sq(const KernelTable& f) {
  const CellPartition& partition = *f.partition_ptr();
  double acc = 0.0;
  f.for_each_entry([&](std::span<const int> ids, double v) {
    acc += v * v * mass_product(partition, ids);
  });
  return acc;
}

SymmetricKernel pointwise_power(const SymmetricKernel& f, int exponent) {
  if (exponent < 1) throw std::invalid_argument("pointwise_power: exponent >= 1");
  SymmetricKernel out(f.partition_ptr(), f.order(), f.offdiag_only());
  if (f.order() == 0) {
    return SymmetricKernel::constant(f.partition_ptr(), std::pow(f.scalar_value(), exponent));
  }
  f.for_each_class([&](std::span<const int> ids, double v) {
    out.set(ids, std::pow(v, exponent));
  });
  return out;
}

SymmetricKernel parse_kernel_json(const std::string& text, PartitionPtr partition) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!partition) {
    if (!j.contains("partition"))
      throw std::invalid_argument("kernel json: no partition supplied or inlined");
    partition = parse_partition_json(j["partition"].dump());
  }
  const int order = j.at("order").get<int>();
  const bool offdiag = j.value("offdiag_only", false);
  SymmetricKernel k(partition, order, offdiag);
  std::map<TupleKey, bool> seen;
  for (const auto& entry : j.at("entries")) {
    if (!entry.is_array() || static_cast<int>(entry.size()) != order + 1)
      throw std::invalid_argument("kernel json: each entry is [ids..., value]");
    std::vector<int> ids;
    for (int i = 0; i < order; ++i) ids.push_back(entry[static_cast<size_t>(i)].get<int>());
    std::vector<int> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    if (!seen.emplace(make_tuple_key(sorted), true).second)
      throw std::invalid_argument("kernel json: duplicate entry class");
    k.set(ids, entry[static_cast<size_t>(order)].get<double>());
  }
  return k;
}

SymmetricKernel load_kernel_json(const std::string& path, PartitionPtr partition) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open kernel file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_kernel_json(ss.str(), std::move(partition));
}

}  // namespace chaoslab
