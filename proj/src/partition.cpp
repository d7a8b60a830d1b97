#include "chaoslab/partition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace chaoslab {

CellPartition CellPartition::from_spec(const std::vector<std::pair<double, double>>& mass_tau) {
  if (mass_tau.empty()) throw std::invalid_argument("partition: needs at least one cell");
  CellPartition p;
  p.cells_.reserve(mass_tau.size());
  std::set<double> seen_tau;
  int id = 0;
  for (const auto& [mass, tau] : mass_tau) {
    if (!(mass > 0.0) || !std::isfinite(mass))
      throw std::invalid_argument("partition: cell mass must be positive and finite");
    if (!(tau > 0.0) || !(tau <= 1.0))
      throw std::invalid_argument("partition: tau must lie in (0, 1]");
    if (!seen_tau.insert(tau).second)
      throw std::invalid_argument("partition: duplicate tau " + std::to_string(tau));
    p.cells_.push_back(Cell{id, mass, tau});
    ++id;
  }
  p.masses_.resize(static_cast<Eigen::Index>(p.cells_.size()));
  double total = 0.0;
  for (size_t i = 0; i < p.cells_.size(); ++i) {
    p.masses_[static_cast<Eigen::Index>(i)] = p.cells_[i].mass;
    total += p.cells_[i].mass;  // fixed id order
  }
  p.total_mass_ = total;
  return p;
}

PartitionPtr build_partition(const std::vector<std::pair<double, double>>& spec) {
  return std::make_shared<const CellPartition>(CellPartition::from_spec(spec));
}

PartitionPtr parse_partition_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("cells") || !j["cells"].is_array())
    throw std::invalid_argument("partition json: missing \"cells\" array");
  std::vector<std::pair<double, double>> spec;
  for (const auto& c : j["cells"]) {
    spec.emplace_back(c.at("mass").get<double>(), c.at("tau").get<double>());
  }
  return build_partition(spec);
}

PartitionPtr load_partition_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open partition file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_partition_json(ss.str());
}

Resolution::Resolution(PartitionPtr partition, Direction direction)
    : partition_(std::move(partition)), direction_(direction) {
  if (!partition_) throw std::invalid_argument("resolution: null partition");
  std::vector<double> taus;
  taus.reserve(static_cast<size_t>(partition_->size()));
  for (const Cell& c : partition_->cells()) taus.push_back(c.tau);
  std::sort(taus.begin(), taus.end());
  double gap = taus.front();  // gap from 0 to the first entry time
  for (size_t i = 1; i < taus.size(); ++i) gap = std::min(gap, taus[i] - taus[i - 1]);
  reversal_gap_ = gap;
}

double Resolution::effective_tau(int id) const {
  const double tau = partition_->tau(id);
  return direction_ == Direction::forward ? tau : 1.0 - tau + reversal_gap_;
}

std::vector<int> Resolution::order() const {
  std::vector<int> ids(static_cast<size_t>(partition_->size()));
  for (size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  std::sort(ids.begin(), ids.end(),
            [this](int a, int b) { return effective_tau(a) < effective_tau(b); });
  return ids;
}

std::vector<int> time_slice(const Resolution& resolution, double t) {
  if (!(t >= 0.0) || !(t <= 1.0)) throw std::invalid_argument("time_slice: t must lie in [0, 1]");
  std::vector<int> ids;
  const int n = resolution.partition().size();
  for (int id = 0; id < n; ++id) {
    if (resolution.effective_tau(id) <= t) ids.push_back(id);
  }
  return ids;
}

bool precedes(const Resolution& resolution, int a, int b) {
  return resolution.effective_tau(a) < resolution.effective_tau(b);
}

}  // namespace chaoslab
