#include "chaoslab/scenarios.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "chaoslab/rng.hpp"

namespace chaoslab {

BlockExample block_example_kernel(int n) {
  if (n < 1) throw std::invalid_argument("block_example_kernel: n >= 1 required");
  std::vector<std::pair<double, double>> spec;
  spec.reserve(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) {
    spec.emplace_back(1.0, static_cast<double>(j + 1) / static_cast<double>(n));
  }
  PartitionPtr partition = build_partition(spec);
  SymmetricKernel f(partition, 2);
  const double v = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    const std::array<int, 2> ids{j, j};
    f.set(std::span<const int>(ids.data(), 2), v);
  }
  return BlockExample{std::move(partition), std::move(f), n};
}

double block_example_closed_form(const MeasureSample& sample, int n) {
  if (sample.law != MeasureLaw::cpoisson)
    throw std::invalid_argument("block_example_closed_form: compensated Poisson law required");
  if (sample.partition->size() != n)
    throw std::invalid_argument("block_example_closed_form: partition size mismatch");
  const double root_half = 1.0 / std::sqrt(2.0);
  double acc = 0.0;
  for (int j = 0; j < n; ++j) {
    const double m = sample.increments[j];
    acc += root_half * (m * m - m - 1.0);
  }
  return acc / std::sqrt(static_cast<double>(n));
}

BlockExample block_refined_example(int n, int subcells) {
  if (n < 1 || subcells < 1)
    throw std::invalid_argument("block_refined_example: n, subcells >= 1 required");
  const int total = n * subcells;
  std::vector<std::pair<double, double>> spec;
  spec.reserve(static_cast<size_t>(total));
  for (int c = 0; c < total; ++c) {
    spec.emplace_back(1.0 / subcells, static_cast<double>(c + 1) / static_cast<double>(total));
  }
  PartitionPtr partition = build_partition(spec);
  SymmetricKernel f(partition, 2);
  const double v = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    for (int s = 0; s < subcells; ++s) {
      for (int s2 = s; s2 < subcells; ++s2) {
        const std::array<int, 2> ids{j * subcells + s, j * subcells + s2};
        f.set(std::span<const int>(ids.data(), 2), v);
      }
    }
  }
  return BlockExample{std::move(partition), std::move(f), n};
}

BrownianPath simulate_brownian_path(int steps, uint64_t seed, uint64_t trial, uint32_t stream) {
  if (steps < 1) throw std::invalid_argument("brownian path: steps >= 1 required");
  BrownianPath path;
  path.steps = steps;
  path.increments.resize(steps);
  path.values.resize(steps + 1);
  const double scale = 1.0 / std::sqrt(static_cast<double>(steps));
  const uint32_t tag = stream_tag::with_copy(stream_tag::kBrownianStep, stream);
  for (int k = 0; k < steps; ++k) {
    CounterRng rng(seed, trial, static_cast<uint32_t>(k), tag);
    path.increments[k] = scale * rng.next_normal();
  }
  path.values[0] = 0.0;
  for (int k = 0; k < steps; ++k) path.values[k + 1] = path.values[k] + path.increments[k];
  path.terminal = path.values[steps];
  return path;
}

BrownianPath reverse_path(const BrownianPath& path) {
  BrownianPath out;
  out.steps = path.steps;
  out.increments.resize(path.steps);
  out.values.resize(path.steps + 1);
  for (int k = 0; k < path.steps; ++k) out.increments[k] = path.increments[path.steps - 1 - k];
  out.values[0] = 0.0;
  for (int k = 0; k < path.steps; ++k) out.values[k + 1] = out.values[k] + out.increments[k];
  out.terminal = out.values[path.steps];
  return out;
}

SwitchingWeights SwitchingWeights::make(int n, int steps) {
  if (n < 1) throw std::invalid_argument("switching weights: n >= 1 required");
  if (steps < 100) throw std::invalid_argument("switching weights: needs steps >= 100");
  SwitchingWeights w;
  w.n = n;
  w.steps = steps;
  w.pow_2n.resize(steps + 1);
  w.pow_2n1.resize(steps);
  w.pow_4n2.resize(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) / steps;
    w.pow_2n[k] = std::pow(t, 2.0 * n);
    w.pow_4n2[k] = std::pow(t, 4.0 * n + 2.0);
    if (k < steps) w.pow_2n1[k] = std::pow(t, 2.0 * n + 1.0);
  }
  return w;
}

SwitchingDraw switching_draw(const BrownianPath& base, const BrownianPath& path,
                             const SwitchingWeights& weights) {
  const int m = weights.steps;
  const int n = weights.n;
  const double w1sq = path.terminal * path.terminal;

  // Trapezoid rule for t^{2n} [(W_1)^2 - (W_t)^2]; the integrand vanishes at
  // both endpoints.
  double acc = 0.0;
  double prev = 0.0;
  for (int k = 1; k <= m; ++k) {
    const double cur = weights.pow_2n[k] * (w1sq - path.values[k] * path.values[k]);
    acc += 0.5 * (prev + cur);
    prev = cur;
  }
  SwitchingDraw draw;
  draw.w1 = base.terminal;
  draw.a_prime = std::sqrt(static_cast<double>(n)) * (2.0 * n + 1.0) * acc / m;

  // Reduction route: 2 sqrt(n) * sum W_t t^{2n+1} dW over the same grid plus
  // the explicit sqrt(n)/(2n+2) remainder.
  double ito = 0.0;
  for (int k = 0; k < m; ++k) {
    ito += path.values[k] * weights.pow_2n1[k] * path.increments[k];
  }
  draw.ito_sum = 2.0 * std::sqrt(static_cast<double>(n)) * ito +
                 std::sqrt(static_cast<double>(n)) / (2.0 * n + 2.0);
  draw.gap = draw.a_prime - draw.ito_sum;
  return draw;
}

double switching_norm_limit(const BrownianPath& path, const SwitchingWeights& weights) {
  const int m = weights.steps;
  double acc = 0.0;
  double prev = 0.0;
  for (int k = 1; k <= m; ++k) {
    const double cur = weights.pow_4n2[k] * path.values[k] * path.values[k];
    acc += 0.5 * (prev + cur);
    prev = cur;
  }
  return 4.0 * weights.n * acc / m;
}

SwitchingDraw simulate_switching_functional(int n, int steps, uint64_t seed, uint64_t trial) {
  const SwitchingWeights weights = SwitchingWeights::make(n, steps);
  const BrownianPath base = simulate_brownian_path(steps, seed, trial);
  const BrownianPath path = (n % 2 == 1) ? base : reverse_path(base);
  return switching_draw(base, path, weights);
}

std::complex<double> switching_target_cf(double gamma, double lambda) {
  const double s = 1.0 + lambda * lambda;
  return {std::exp(-0.5 * gamma * gamma / s) / std::sqrt(s), 0.0};
}

double switching_norm_limit(const BrownianPath& path, int n) {
  const int m = path.steps;
  double acc = 0.0;
  double prev = 0.0;
  for (int k = 1; k <= m; ++k) {
    const double t = static_cast<double>(k) / m;
    const double cur = std::pow(t, 4.0 * n + 2.0) * path.values[k] * path.values[k];
    acc += 0.5 * (prev + cur);
    prev = cur;
  }
  return 4.0 * n * acc / m;
}

namespace {

// Lazily built shared fixtures keyed by n; construction happens at most once
// per key, lookups afterwards are lock-protected pointer reads.
template <typename T>
class KeyedCache {
 public:
  template <typename Fn>
  std::shared_ptr<const T> get(int key, Fn&& build) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto value = std::make_shared<const T>(build());
    cache_.emplace(key, value);
    return value;
  }

 private:
  std::mutex mutex_;
  std::map<int, std::shared_ptr<const T>> cache_;
};

}  // namespace

PocScenario block_clt_scenario(int subcells) {
  if (subcells < 1) throw std::invalid_argument("block_clt_scenario: subcells >= 1 required");
  auto partitions = std::make_shared<KeyedCache<PartitionPtr>>();
  PocScenario scenario;
  scenario.name = "block";
  scenario.make_pair = [partitions, subcells](int n, uint64_t seed, uint64_t trial) {
    PartitionPtr partition = *partitions->get(n, [&] {
      const int total = n * subcells;
      std::vector<std::pair<double, double>> spec;
      spec.reserve(static_cast<size_t>(total));
      for (int c = 0; c < total; ++c) {
        spec.emplace_back(1.0 / subcells, static_cast<double>(c + 1) / static_cast<double>(total));
      }
      return build_partition(spec);
    });
    const double v = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
    IntegrandSpec spec;
    spec.name = "block adapted integrand";
    spec.t_boundary = 0.0;
    // h(c) = 2 v * (partial sum of earlier increments in c's own block);
    // identical to the order-2 slice rule on the refined kernel.
    spec.phi = [v, subcells](int j, std::span<const double> prefix,
                             std::span<const int> order) {
      const int cell = order[static_cast<size_t>(j)];
      const int block_start = (cell / subcells) * subcells;
      double acc = 0.0;
      for (int jj = j - 1; jj >= 0 && order[static_cast<size_t>(jj)] >= block_start; --jj) {
        acc += prefix[static_cast<size_t>(jj)];
      }
      return 2.0 * v * acc;
    };
    const Resolution resolution(partition, Direction::forward);
    return build_tangent_pair(spec, partition, resolution, MeasureLaw::cpoisson, seed, trial);
  };
  scenario.phi_target = [](const TangentArrayPair&, double lambda) {
    return std::complex<double>(std::exp(-0.5 * lambda * lambda), 0.0);
  };
  return scenario;
}

PocScenario switching_scenario(int steps) {
  if (steps < 100) throw std::invalid_argument("switching_scenario: needs steps >= 100");
  auto partitions = std::make_shared<KeyedCache<PartitionPtr>>();
  auto powers = std::make_shared<KeyedCache<Eigen::VectorXd>>();
  PocScenario scenario;
  scenario.name = "switching";
  scenario.make_pair = [partitions, powers, steps](int n, uint64_t seed, uint64_t trial) {
    PartitionPtr partition = *partitions->get(0, [&] {
      std::vector<std::pair<double, double>> spec;
      spec.reserve(static_cast<size_t>(steps));
      for (int k = 0; k < steps; ++k) {
        spec.emplace_back(1.0 / steps, static_cast<double>(k + 1) / static_cast<double>(steps));
      }
      return build_partition(spec);
    });
    std::shared_ptr<const Eigen::VectorXd> pow_table = powers->get(n, [&] {
      Eigen::VectorXd p(steps);
      for (int k = 0; k < steps; ++k) {
        p[k] = std::pow(static_cast<double>(k) / steps, 2.0 * n + 1.0);
      }
      return p;
    });
    const double root_n = std::sqrt(static_cast<double>(n));
    IntegrandSpec spec;
    spec.name = "switching integrand";
    spec.t_boundary = std::pow(0.75, 1.0 / root_n);
    auto running = std::make_shared<double>(0.0);
    // u(t_j) = 2 sqrt(n) W_{t_j} t_j^{2n+1}; the running sum is the path value
    // at the j-th position of the (possibly reversed) resolution order.
    spec.phi = [pow_table, root_n, running](int j, std::span<const double> prefix,
                                            std::span<const int>) {
      if (j > 0) *running += prefix[static_cast<size_t>(j - 1)];
      return 2.0 * root_n * (*running) * (*pow_table)[j];
    };
    const Resolution resolution(partition,
                                n % 2 == 1 ? Direction::forward : Direction::reversed);
    return build_tangent_pair(spec, partition, resolution, MeasureLaw::gaussian, seed, trial);
  };
  scenario.phi_target = [](const TangentArrayPair& pair, double lambda) {
    const double w1 = pair.original.increments.sum();
    return std::complex<double>(std::exp(-0.5 * lambda * lambda * w1 * w1), 0.0);
  };
  return scenario;
}

PocScenario deterministic_control_scenario() {
  auto partitions = std::make_shared<KeyedCache<PartitionPtr>>();
  PocScenario scenario;
  scenario.name = "control";
  scenario.make_pair = [partitions](int, uint64_t seed, uint64_t trial) {
    PartitionPtr partition = *partitions->get(0, [&] {
      std::vector<std::pair<double, double>> spec;
      for (int k = 0; k < 8; ++k) {
        spec.emplace_back(0.125, static_cast<double>(k + 1) / 8.0);
      }
      return build_partition(spec);
    });
    IntegrandSpec spec;
    spec.name = "deterministic control";
    spec.t_boundary = 0.0;
    spec.phi = [](int, std::span<const double>, std::span<const int>) { return 1.0; };
    const Resolution resolution(partition, Direction::forward);
    return build_tangent_pair(spec, partition, resolution, MeasureLaw::gaussian, seed, trial);
  };
  scenario.phi_target = [](const TangentArrayPair&, double lambda) {
    return std::complex<double>(std::exp(-0.5 * lambda * lambda), 0.0);
  };
  return scenario;
}

}  // namespace chaoslab
