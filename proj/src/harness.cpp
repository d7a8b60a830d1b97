#include "chaoslab/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "chaoslab/chaos.hpp"
#include "chaoslab/clt_suite.hpp"
#include "chaoslab/kernels.hpp"
#include "chaoslab/partition.hpp"
#include "chaoslab/poc.hpp"
#include "chaoslab/rmeasure.hpp"
#include "chaoslab/rng.hpp"
#include "chaoslab/scenarios.hpp"
#include "json.hpp"

namespace chaoslab {

namespace {

template <typename T>
double chunked_sum(std::span<const T> values, int chunk,
                   const std::function<double(const T&)>& term) {
  double total = 0.0;
  const size_t n = values.size();
  for (size_t start = 0; start < n; start += static_cast<size_t>(chunk)) {
    const size_t end = std::min(n, start + static_cast<size_t>(chunk));
    double partial = 0.0;
    for (size_t i = start; i < end; ++i) partial += term(values[i]);
    total += partial;
  }
  return total;
}

}  // namespace

McStats mc_aggregate(std::span<const double> values, int chunk) {
  if (values.empty()) throw std::invalid_argument("mc_aggregate: empty input");
  const double n = static_cast<double>(values.size());
  const double mean =
      chunked_sum<double>(values, chunk, [](const double& v) { return v; }) / n;
  if (values.size() == 1) return {mean, 0.0};
  const double ss = chunked_sum<double>(
      values, chunk, [mean](const double& v) { return (v - mean) * (v - mean); });
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

McStatsComplex mc_aggregate(std::span<const std::complex<double>> values, int chunk) {
  if (values.empty()) throw std::invalid_argument("mc_aggregate: empty input");
  const double n = static_cast<double>(values.size());
  const double re =
      chunked_sum<std::complex<double>>(values, chunk,
                                        [](const std::complex<double>& v) { return v.real(); }) /
      n;
  const double im =
      chunked_sum<std::complex<double>>(values, chunk,
                                        [](const std::complex<double>& v) { return v.imag(); }) /
      n;
  if (values.size() == 1) return {{re, im}, 0.0};
  const double ss = chunked_sum<std::complex<double>>(
      values, chunk, [re, im](const std::complex<double>& v) {
        const double dr = v.real() - re;
        const double di = v.imag() - im;
        return dr * dr + di * di;
      });
  return {{re, im}, std::sqrt(ss / (n - 1.0) / n)};
}

VarianceStats mc_variance(std::span<const double> values, int chunk) {
  if (values.size() < 2) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  const double mean =
      chunked_sum<double>(values, chunk, [](const double& v) { return v; }) / n;
  const double ss = chunked_sum<double>(
      values, chunk, [mean](const double& v) { return (v - mean) * (v - mean); });
  const double var = ss / (n - 1.0);
  const double m4 = chunked_sum<double>(values, chunk, [mean](const double& v) {
                      const double d = (v - mean) * (v - mean);
                      return d * d;
                    }) /
                    n;
  const double se_sq = std::max(0.0, (m4 - var * var) / n);
  return {var, std::sqrt(se_sq)};
}

CovarianceStats mc_covariance(std::span<const double> x, std::span<const double> y, int chunk) {
  if (x.size() != y.size()) throw std::invalid_argument("mc_covariance: length mismatch");
  if (x.size() < 2) return {0.0, 0.0};
  const double n = static_cast<double>(x.size());
  const McStats mx = mc_aggregate(x, chunk);
  const McStats my = mc_aggregate(y, chunk);
  std::vector<double> prod(x.size());
  for (size_t i = 0; i < x.size(); ++i) prod[i] = (x[i] - mx.mean) * (y[i] - my.mean);
  const McStats mp = mc_aggregate(std::span<const double>(prod), chunk);
  return {mp.mean * n / (n - 1.0), mp.std_error};
}

void parallel_trials(int64_t n_trials, int workers, const std::function<void(int64_t)>& per_trial,
                     int64_t chunk) {
  if (n_trials <= 0) return;
  workers = std::max(1, workers);
  if (workers == 1 || n_trials <= chunk) {
    for (int64_t t = 0; t < n_trials; ++t) per_trial(t);
    return;
  }
  std::atomic<int64_t> cursor{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int64_t start = cursor.fetch_add(chunk);
        if (start >= n_trials) return;
        const int64_t end = std::min(n_trials, start + chunk);
        try {
          for (int64_t t = start; t < end; ++t) per_trial(t);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

Eigen::VectorXd lambda_grid(double min, double max, int count) {
  if (count < 1) throw std::invalid_argument("lambda grid: count >= 1 required");
  Eigen::VectorXd grid(count);
  if (count == 1) {
    grid[0] = min;
    return grid;
  }
  for (int i = 0; i < count; ++i) {
    grid[i] = min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return grid;
}

Eigen::VectorXd parse_lambda_spec(const std::string& spec) {
  double lo = 0.0, hi = 0.0;
  int count = 0;
  char extra = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d%c", &lo, &hi, &count, &extra) != 3 || count < 1)
    throw ConfigError("bad lambda spec \"" + spec + "\" (expected min:max:count)");
  return lambda_grid(lo, hi, count);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::add_row(std::span<const double> values) {
  if (values.size() != columns_.size()) throw std::invalid_argument("csv: column count mismatch");
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) {
    if (!std::isfinite(v)) throw NumericalError("csv: non-finite value");
    row.push_back(format_double(v));
  }
  rows_.push_back(std::move(row));
}

void CsvWriter::add_row(std::span<const std::string> values) {
  if (values.size() != columns_.size()) throw std::invalid_argument("csv: column count mismatch");
  rows_.emplace_back(values.begin(), values.end());
}

std::string CsvWriter::str() const {
  std::string out = kCsvHeader;
  out += '\n';
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (i) out += ',';
    out += columns_[i];
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += row[i];
    }
    out += '\n';
  }
  return out;
}

void CsvWriter::write(const std::string& path) const {
  const std::string text = str();
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file: " + path);
  out << text;
}

namespace {

std::string checked(double v) {
  if (!std::isfinite(v)) throw NumericalError("non-finite value in report");
  return format_double(v);
}

PartitionPtr load_partition_checked(const std::string& path) {
  try {
    return load_partition_json(path);
  } catch (const std::invalid_argument&) {
    throw;  // domain violations keep their meaning (exit 2)
  } catch (const std::exception& e) {
    throw ConfigError(std::string("partition file ") + path + ": " + e.what());
  }
}

SymmetricKernel load_kernel_checked(const std::string& path, PartitionPtr partition) {
  try {
    return load_kernel_json(path, std::move(partition));
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("kernel file ") + path + ": " + e.what());
  }
}

// --law accepts either a name or a path to a JSON spec {"law":"cpoisson"}.
MeasureLaw resolve_law(const std::string& spec) {
  if (spec.size() > 5 && spec.rfind(".json") == spec.size() - 5) {
    std::ifstream in(spec);
    if (!in) throw ConfigError("cannot open law file: " + spec);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      const nlohmann::json j = nlohmann::json::parse(ss.str());
      return parse_law(j.at("law").get<std::string>());
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("law file ") + spec + ": " + e.what());
    }
  }
  return parse_law(spec);
}

int run_lk(const RunConfig& config) {
  PartitionPtr partition;
  if (!config.partition_path.empty()) partition = load_partition_checked(config.partition_path);
  if (config.kernel_path.empty()) throw ConfigError("lk: --kernel is required");
  const SymmetricKernel kernel = load_kernel_checked(config.kernel_path, partition);
  if (kernel.order() != 1) throw std::invalid_argument("lk: an order-1 kernel is required");
  const FirstOrderKernel h{kernel.partition_ptr(), kernel.vector()};
  const MeasureLaw law = resolve_law(config.law);
  const Eigen::VectorXd grid = parse_lambda_spec(config.lambda_spec);
  CsvWriter csv({"lambda", "re_psi", "im_psi"});
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const std::complex<double> psi = levy_exponent(law, h, grid[i]);
    csv.add_row(std::array<double, 3>{grid[i], psi.real(), psi.imag()});
  }
  csv.write(config.out_path);
  return 0;
}

int run_simulate(const RunConfig& config) {
  if (config.partition_path.empty()) throw ConfigError("simulate: --partition is required");
  PartitionPtr partition = load_partition_checked(config.partition_path);
  const MeasureLaw law = resolve_law(config.law);
  const int n = partition->size();
  std::vector<double> values(static_cast<size_t>(config.trials * n));
  parallel_trials(config.trials, config.workers, [&](int64_t t) {
    const MeasureSample s = sample_measure(partition, law, config.seed, static_cast<uint64_t>(t));
    for (int c = 0; c < n; ++c) values[static_cast<size_t>(t * n + c)] = s.increments[c];
  });
  CsvWriter csv({"trial", "cell", "increment"});
  for (int64_t t = 0; t < config.trials; ++t) {
    for (int c = 0; c < n; ++c) {
      csv.add_row(std::array<double, 3>{static_cast<double>(t), static_cast<double>(c),
                                        values[static_cast<size_t>(t * n + c)]});
    }
  }
  csv.write(config.out_path);
  return 0;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

// Deterministic random fixtures for the identity battery.
SymmetricKernel random_offdiag_kernel(PartitionPtr partition, uint64_t seed, uint32_t salt) {
  SymmetricKernel f(partition, 2, true);
  CounterRng rng(seed, 0, salt, stream_tag::kMeta);
  const int n = partition->size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const std::array<int, 2> ids{i, j};
      f.set(std::span<const int>(ids.data(), 2), 2.0 * rng.next_u01() - 1.0);
    }
  }
  return f;
}

SymmetricKernel permsimple_pair(PartitionPtr partition, int a, int b, double value) {
  SymmetricKernel f(partition, 2, true);
  const std::array<int, 2> ids{a, b};
  f.set(std::span<const int>(ids.data(), 2), value);
  return f;
}

int run_chaos_check(const RunConfig& config) {
  struct Check {
    std::string name;
    std::function<double(int64_t trial)> rel_err_at;  // per-trial relative error
  };
  PartitionPtr p5 = build_partition({{1.0, 0.1}, {0.7, 0.3}, {1.3, 0.5}, {0.9, 0.7}, {1.1, 0.9}});
  const uint64_t seed = config.seed;

  SymmetricKernel f1(p5, 1);
  SymmetricKernel g1(p5, 1);
  {
    Eigen::VectorXd fv(5), gv(5);
    fv << 1.0, -0.5, 2.0, 0.0, 0.3;
    gv << 0.7, 1.2, -1.0, 0.4, 0.0;
    f1 = SymmetricKernel::from_vector(p5, fv);
    g1 = SymmetricKernel::from_vector(p5, gv);
  }
  const SymmetricKernel f2 = permsimple_pair(p5, 0, 1, 0.8);
  const SymmetricKernel g2_overlap = permsimple_pair(p5, 1, 2, -1.1);
  const SymmetricKernel g2_disjoint = permsimple_pair(p5, 2, 3, 0.6);
  const SymmetricKernel f2_rand = random_offdiag_kernel(p5, seed, 11);
  const SymmetricKernel g2_rand = random_offdiag_kernel(p5, seed, 12);

  const BlockExample block = block_example_kernel(16);
  const ChaosEvaluator block_eval(block.kernel);

  PartitionPtr p8 = build_partition({{1.0, 0.15},
                                     {0.5, 0.25},
                                     {2.0, 0.35},
                                     {0.8, 0.45},
                                     {1.2, 0.55},
                                     {0.6, 0.65},
                                     {1.5, 0.75},
                                     {0.9, 0.85}});
  const SymmetricKernel co_kernel = random_offdiag_kernel(p8, seed, 21);
  const ChaosEvaluator co_eval(co_kernel);
  const Resolution forward(p8, Direction::forward);
  const Resolution reversed(p8, Direction::reversed);

  auto pf = [&](const SymmetricKernel& f, const SymmetricKernel& g, int64_t t) {
    const MeasureSample s = sample_measure(p5, MeasureLaw::cpoisson, seed, static_cast<uint64_t>(t));
    const auto [lhs, rhs] = product_formula_check(s, f, g);
    return rel_err(lhs, rhs);
  };

  std::vector<Check> checks;
  checks.push_back({"product_formula_p1q1", [&](int64_t t) { return pf(f1, g1, t); }});
  checks.push_back({"product_formula_p2q2_overlap",
                    [&](int64_t t) { return pf(f2, g2_overlap, t); }});
  checks.push_back({"product_formula_p2q2_disjoint",
                    [&](int64_t t) { return pf(f2, g2_disjoint, t); }});
  checks.push_back({"product_formula_p2q2_random",
                    [&](int64_t t) { return pf(f2_rand, g2_rand, t); }});
  checks.push_back({"product_formula_p1q2", [&](int64_t t) { return pf(f1, f2_rand, t); }});
  checks.push_back({"block_closed_form", [&](int64_t t) {
                      const MeasureSample s = sample_measure(block.partition, MeasureLaw::cpoisson,
                                                             seed, static_cast<uint64_t>(t));
                      return rel_err(block_eval(s), block_example_closed_form(s, block.n));
                    }});
  auto clark_ocone = [&](const Resolution& res, MeasureLaw law, int64_t t) {
    const MeasureSample s = sample_measure(p8, law, seed, static_cast<uint64_t>(t));
    const AdaptedIntegrand u = adapted_integrand(co_kernel, res, s);
    return rel_err(adapted_integral(u, s), co_eval(s));
  };
  checks.push_back({"clark_ocone_forward_cpoisson",
                    [&](int64_t t) { return clark_ocone(forward, MeasureLaw::cpoisson, t); }});
  checks.push_back({"clark_ocone_reversed_cpoisson",
                    [&](int64_t t) { return clark_ocone(reversed, MeasureLaw::cpoisson, t); }});
  checks.push_back({"clark_ocone_forward_gaussian",
                    [&](int64_t t) { return clark_ocone(forward, MeasureLaw::gaussian, t); }});

  CsvWriter csv({"check", "trials", "max_rel_err", "mean_rel_err"});
  for (const Check& check : checks) {
    std::vector<double> errs(static_cast<size_t>(config.trials));
    parallel_trials(config.trials, config.workers,
                    [&](int64_t t) { errs[static_cast<size_t>(t)] = check.rel_err_at(t); });
    double max_err = 0.0;
    for (double e : errs) max_err = std::max(max_err, e);
    const McStats mean = mc_aggregate(std::span<const double>(errs));
    const std::array<std::string, 4> row{check.name, format_double(static_cast<double>(config.trials)),
                                         checked(max_err), checked(mean.mean)};
    csv.add_row(std::span<const std::string>(row.data(), row.size()));
  }
  csv.write(config.out_path);
  return 0;
}

PocScenario scenario_by_name(const RunConfig& config) {
  if (config.scenario == "block") return block_clt_scenario(config.subcells);
  if (config.scenario == "switching") return switching_scenario(config.steps);
  if (config.scenario == "control") return deterministic_control_scenario();
  throw ConfigError("unknown scenario \"" + config.scenario +
                    "\" (expected block, switching or control)");
}

int run_poc_verify(const RunConfig& config) {
  if (config.n_list.empty()) throw ConfigError("poc-verify: --n-list is required");
  const PocScenario scenario = scenario_by_name(config);
  const Eigen::VectorXd grid = parse_lambda_spec(config.lambda_spec);
  const PocReport report = poc_verdict(scenario, config.n_list, grid, config.trials, config.seed,
                                       config.workers);
  CsvWriter csv({"n", "lambda", "metric", "value", "std_err"});
  for (const PocRow& row : report.rows) {
    const std::array<std::string, 5> cells{format_double(static_cast<double>(row.n)),
                                           format_double(row.lambda), row.metric,
                                           checked(row.value), checked(row.std_err)};
    csv.add_row(std::span<const std::string>(cells.data(), cells.size()));
  }
  csv.write(config.out_path);
  return 0;
}

int run_clt(const RunConfig& config) {
  if (config.n_list.empty()) throw ConfigError("clt: --n-list is required");
  std::function<SymmetricKernel(int)> family;
  if (config.scenario.empty() || config.scenario == "block") {
    family = [](int n) { return block_example_kernel(n).kernel; };
  } else if (config.scenario == "negative-control") {
    // A fixed two-cell kernel: the normalization holds but the contractions
    // do not vanish, so the KS distance plateaus.
    family = [](int) {
      PartitionPtr p = build_partition({{1.0, 0.4}, {1.0, 0.8}});
      SymmetricKernel f(p, 2, true);
      const std::array<int, 2> ids{0, 1};
      f.set(std::span<const int>(ids.data(), 2), 0.5);
      return f;
    };
  } else {
    throw ConfigError("clt: unknown family \"" + config.scenario + "\"");
  }
  CltOptions options;
  options.workers = config.workers;
  options.poc_lambda_grid = lambda_grid(-3.0, 3.0, 7);
  options.poc_trials = std::min<int64_t>(config.trials, 5000);
  if (config.scenario.empty() || config.scenario == "block") {
    const PocScenario poc = block_clt_scenario(config.subcells);
    options.poc_pairs = poc.make_pair;
  }
  const CltReport report = clt_pipeline(family, config.n_list, config.trials, config.seed, options);

  CsvWriter csv({"n", "metric", "analytic_value", "mc_value", "std_err"});
  auto analytic_row = [&](int n, const std::string& metric, double value) {
    const std::array<std::string, 5> cells{format_double(n), metric, checked(value), "", ""};
    csv.add_row(std::span<const std::string>(cells.data(), cells.size()));
  };
  auto mc_row = [&](int n, const std::string& metric, double value, double se) {
    const std::array<std::string, 5> cells{format_double(n), metric, "", checked(value),
                                           checked(se)};
    csv.add_row(std::span<const std::string>(cells.data(), cells.size()));
  };
  for (const CltRecord& rec : report.records) {
    analytic_row(rec.n, "norm_half", rec.assumption_n.norm_half);
    analytic_row(rec.n, "integrability", rec.assumption_n.integrability);
    analytic_row(rec.n, "fourth_power_integral", rec.assumption_n.fourth_power);
    analytic_row(rec.n, "gstar_c11", rec.gstar1);
    analytic_row(rec.n, "gstar_c21", rec.gstar2);
    mc_row(rec.n, "fourth_moment", rec.fourth_moment, rec.fourth_moment_se);
    mc_row(rec.n, "ks_to_normal", rec.ks, 0.0);
    analytic_row(rec.n, "findev_rhs", rec.findev_rhs);
    mc_row(rec.n, "findev_lhs", rec.findev_lhs, rec.findev_lhs_se);
    if (!rec.poc_by_lambda.empty()) mc_row(rec.n, "poc_distance", rec.poc_distance, 0.0);
    for (size_t i = 0; i < rec.tail_moment.size(); ++i) {
      mc_row(rec.n, "tail_moment_" + format_double(options.tail_cuts[i]), rec.tail_moment[i],
             0.0);
    }
  }
  csv.write(config.out_path);
  return 0;
}

int run_scenario_block(const RunConfig& config) {
  if (config.n_list.empty()) throw ConfigError("scenario block: --n-list is required");
  CsvWriter csv({"n", "metric", "value", "std_err"});
  auto row = [&](int n, const std::string& metric, double value, double se) {
    const std::array<std::string, 4> cells{format_double(n), metric, checked(value), checked(se)};
    csv.add_row(std::span<const std::string>(cells.data(), cells.size()));
  };
  for (int n : config.n_list) {
    const BlockExample block = block_example_kernel(n);
    const AssumptionNRecord rec = check_assumption_n(block.kernel);
    const auto [c11, c21] = check_gstar(block.kernel);
    row(n, "norm_half", rec.norm_half, 0.0);
    row(n, "fourth_power_integral", rec.fourth_power, 0.0);
    row(n, "gstar_c11", c11, 0.0);
    row(n, "gstar_c21", c21, 0.0);

    const ChaosEvaluator eval(block.kernel);
    std::vector<double> values(static_cast<size_t>(config.trials));
    std::vector<double> gap(static_cast<size_t>(config.trials));
    parallel_trials(config.trials, config.workers, [&](int64_t t) {
      const MeasureSample s = sample_measure(block.partition, MeasureLaw::cpoisson, config.seed,
                                             static_cast<uint64_t>(t));
      const double direct = eval(s);
      values[static_cast<size_t>(t)] = direct;
      gap[static_cast<size_t>(t)] = rel_err(direct, block_example_closed_form(s, n));
    });
    double max_gap = 0.0;
    for (double g : gap) max_gap = std::max(max_gap, g);
    const McStats mean = mc_aggregate(std::span<const double>(values));
    const VarianceStats var = mc_variance(std::span<const double>(values));
    row(n, "closed_vs_eval_max_rel", max_gap, 0.0);
    row(n, "mean", mean.mean, mean.std_error);
    row(n, "variance", var.variance, var.std_error);
    row(n, "ks_to_normal", ks_to_normal(values), 0.0);
  }
  csv.write(config.out_path);
  return 0;
}

int run_scenario_switching(const RunConfig& config) {
  if (config.n_list.empty()) throw ConfigError("scenario switching: --n-list is required");
  const std::vector<double> gammas = {0.0, 1.0};
  const std::vector<double> lambdas = {0.5, 1.0, 2.0};
  CsvWriter csv({"n", "gamma", "lambda", "metric", "value", "std_err"});
  auto row = [&](int n, double gamma, double lambda, const std::string& metric, double value,
                 double se) {
    const std::array<std::string, 6> cells{format_double(n),     format_double(gamma),
                                           format_double(lambda), metric,
                                           checked(value),        checked(se)};
    csv.add_row(std::span<const std::string>(cells.data(), cells.size()));
  };
  const size_t n_count = config.n_list.size();
  std::vector<SwitchingWeights> weights;
  weights.reserve(n_count);
  for (int n : config.n_list) weights.push_back(SwitchingWeights::make(n, config.steps));

  // One path per trial serves every n; even n reuse the reversed copy.
  std::vector<std::vector<double>> a_prime(n_count,
                                           std::vector<double>(static_cast<size_t>(config.trials)));
  std::vector<std::vector<double>> norm_gap(n_count,
                                            std::vector<double>(static_cast<size_t>(config.trials)));
  std::vector<std::vector<double>> route_gap(n_count,
                                             std::vector<double>(static_cast<size_t>(config.trials)));
  std::vector<double> w1(static_cast<size_t>(config.trials));
  parallel_trials(config.trials, config.workers, [&](int64_t t) {
    const BrownianPath base =
        simulate_brownian_path(config.steps, config.seed, static_cast<uint64_t>(t));
    const BrownianPath reversed = reverse_path(base);
    w1[static_cast<size_t>(t)] = base.terminal;
    for (size_t i = 0; i < n_count; ++i) {
      const int n = config.n_list[i];
      const BrownianPath& path = (n % 2 == 1) ? base : reversed;
      const SwitchingDraw draw = switching_draw(base, path, weights[i]);
      a_prime[i][static_cast<size_t>(t)] = draw.a_prime;
      route_gap[i][static_cast<size_t>(t)] = std::abs(draw.gap);
      norm_gap[i][static_cast<size_t>(t)] =
          std::abs(switching_norm_limit(path, weights[i]) - draw.w1 * draw.w1);
    }
  });

  for (size_t i = 0; i < n_count; ++i) {
    const int n = config.n_list[i];
    double wcf_max = 0.0;
    for (double gamma : gammas) {
      std::vector<std::complex<double>> z(static_cast<size_t>(config.trials));
      for (int64_t t = 0; t < config.trials; ++t) {
        z[static_cast<size_t>(t)] =
            std::exp(std::complex<double>(0.0, gamma * w1[static_cast<size_t>(t)]));
      }
      Eigen::VectorXd grid(static_cast<Eigen::Index>(lambdas.size()));
      for (size_t k = 0; k < lambdas.size(); ++k) grid[static_cast<Eigen::Index>(k)] = lambdas[k];
      const CharFnEstimate est = estimate_stable_cf(std::span<const double>(a_prime[i]),
                                                    std::span<const std::complex<double>>(z), grid);
      for (size_t k = 0; k < lambdas.size(); ++k) {
        const double dist =
            std::abs(est.values[static_cast<Eigen::Index>(k)] -
                     switching_target_cf(gamma, lambdas[k]));
        wcf_max = std::max(wcf_max, dist);
        row(n, gamma, lambdas[k], "wcf_distance", dist,
            est.std_errors[static_cast<Eigen::Index>(k)]);
      }
    }
    row(n, 0.0, 0.0, "wcf_distance_max", wcf_max, 0.0);
    const McStats gap_stats = mc_aggregate(std::span<const double>(norm_gap[i]));
    row(n, 0.0, 0.0, "norm_limit_gap_mean", gap_stats.mean, gap_stats.std_error);
    const VarianceStats a_var = mc_variance(std::span<const double>(a_prime[i]));
    row(n, 0.0, 0.0, "a_prime_variance", a_var.variance, a_var.std_error);
    const McStats route = mc_aggregate(std::span<const double>(route_gap[i]));
    row(n, 0.0, 0.0, "route_gap_mean_abs", route.mean, route.std_error);
  }
  csv.write(config.out_path);
  return 0;
}

}  // namespace

int run(const RunConfig& config) {
  try {
    if (config.subcommand == "lk") return run_lk(config);
    if (config.subcommand == "simulate") return run_simulate(config);
    if (config.subcommand == "chaos-check") return run_chaos_check(config);
    if (config.subcommand == "poc-verify") return run_poc_verify(config);
    if (config.subcommand == "clt") return run_clt(config);
    if (config.subcommand == "scenario") {
      if (config.scenario == "block") return run_scenario_block(config);
      if (config.scenario == "switching") return run_scenario_switching(config);
      throw ConfigError("unknown scenario \"" + config.scenario + "\"");
    }
    throw ConfigError("unknown subcommand \"" + config.subcommand + "\"");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical guard: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "precondition violated: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace chaoslab
