#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace chaoslab {

inline constexpr const char* kCsvHeader = "# chaoslab v0.1.0 schema=1";

/// Thrown for malformed configuration or unreadable input files (exit 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when an emitted value fails the NaN/overflow guard (exit 3).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct McStats {
  double mean = 0.0;
  double std_error = 0.0;
};

struct McStatsComplex {
  std::complex<double> mean;
  double std_error = 0.0;  // sqrt(se_re^2 + se_im^2)
};

/// Chunked fixed-order reduction: values are summed per chunk of `chunk`
/// consecutive trials and the chunk partials are combined in index order, so
/// the result depends only on the stored per-trial values, never on how the
/// trials were scheduled. Standard error is sample std / sqrt(count).
McStats mc_aggregate(std::span<const double> values, int chunk = 4096);
McStatsComplex mc_aggregate(std::span<const std::complex<double>> values, int chunk = 4096);

/// Sample variance with its own (moment-based) standard error.
struct VarianceStats {
  double variance = 0.0;
  double std_error = 0.0;
};
VarianceStats mc_variance(std::span<const double> values, int chunk = 4096);

/// Covariance of paired samples with standard error.
struct CovarianceStats {
  double covariance = 0.0;
  double std_error = 0.0;
};
CovarianceStats mc_covariance(std::span<const double> x, std::span<const double> y,
                              int chunk = 4096);

/// Runs per_trial(t) for t in [0, n_trials) across `workers` threads. Trials
/// are claimed in fixed chunks by an atomic cursor; per_trial must write its
/// result into caller-owned storage indexed by t if one is needed.
void parallel_trials(int64_t n_trials, int workers,
                     const std::function<void(int64_t)>& per_trial, int64_t chunk = 1024);

/// Symmetric grid of `count` points from min to max (count >= 1).
Eigen::VectorXd lambda_grid(double min, double max, int count);
Eigen::VectorXd parse_lambda_spec(const std::string& spec);  // "min:max:count"

/// Deterministic CSV sink: a schema comment line, a column header, then rows
/// printed with %.17g so byte output is a pure function of the values.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  void add_row(std::span<const double> values);
  void add_row(std::span<const std::string> values);
  /// Throws NumericalError if any numeric cell is non-finite (unless the
  /// column is declared nullable via a trailing '?').
  std::string str() const;
  void write(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<bool> nullable_;
};

std::string format_double(double v);

struct RunConfig {
  std::string subcommand;             // lk | simulate | chaos-check | poc-verify | clt | scenario
  std::string scenario;               // block | switching (for scenario/poc-verify subcommands)
  std::string partition_path;
  std::string kernel_path;
  std::string law = "cpoisson";
  std::vector<int> n_list;
  int64_t trials = 1;
  uint64_t seed = 0;
  std::string lambda_spec = "-3:3:21";
  std::string out_path;               // empty = stdout
  int workers = 1;
  int steps = 2000;                   // switching scenario grid
  int subcells = 64;                  // block scenario refinement
};

/// Executes one subcommand; returns a process exit status:
/// 0 ok, 1 config parse, 2 precondition violation, 3 numerical guard.
int run(const RunConfig& config);

}  // namespace chaoslab
