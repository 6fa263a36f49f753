#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailband/distributed.hpp"
#include "tailband/distributions.hpp"
#include "tailband/estimators.hpp"

namespace tailband {

struct GridSpec {
  double start = 0.0;
  double stop = 1.0;
  std::size_t count = 50;
};

/// count log-spaced points with both endpoints included exactly.
std::vector<double> log_spaced_grid(const GridSpec& spec);

/// count evenly spaced points on (start, stop]: start excluded, stop
/// included exactly.
std::vector<double> left_open_grid(const GridSpec& spec);

/// One Monte Carlo scenario: J machines of m observations each, d
/// exceedances per machine, so the oracle estimator uses k = J*d exceedances
/// of the pooled sample of N = J*m.
struct ScenarioConfig {
  DistributionSpec distribution;
  std::size_t machines = 1;      // J
  std::size_t machine_size = 2;  // m
  std::size_t exceedances = 1;   // d
  std::vector<EstimatorKind> estimators{EstimatorKind::hill};
  std::optional<double> quantile_p;  // Weissman target exceedance probability
  std::size_t replications = 1;      // R
  std::uint64_t master_seed = 0;
  GridSpec xgrid{1.0, 10.0, 50};   // log-spaced, for the tail empirical process
  GridSpec sgrid{0.02, 1.0, 50};   // left-open, for the tail quantile process
  bool quantile_log_mean = false;
  std::string output_dir = "./out";

  std::size_t pooled_size() const { return machines * machine_size; }  // N
  std::size_t oracle_k() const { return machines * exceedances; }      // k = J*d

  /// Throws std::invalid_argument on any invariant violation.
  void validate() const;
};

enum class Mode { distributed, oracle };

const char* mode_name(Mode mode);

struct EstimateRecord {
  std::size_t rep = 0;
  EstimatorKind estimator = EstimatorKind::hill;
  Mode mode = Mode::distributed;
  double value = 0.0;  // NaN when failed
  bool failed = false;
  std::string reason;
};

enum class ProcessKind { empirical, quantile };

const char* process_name(ProcessKind kind);

struct CurveRecord {
  std::size_t rep = 0;
  ProcessKind process = ProcessKind::empirical;
  Mode mode = Mode::distributed;
  double grid_point = 0.0;
  double value = 0.0;
};

struct RunOptions {
  unsigned threads = 0;  // 0: hardware parallelism
  bool curves = false;   // also emit per-replication process curves
};

struct ScenarioResult {
  std::vector<EstimateRecord> records;
  std::vector<CurveRecord> curves;
};

/// Runs R replications.  Each replication draws J machine samples from
/// streams (master_seed, rep*J + j), evaluates every configured estimator in
/// distributed and oracle form on the same data, and records failures
/// instead of throwing.  Replications run in parallel; the output is
/// identical for every thread count.
ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts = {});

struct SummaryRow {
  EstimatorKind estimator = EstimatorKind::hill;
  Mode mode = Mode::distributed;
  std::size_t count = 0;     // non-failed replications
  std::size_t failures = 0;
  double mean = 0.0;
  double bias = 0.0;   // mean - truth
  double sd = 0.0;     // population convention (divide by count)
  double rmse = 0.0;   // sqrt(bias^2 + sd^2), exact by construction
  double ks_normal = 0.0;  // KS of sqrt(effective_k)(v - truth)/truth vs N(0,1)
};

/// Per-(estimator, mode) Monte Carlo summaries of the given records, all
/// sharing one truth (the true gamma, or the true quantile for Weissman).
/// effective_k = J*d drives the ks_normal standardization.  Throws if a
/// group has no non-failed record.
std::vector<SummaryRow> summarize(std::span<const EstimateRecord> records, double truth,
                                  std::size_t effective_k);

/// One-sample Kolmogorov-Smirnov distance
/// D = max_i max(i/n - F(x_(i)), F(x_(i)) - (i-1)/n).
double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf);

/// Two-sample Kolmogorov-Smirnov distance, evaluated at distinct values so
/// tied samples compare as equal.
double two_sample_ks(std::vector<double> first, std::vector<double> second);

struct OracleGapRow {
  EstimatorKind estimator = EstimatorKind::hill;
  std::size_t pairs = 0;
  double ks_two_sample = 0.0;
  double diff_mean = 0.0;  // mean of distributed - oracle
  double diff_sd = 0.0;
};

/// Pairs distributed and oracle values per replication and reports, per
/// estimator, the two-sample KS distance and the paired-difference summary.
/// Estimators without any complete pair are omitted; throws if none has one.
std::vector<OracleGapRow> oracle_gap(std::span<const EstimateRecord> records);

/// Standard normal CDF.
double normal_cdf(double x);

}  // namespace tailband
