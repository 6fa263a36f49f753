#include "tailband/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <utility>

namespace tailband {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RepOutput {
  std::vector<EstimateRecord> records;
  std::vector<CurveRecord> curves;
};

struct RepContext {
  const ScenarioConfig& cfg;
  std::vector<double> xgrid;
  std::vector<double> sgrid;
  bool curves = false;
};

void append_curve(std::vector<CurveRecord>& out, std::size_t rep, ProcessKind process, Mode mode,
                  const ProcessCurve& curve) {
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out.push_back({rep, process, mode, curve.grid[i], curve.values[i]});
  }
}

RepOutput run_one_rep(const RepContext& ctx, std::size_t rep) {
  const ScenarioConfig& cfg = ctx.cfg;
  const std::size_t machines = cfg.machines;
  const std::size_t m = cfg.machine_size;
  const std::size_t k = cfg.oracle_k();

  std::vector<double> pooled;
  pooled.reserve(cfg.pooled_size());
  std::vector<SortedSample> shards;
  shards.reserve(machines);
  for (std::size_t j = 0; j < machines; ++j) {
    const RngStream stream{cfg.master_seed, derive_stream_id(rep, machines, j)};
    std::vector<double> draws = sample(cfg.distribution, m, stream);
    pooled.insert(pooled.end(), draws.begin(), draws.end());
    shards.emplace_back(std::move(draws));
  }
  const ShardedData data{std::move(shards)};
  const SortedSample oracle_sample{std::move(pooled)};
  const DcConfig dc{cfg.exceedances, cfg.quantile_log_mean};

  // Hill feeds the Weissman extrapolation; computed at most once per mode.
  std::optional<double> hill_dc, hill_or;
  auto hill_for = [&](Mode mode) {
    if (mode == Mode::distributed) {
      if (!hill_dc) hill_dc = distributed_point_estimate(data, dc, EstimatorKind::hill);
      return *hill_dc;
    }
    if (!hill_or) hill_or = hill(oracle_sample, k);
    return *hill_or;
  };
  auto estimate = [&](EstimatorKind kind, Mode mode) {
    if (kind == EstimatorKind::weissman_quantile) {
      const double p = *cfg.quantile_p;
      return mode == Mode::distributed
                 ? distributed_weissman(data, dc, p, hill_for(mode))
                 : weissman_quantile(oracle_sample, k, p, hill_for(mode));
    }
    if (mode == Mode::distributed) return distributed_point_estimate(data, dc, kind);
    switch (kind) {
      case EstimatorKind::hill: return hill(oracle_sample, k);
      case EstimatorKind::moment: return moment(oracle_sample, k);
      case EstimatorKind::pickands: return pickands(oracle_sample, k);
      case EstimatorKind::pwm_gpd: return pwm_gpd(oracle_sample, k);
      case EstimatorKind::weissman_quantile: break;
    }
    throw std::logic_error("estimate: unhandled estimator kind");
  };

  RepOutput out;
  out.records.reserve(cfg.estimators.size() * 2);
  for (EstimatorKind kind : cfg.estimators) {
    for (Mode mode : {Mode::distributed, Mode::oracle}) {
      EstimateRecord record;
      record.rep = rep;
      record.estimator = kind;
      record.mode = mode;
      try {
        record.value = estimate(kind, mode);
      } catch (const std::exception& e) {
        record.value = kNaN;
        record.failed = true;
        record.reason = e.what();
      }
      out.records.push_back(std::move(record));
    }
  }

  if (ctx.curves) {
    try {
      append_curve(out.curves, rep, ProcessKind::empirical, Mode::distributed,
                   distributed_tail_empirical_process(data, dc, ctx.xgrid));
      append_curve(out.curves, rep, ProcessKind::empirical, Mode::oracle,
                   tail_empirical_process(oracle_sample, k, ctx.xgrid));
      append_curve(out.curves, rep, ProcessKind::quantile, Mode::distributed,
                   distributed_tail_quantile_process(data, dc, ctx.sgrid));
      append_curve(out.curves, rep, ProcessKind::quantile, Mode::oracle,
                   tail_quantile_process(oracle_sample, k, ctx.sgrid));
    } catch (const std::exception&) {
      out.curves.clear();  // degenerate data; estimates above carry the reason
    }
  }
  return out;
}

}  // namespace

std::vector<double> log_spaced_grid(const GridSpec& spec) {
  if (spec.count == 0) throw std::invalid_argument("log_spaced_grid: count must be positive");
  if (!(spec.start > 0.0)) throw std::invalid_argument("log_spaced_grid: start must be positive");
  std::vector<double> grid(spec.count);
  if (spec.count == 1) {
    grid[0] = spec.start;
    return grid;
  }
  if (!(spec.stop > spec.start)) {
    throw std::invalid_argument("log_spaced_grid: stop must exceed start");
  }
  const double log_start = std::log(spec.start);
  const double log_stop = std::log(spec.stop);
  for (std::size_t i = 0; i < spec.count; ++i) {
    grid[i] = std::exp(log_start + (log_stop - log_start) * static_cast<double>(i) /
                                       static_cast<double>(spec.count - 1));
  }
  grid.front() = spec.start;
  grid.back() = spec.stop;
  return grid;
}

std::vector<double> left_open_grid(const GridSpec& spec) {
  if (spec.count == 0) throw std::invalid_argument("left_open_grid: count must be positive");
  if (!(spec.stop > spec.start)) {
    throw std::invalid_argument("left_open_grid: stop must exceed start");
  }
  std::vector<double> grid(spec.count);
  const double width = spec.stop - spec.start;
  for (std::size_t i = 0; i < spec.count; ++i) {
    grid[i] = spec.start + width * static_cast<double>(i + 1) / static_cast<double>(spec.count);
  }
  grid.back() = spec.stop;
  return grid;
}

const char* mode_name(Mode mode) {
  return mode == Mode::distributed ? "distributed" : "oracle";
}

const char* process_name(ProcessKind kind) {
  return kind == ProcessKind::empirical ? "empirical" : "quantile";
}

void ScenarioConfig::validate() const {
  if (machines < 1) throw std::invalid_argument("scenario: J (machine count) must be >= 1");
  if (machine_size < 2) throw std::invalid_argument("scenario: m (machine size) must be >= 2");
  if (exceedances < 1 || exceedances >= machine_size) {
    throw std::invalid_argument("scenario: d must satisfy 1 <= d < m");
  }
  if (replications < 1) throw std::invalid_argument("scenario: R (replications) must be >= 1");
  if (estimators.empty()) throw std::invalid_argument("scenario: estimator list is empty");
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    for (std::size_t j = i + 1; j < estimators.size(); ++j) {
      if (estimators[i] == estimators[j]) {
        throw std::invalid_argument(std::string("scenario: duplicate estimator '") +
                                    kind_name(estimators[i]) + "'");
      }
    }
  }
  const bool has_pickands =
      std::find(estimators.begin(), estimators.end(), EstimatorKind::pickands) != estimators.end();
  if (has_pickands && 4 * exceedances >= machine_size) {
    throw std::invalid_argument("scenario: pickands requires 4d < m");
  }
  const bool has_weissman =
      std::find(estimators.begin(), estimators.end(), EstimatorKind::weissman_quantile) !=
      estimators.end();
  if (has_weissman && !quantile_p) {
    throw std::invalid_argument("scenario: weissman_quantile requires quantile_p");
  }
  if (quantile_p) {
    const double bound = static_cast<double>(exceedances) / static_cast<double>(machine_size);
    if (!(*quantile_p > 0.0 && *quantile_p < bound)) {
      throw std::invalid_argument("scenario: quantile_p must lie in (0, d/m)");
    }
  }
  if (!(xgrid.start >= 1.0)) throw std::invalid_argument("scenario: xgrid must start at >= 1");
  if (xgrid.count == 0) throw std::invalid_argument("scenario: xgrid count must be positive");
  if (xgrid.count > 1 && !(xgrid.stop > xgrid.start)) {
    throw std::invalid_argument("scenario: xgrid stop must exceed start");
  }
  if (!(sgrid.start >= 0.0 && sgrid.stop <= 1.0 && sgrid.stop > sgrid.start)) {
    throw std::invalid_argument("scenario: sgrid must satisfy 0 <= start < stop <= 1");
  }
  if (sgrid.count == 0) throw std::invalid_argument("scenario: sgrid count must be positive");
}

ScenarioResult run_scenario(const ScenarioConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  RepContext ctx{cfg, {}, {}, opts.curves};
  if (opts.curves) {
    ctx.xgrid = log_spaced_grid(cfg.xgrid);
    ctx.sgrid = left_open_grid(cfg.sgrid);
  }

  const std::size_t reps = cfg.replications;
  std::vector<RepOutput> outputs(reps);
  unsigned workers = opts.threads != 0 ? opts.threads : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, reps));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t rep = next.fetch_add(1);
      if (rep >= reps) break;
      try {
        outputs[rep] = run_one_rep(ctx, rep);
      } catch (...) {
        const std::scoped_lock lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        break;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ScenarioResult result;
  result.records.reserve(reps * cfg.estimators.size() * 2);
  for (RepOutput& out : outputs) {
    std::move(out.records.begin(), out.records.end(), std::back_inserter(result.records));
    std::move(out.curves.begin(), out.curves.end(), std::back_inserter(result.curves));
  }
  return result;
}

std::vector<SummaryRow> summarize(std::span<const EstimateRecord> records, double truth,
                                  std::size_t effective_k) {
  if (!(truth > 0.0)) throw std::invalid_argument("summarize: truth must be positive");
  // group keys in first-appearance order
  std::vector<std::pair<EstimatorKind, Mode>> keys;
  for (const EstimateRecord& r : records) {
    const std::pair<EstimatorKind, Mode> key{r.estimator, r.mode};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  if (keys.empty()) throw std::invalid_argument("summarize: no records");

  std::vector<SummaryRow> rows;
  rows.reserve(keys.size());
  const double scale = std::sqrt(static_cast<double>(effective_k));
  for (const auto& [estimator, mode] : keys) {
    SummaryRow row;
    row.estimator = estimator;
    row.mode = mode;
    std::vector<double> values;
    for (const EstimateRecord& r : records) {
      if (r.estimator != estimator || r.mode != mode) continue;
      if (r.failed) {
        ++row.failures;
      } else {
        values.push_back(r.value);
      }
    }
    if (values.empty()) {
      throw std::invalid_argument(std::string("summarize: empty group (") +
                                  kind_name(estimator) + ", " + mode_name(mode) + ")");
    }
    row.count = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    row.mean = sum / static_cast<double>(values.size());
    row.bias = row.mean - truth;
    double ss = 0.0;
    for (double v : values) ss += (v - row.mean) * (v - row.mean);
    const double variance = ss / static_cast<double>(values.size());
    row.sd = std::sqrt(variance);
    row.rmse = std::sqrt(row.bias * row.bias + variance);
    std::vector<double> standardized(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      standardized[i] = scale * (values[i] - truth) / truth;
    }
    row.ks_normal = ks_statistic(std::move(standardized), normal_cdf);
    rows.push_back(std::move(row));
  }
  return rows;
}

double ks_statistic(std::vector<double> values, const std::function<double(double)>& cdf) {
  if (values.empty()) throw std::invalid_argument("ks_statistic: empty input");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = cdf(values[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double two_sample_ks(std::vector<double> first, std::vector<double> second) {
  if (first.empty() || second.empty()) {
    throw std::invalid_argument("two_sample_ks: both samples must be non-empty");
  }
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  const double na = static_cast<double>(first.size());
  const double nb = static_cast<double>(second.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < first.size() || j < second.size()) {
    const double v = (j >= second.size() || (i < first.size() && first[i] <= second[j]))
                         ? first[i]
                         : second[j];
    while (i < first.size() && first[i] <= v) ++i;
    while (j < second.size() && second[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

std::vector<OracleGapRow> oracle_gap(std::span<const EstimateRecord> records) {
  std::vector<EstimatorKind> kinds;
  for (const EstimateRecord& r : records) {
    if (std::find(kinds.begin(), kinds.end(), r.estimator) == kinds.end()) {
      kinds.push_back(r.estimator);
    }
  }
  std::vector<OracleGapRow> rows;
  for (EstimatorKind kind : kinds) {
    std::map<std::size_t, std::pair<std::optional<double>, std::optional<double>>> by_rep;
    for (const EstimateRecord& r : records) {
      if (r.estimator != kind || r.failed) continue;
      auto& slot = by_rep[r.rep];
      (r.mode == Mode::distributed ? slot.first : slot.second) = r.value;
    }
    std::vector<double> dist, orac, diffs;
    for (const auto& [rep, pair] : by_rep) {
      if (pair.first && pair.second) {
        dist.push_back(*pair.first);
        orac.push_back(*pair.second);
        diffs.push_back(*pair.first - *pair.second);
      }
    }
    if (dist.empty()) continue;  // no complete pair for this estimator
    OracleGapRow row;
    row.estimator = kind;
    row.pairs = dist.size();
    row.ks_two_sample = two_sample_ks(dist, orac);
    double sum = 0.0;
    for (double v : diffs) sum += v;
    row.diff_mean = sum / static_cast<double>(diffs.size());
    double ss = 0.0;
    for (double v : diffs) ss += (v - row.diff_mean) * (v - row.diff_mean);
    row.diff_sd = std::sqrt(ss / static_cast<double>(diffs.size()));
    rows.push_back(row);
  }
  if (rows.empty()) throw std::invalid_argument("oracle_gap: no complete (distributed, oracle) pairs");
  return rows;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace tailband
