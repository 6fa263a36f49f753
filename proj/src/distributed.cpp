#include "tailband/distributed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tailband {

namespace {

// Summing in sorted order makes the mean invariant under machine
// permutations (same multiset, same result).
double sorted_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

void check_dc(const ShardedData& data, const DcConfig& cfg, const char* caller) {
  detail::check_k(cfg.exceedances, data.shard_size(), caller);
}

double machine_estimate(const SortedSample& shard, std::size_t d, EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::hill: return hill(shard, d);
    case EstimatorKind::moment: return moment(shard, d);
    case EstimatorKind::pickands: return pickands(shard, d);
    case EstimatorKind::pwm_gpd: return pwm_gpd(shard, d);
    case EstimatorKind::weissman_quantile: break;
  }
  throw std::invalid_argument(
      "distributed_point_estimate: weissman_quantile requires distributed_weissman");
}

[[noreturn]] void rethrow_with_machine(std::size_t machine, const std::exception& e) {
  throw std::invalid_argument("machine " + std::to_string(machine) + ": " + e.what());
}

}  // namespace

ShardedData::ShardedData(std::vector<SortedSample> shards) : shards_(std::move(shards)) {
  if (shards_.empty()) throw std::invalid_argument("ShardedData: needs at least one machine");
  const std::size_t m = shards_.front().size();
  for (const SortedSample& shard : shards_) {
    if (shard.size() != m) {
      throw std::invalid_argument("ShardedData: machine shards must have identical size");
    }
  }
}

ShardedData partition(std::span<const double> pooled, std::size_t machines) {
  if (machines == 0) throw std::invalid_argument("partition: machine count must be positive");
  if (pooled.empty() || pooled.size() % machines != 0) {
    throw std::invalid_argument("partition: machine count must divide the pooled size");
  }
  const std::size_t m = pooled.size() / machines;
  std::vector<SortedSample> shards;
  shards.reserve(machines);
  for (std::size_t j = 0; j < machines; ++j) {
    shards.emplace_back(std::vector<double>(pooled.begin() + j * m, pooled.begin() + (j + 1) * m));
  }
  return ShardedData(std::move(shards));
}

double distributed_point_estimate(const ShardedData& data, const DcConfig& cfg,
                                  EstimatorKind kind) {
  check_dc(data, cfg, "distributed_point_estimate");
  std::vector<double> estimates(data.machines());
  for (std::size_t j = 0; j < data.machines(); ++j) {
    try {
      estimates[j] = machine_estimate(data.shard(j), cfg.exceedances, kind);
    } catch (const std::exception& e) {
      rethrow_with_machine(j, e);
    }
  }
  return sorted_mean(std::move(estimates));
}

ProcessCurve distributed_tail_empirical_process(const ShardedData& data, const DcConfig& cfg,
                                                std::span<const double> xgrid) {
  check_dc(data, cfg, "distributed_tail_empirical_process");
  detail::check_xgrid(xgrid, "distributed_tail_empirical_process");
  const std::size_t d = cfg.exceedances;
  const std::size_t m = data.shard_size();
  std::vector<std::size_t> total(xgrid.size(), 0);
  for (const SortedSample& shard : data.shards()) {
    const double threshold = shard.order(m - d);
    for (std::size_t i = 0; i < xgrid.size(); ++i) {
      total[i] += detail::exceed_count(shard.values(), threshold * xgrid[i]);
    }
  }
  const double denom = static_cast<double>(data.machines()) * static_cast<double>(d);
  ProcessCurve curve;
  curve.grid.assign(xgrid.begin(), xgrid.end());
  curve.values.reserve(xgrid.size());
  for (std::size_t count : total) {
    curve.values.push_back(static_cast<double>(count) / denom);
  }
  return curve;
}

ProcessCurve distributed_tail_quantile_process(const ShardedData& data, const DcConfig& cfg,
                                               std::span<const double> sgrid) {
  check_dc(data, cfg, "distributed_tail_quantile_process");
  detail::check_sgrid(sgrid, "distributed_tail_quantile_process");
  const std::size_t machines = data.machines();
  std::vector<ProcessCurve> per_machine;
  per_machine.reserve(machines);
  for (std::size_t j = 0; j < machines; ++j) {
    try {
      per_machine.push_back(tail_quantile_process(data.shard(j), cfg.exceedances, sgrid));
    } catch (const std::exception& e) {
      rethrow_with_machine(j, e);
    }
  }
  ProcessCurve curve;
  curve.grid.assign(sgrid.begin(), sgrid.end());
  curve.values.reserve(sgrid.size());
  std::vector<double> at_point(machines);
  for (std::size_t i = 0; i < sgrid.size(); ++i) {
    for (std::size_t j = 0; j < machines; ++j) {
      at_point[j] = cfg.quantile_log_mean ? std::log(per_machine[j].values[i])
                                          : per_machine[j].values[i];
    }
    const double mean = sorted_mean(at_point);
    curve.values.push_back(cfg.quantile_log_mean ? std::exp(mean) : mean);
  }
  return curve;
}

double distributed_weissman(const ShardedData& data, const DcConfig& cfg, double p,
                            double gamma_dc) {
  check_dc(data, cfg, "distributed_weissman");
  if (data.machines() == 1) {
    // exact reduction to the oracle form on the single shard
    return weissman_quantile(data.shard(0), cfg.exceedances, p, gamma_dc);
  }
  if (!(p > 0.0)) throw std::invalid_argument("distributed_weissman: p must be positive");
  const std::size_t m = data.shard_size();
  const double ratio =
      static_cast<double>(cfg.exceedances) / (static_cast<double>(m) * p);
  if (ratio < 1.0) {
    throw std::invalid_argument("distributed_weissman: p exceeds d/m (no extrapolation needed)");
  }
  std::vector<double> log_thresholds(data.machines());
  for (std::size_t j = 0; j < data.machines(); ++j) {
    const double threshold = data.shard(j).order(m - cfg.exceedances);
    if (!(threshold > 0.0)) {
      throw std::invalid_argument("distributed_weissman: machine " + std::to_string(j) +
                                  " has a non-positive threshold");
    }
    log_thresholds[j] = std::log(threshold);
  }
  return std::exp(sorted_mean(std::move(log_thresholds))) * std::pow(ratio, gamma_dc);
}

}  // namespace tailband
