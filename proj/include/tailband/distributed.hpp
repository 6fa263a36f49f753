#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tailband/estimators.hpp"
#include "tailband/tailproc.hpp"

namespace tailband {

/// J machine shards of identical size m, the distributed storage of one
/// pooled sample of N = J*m observations.
class ShardedData {
 public:
  explicit ShardedData(std::vector<SortedSample> shards);

  std::size_t machines() const noexcept { return shards_.size(); }        // J
  std::size_t shard_size() const noexcept { return shards_[0].size(); }   // m
  const SortedSample& shard(std::size_t j) const { return shards_.at(j); }
  const std::vector<SortedSample>& shards() const noexcept { return shards_; }

 private:
  std::vector<SortedSample> shards_;
};

/// Splits a pooled sample into J contiguous blocks of size N/J in input
/// order and sorts each block.  J must divide N.
ShardedData partition(std::span<const double> pooled, std::size_t machines);

struct DcConfig {
  std::size_t exceedances = 1;     // d, tail size used on every machine
  bool quantile_log_mean = false;  // aggregate q ratios on the log scale
};

/// gamma_DC = (1/J) sum_j gamma_hat^{(j)}, each machine applying the kind
/// estimator to its own shard with k = d.  Machine estimates are averaged in
/// sorted order, so the result does not depend on machine labelling.  Any
/// machine-level error aborts with the machine index in the message.
double distributed_point_estimate(const ShardedData& data, const DcConfig& cfg,
                                  EstimatorKind kind);

/// shat_DC(x) = (1/J) sum_j shat_d^{(j)}(x), each machine exceeding its own
/// threshold X^{(j)}_{m-d,m}.  Computed as (sum of machine exceedance
/// counts) / (J*d), which keeps min_j <= shat_DC <= max_j exact.
ProcessCurve distributed_tail_empirical_process(const ShardedData& data, const DcConfig& cfg,
                                                std::span<const double> xgrid);

/// q_DC(s) = (1/J) sum_j X^{(j)}_{m-floor(ds),m} / X^{(j)}_{m-d,m}, or the
/// geometric version exp{(1/J) sum_j log q^{(j)}(s)} when quantile_log_mean
/// is set.
ProcessCurve distributed_tail_quantile_process(const ShardedData& data, const DcConfig& cfg,
                                               std::span<const double> sgrid);

/// xhat_DC(p) = exp{(1/J) sum_j log X^{(j)}_{m-d,m}} * (d/(m p))^gamma_dc
/// for 0 < p <= d/m.  With J = 1 this reduces to weissman_quantile on the
/// single shard, bit for bit.
double distributed_weissman(const ShardedData& data, const DcConfig& cfg, double p,
                            double gamma_dc);

}  // namespace tailband
