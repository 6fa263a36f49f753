#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tailband {

/// Ascending sample with 1-based order statistics X_{1,n} <= ... <= X_{n,n}.
class SortedSample {
 public:
  /// Sorts the input; throws on an empty sample.
  explicit SortedSample(std::vector<double> values);

  /// Accepts already-ascending values; throws if they are not sorted.
  static SortedSample from_sorted(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }

  /// X_{i,n}, the i-th smallest value, 1 <= i <= n.
  double order(std::size_t i) const;

 private:
  struct sorted_tag {};
  SortedSample(std::vector<double> values, sorted_tag) : values_(std::move(values)) {}

  std::vector<double> values_;
};

/// Evaluations of a tail process on a strictly increasing grid.
struct ProcessCurve {
  std::vector<double> grid;
  std::vector<double> values;
};

struct Excesses {
  std::vector<double> raw;   // X_{n-k+i,n} - X_{n-k,n},         i = 1..k
  std::vector<double> logs;  // log X_{n-k+i,n} - log X_{n-k,n}, i = 1..k
};

/// Tail empirical process shat_k(x) = (1/k) #{i : X_i > X_{n-k,n} * x}
/// evaluated on xgrid (strictly increasing, all points >= 1).
ProcessCurve tail_empirical_process(const SortedSample& sample, std::size_t k,
                                    std::span<const double> xgrid);

/// Tail quantile process q_k(s) = X_{n-floor(ks),n} / X_{n-k,n} evaluated on
/// sgrid (strictly increasing, all points in (0, 1]).  The threshold
/// X_{n-k,n} must be positive.
ProcessCurve tail_quantile_process(const SortedSample& sample, std::size_t k,
                                   std::span<const double> sgrid);

/// Raw and log excesses over the intermediate order statistic X_{n-k,n},
/// both ascending.  The threshold must be positive since log excesses are
/// always produced.
Excesses threshold_excesses(const SortedSample& sample, std::size_t k);

/// floor(k*s), guarded against floating-point droop at exact multiples
/// (e.g. 1000 * 0.3 evaluating to 299.999...).
std::size_t quantile_level(std::size_t k, double s);

namespace detail {

/// #{v in values : v > cut} for an ascending vector.
std::size_t exceed_count(const std::vector<double>& values, double cut);

void check_k(std::size_t k, std::size_t n, const char* caller);
void check_xgrid(std::span<const double> grid, const char* caller);
void check_sgrid(std::span<const double> grid, const char* caller);

}  // namespace detail

}  // namespace tailband
