#include "tailband/tailproc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tailband {

namespace detail {

std::size_t exceed_count(const std::vector<double>& values, double cut) {
  return static_cast<std::size_t>(values.end() -
                                  std::upper_bound(values.begin(), values.end(), cut));
}

void check_k(std::size_t k, std::size_t n, const char* caller) {
  if (k == 0 || k >= n) {
    throw std::invalid_argument(std::string(caller) + ": k must satisfy 1 <= k < n");
  }
}

void check_xgrid(std::span<const double> grid, const char* caller) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 1.0)) {
      throw std::invalid_argument(std::string(caller) + ": grid points must be >= 1");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument(std::string(caller) + ": grid must be strictly increasing");
    }
  }
}

void check_sgrid(std::span<const double> grid, const char* caller) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0 && grid[i] <= 1.0)) {
      throw std::invalid_argument(std::string(caller) + ": grid points must lie in (0, 1]");
    }
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument(std::string(caller) + ": grid must be strictly increasing");
    }
  }
}

}  // namespace detail

SortedSample::SortedSample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("SortedSample: sample must be non-empty");
  std::sort(values_.begin(), values_.end());
}

SortedSample SortedSample::from_sorted(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("SortedSample: sample must be non-empty");
  if (!std::is_sorted(values.begin(), values.end())) {
    throw std::invalid_argument("SortedSample: values are not ascending");
  }
  return SortedSample(std::move(values), sorted_tag{});
}

double SortedSample::order(std::size_t i) const {
  if (i < 1 || i > values_.size()) {
    throw std::out_of_range("SortedSample::order: index must lie in [1, n]");
  }
  return values_[i - 1];
}

std::size_t quantile_level(std::size_t k, double s) {
  return static_cast<std::size_t>(static_cast<double>(k) * s + 1e-9);
}

ProcessCurve tail_empirical_process(const SortedSample& sample, std::size_t k,
                                    std::span<const double> xgrid) {
  detail::check_k(k, sample.size(), "tail_empirical_process");
  detail::check_xgrid(xgrid, "tail_empirical_process");
  const double threshold = sample.order(sample.size() - k);
  ProcessCurve curve;
  curve.grid.assign(xgrid.begin(), xgrid.end());
  curve.values.reserve(xgrid.size());
  for (double x : xgrid) {
    const std::size_t count = detail::exceed_count(sample.values(), threshold * x);
    curve.values.push_back(static_cast<double>(count) / static_cast<double>(k));
  }
  return curve;
}

ProcessCurve tail_quantile_process(const SortedSample& sample, std::size_t k,
                                   std::span<const double> sgrid) {
  detail::check_k(k, sample.size(), "tail_quantile_process");
  detail::check_sgrid(sgrid, "tail_quantile_process");
  const std::size_t n = sample.size();
  const double threshold = sample.order(n - k);
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("tail_quantile_process: threshold X_{n-k,n} must be positive");
  }
  ProcessCurve curve;
  curve.grid.assign(sgrid.begin(), sgrid.end());
  curve.values.reserve(sgrid.size());
  for (double s : sgrid) {
    curve.values.push_back(sample.order(n - quantile_level(k, s)) / threshold);
  }
  return curve;
}

Excesses threshold_excesses(const SortedSample& sample, std::size_t k) {
  detail::check_k(k, sample.size(), "threshold_excesses");
  const std::size_t n = sample.size();
  const double threshold = sample.order(n - k);
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("threshold_excesses: threshold X_{n-k,n} must be positive");
  }
  const double log_threshold = std::log(threshold);
  Excesses excesses;
  excesses.raw.resize(k);
  excesses.logs.resize(k);
  for (std::size_t i = 1; i <= k; ++i) {
    const double x = sample.order(n - k + i);
    excesses.raw[i - 1] = x - threshold;
    excesses.logs[i - 1] = std::log(x) - log_threshold;
  }
  return excesses;
}

}  // namespace tailband
