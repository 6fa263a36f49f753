#include "tailband/estimators.hpp"

#include <cmath>
#include <stdexcept>

namespace tailband {

const char* kind_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::hill: return "hill";
    case EstimatorKind::moment: return "moment";
    case EstimatorKind::pickands: return "pickands";
    case EstimatorKind::pwm_gpd: return "pwm_gpd";
    case EstimatorKind::weissman_quantile: return "weissman_quantile";
  }
  return "?";
}

std::optional<EstimatorKind> parse_estimator(const std::string& token) {
  if (token == "hill") return EstimatorKind::hill;
  if (token == "moment") return EstimatorKind::moment;
  if (token == "pickands") return EstimatorKind::pickands;
  if (token == "pwm_gpd") return EstimatorKind::pwm_gpd;
  if (token == "weissman_quantile" || token == "weissman") {
    return EstimatorKind::weissman_quantile;
  }
  return std::nullopt;
}

double hill(const SortedSample& sample, std::size_t k) {
  const Excesses excesses = threshold_excesses(sample, k);
  double sum = 0.0;
  for (double le : excesses.logs) sum += le;
  return sum / static_cast<double>(k);
}

double moment(const SortedSample& sample, std::size_t k) {
  const Excesses excesses = threshold_excesses(sample, k);
  double m1 = 0.0;
  double m2 = 0.0;
  for (double le : excesses.logs) {
    m1 += le;
    m2 += le * le;
  }
  m1 /= static_cast<double>(k);
  m2 /= static_cast<double>(k);
  if (m2 <= 0.0) throw std::invalid_argument("moment: M2 = 0 (degenerate sample)");
  const double denom = 1.0 - m1 * m1 / m2;
  if (std::abs(denom) < 1e-12) {
    throw std::invalid_argument("moment: M1^2/M2 is 1 within tolerance (degenerate)");
  }
  return m1 + 1.0 - 0.5 / denom;
}

double pickands(const SortedSample& sample, std::size_t k) {
  const std::size_t n = sample.size();
  if (k == 0 || 4 * k >= n) {
    throw std::invalid_argument("pickands: requires 4k < n");
  }
  const double upper = sample.order(n - k);
  const double mid = sample.order(n - 2 * k);
  const double lower = sample.order(n - 4 * k);
  const double num = upper - mid;
  const double den = mid - lower;
  if (!(den > 0.0)) throw std::invalid_argument("pickands: zero denominator spacing");
  if (!(num > 0.0)) throw std::invalid_argument("pickands: zero numerator spacing");
  return std::log2(num / den);
}

double pwm_gpd(const SortedSample& sample, std::size_t k) {
  const std::size_t n = sample.size();
  if (k < 2 || k >= n) {
    throw std::invalid_argument("pwm_gpd: k must satisfy 2 <= k < n");
  }
  const double threshold = sample.order(n - k);
  double w0 = 0.0;
  double w1 = 0.0;
  for (std::size_t i = 1; i <= k; ++i) {
    const double y = sample.order(n - k + i) - threshold;  // ascending excesses
    w0 += y;
    w1 += y * static_cast<double>(k - i);
  }
  w0 /= static_cast<double>(k);
  w1 /= static_cast<double>(k) * static_cast<double>(k - 1);
  const double denom = w0 - 2.0 * w1;
  if (denom <= 1e-12) {
    throw std::invalid_argument("pwm_gpd: w0 - 2*w1 not positive (estimate outside PWM range)");
  }
  return 2.0 - w0 / denom;
}

double weissman_quantile(const SortedSample& sample, std::size_t k, double p, double gamma_hat) {
  const std::size_t n = sample.size();
  detail::check_k(k, n, "weissman_quantile");
  const double threshold = sample.order(n - k);
  if (!(threshold > 0.0)) {
    throw std::invalid_argument("weissman_quantile: threshold X_{n-k,n} must be positive");
  }
  if (!(p > 0.0)) throw std::invalid_argument("weissman_quantile: p must be positive");
  const double ratio = static_cast<double>(k) / (static_cast<double>(n) * p);
  if (ratio < 1.0) {
    throw std::invalid_argument("weissman_quantile: p exceeds k/n (no extrapolation needed)");
  }
  return threshold * std::pow(ratio, gamma_hat);
}

}  // namespace tailband
