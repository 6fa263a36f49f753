#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "tailband/tailproc.hpp"

namespace tailband {

enum class EstimatorKind { hill, moment, pickands, pwm_gpd, weissman_quantile };

const char* kind_name(EstimatorKind kind);

/// Accepts the canonical names plus "weissman" as an alias.
std::optional<EstimatorKind> parse_estimator(const std::string& token);

/// Hill estimator: the mean of the k log excesses over X_{n-k,n}.
double hill(const SortedSample& sample, std::size_t k);

/// Moment estimator M1 + 1 - 1/(2 (1 - M1^2/M2)) with
/// M_r = (1/k) sum (log X_{n-i+1,n} - log X_{n-k,n})^r.
double moment(const SortedSample& sample, std::size_t k);

/// Pickands estimator log2[(X_{n-k,n} - X_{n-2k,n}) / (X_{n-2k,n} - X_{n-4k,n})],
/// using levels n-k, n-2k, n-4k; requires 4k < n and strictly positive spacings.
double pickands(const SortedSample& sample, std::size_t k);

/// GPD probability-weighted-moment fit on the raw excesses Y_(1) <= ... <= Y_(k):
/// w0 = mean(Y), w1 = (1/k) sum Y_(i) (k-i)/(k-1), gamma = 2 - w0/(w0 - 2 w1).
double pwm_gpd(const SortedSample& sample, std::size_t k);

/// Weissman extrapolation X_{n-k,n} * (k/(n p))^gamma_hat for 0 < p <= k/n.
/// p beyond k/n needs no extrapolation and is rejected as misuse.
double weissman_quantile(const SortedSample& sample, std::size_t k, double p, double gamma_hat);

}  // namespace tailband
