#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace tailband {

enum class Family { pareto, frechet, burr, half_cauchy };

const char* family_name(Family family);

/// A heavy-tailed law with closed-form quantile function and known extreme
/// value index gamma > 0.  Parameter order per family:
///
///   pareto       F(x) = 1 - x^(-1/gamma),          x >= 1    params: {gamma}
///   frechet      F(x) = exp(-x^(-alpha)),          x > 0     params: {alpha}
///   burr         F(x) = 1 - (1 + x^tau)^(-lambda), x > 0     params: {tau, lambda}
///   half_cauchy  F(x) = (2/pi) atan(x),            x > 0     params: {}
struct DistributionSpec {
  Family family = Family::pareto;
  std::vector<double> params;
  double true_gamma = 1.0;
};

/// Builds a spec from a family name and its parameters, deriving true_gamma
/// (pareto: gamma, frechet: 1/alpha, burr: 1/(tau*lambda), half_cauchy: 1).
/// Throws std::invalid_argument on unknown family, wrong parameter count, or
/// non-positive parameters.
DistributionSpec parse_distribution(const std::string& name, const std::vector<double>& params);

/// F^{-1}(p) in closed form for p in [0, 1).
double quantile(const DistributionSpec& spec, double p);

/// F(x) in closed form.
double cdf(const DistributionSpec& spec, double x);

/// Identifies one reproducible variate stream.  An identical
/// (master_seed, stream_id) pair yields an identical sequence on every run
/// and at every parallelism level.
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

/// Stream id for (replication, machine): rep * machines + machine.
constexpr std::uint64_t derive_stream_id(std::uint64_t rep, std::uint64_t machines,
                                         std::uint64_t machine) {
  return rep * machines + machine;
}

/// n i.i.d. draws by inverse transform on uniforms in [0, 1) from the stream.
std::vector<double> sample(const DistributionSpec& spec, std::size_t n, const RngStream& stream);

}  // namespace tailband
