#include "tailband/distributions.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace tailband {

namespace {

// (x >> 11) keeps the top 53 bits, so u = mantissa * 2^-53 lies in [0, 1).
constexpr double kUniformScale = 0x1.0p-53;

std::mt19937_64 make_engine(const RngStream& stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(stream.master_seed),
                    static_cast<std::uint32_t>(stream.master_seed >> 32),
                    static_cast<std::uint32_t>(stream.stream_id),
                    static_cast<std::uint32_t>(stream.stream_id >> 32)};
  return std::mt19937_64(seq);
}

std::size_t expected_param_count(Family family) {
  switch (family) {
    case Family::pareto:
    case Family::frechet: return 1;
    case Family::burr: return 2;
    case Family::half_cauchy: return 0;
  }
  return 0;
}

double quantile_unchecked(const DistributionSpec& spec, double p) {
  switch (spec.family) {
    case Family::pareto:
      return std::pow(1.0 - p, -spec.params[0]);
    case Family::frechet:
      if (p == 0.0) return 0.0;  // lower endpoint
      return std::pow(-std::log(p), -1.0 / spec.params[0]);
    case Family::burr:
      return std::pow(std::pow(1.0 - p, -1.0 / spec.params[1]) - 1.0, 1.0 / spec.params[0]);
    case Family::half_cauchy:
      return std::tan(std::numbers::pi * 0.5 * p);
  }
  throw std::logic_error("quantile: unhandled family");
}

}  // namespace

const char* family_name(Family family) {
  switch (family) {
    case Family::pareto: return "pareto";
    case Family::frechet: return "frechet";
    case Family::burr: return "burr";
    case Family::half_cauchy: return "half_cauchy";
  }
  return "?";
}

DistributionSpec parse_distribution(const std::string& name, const std::vector<double>& params) {
  DistributionSpec spec;
  if (name == "pareto") {
    spec.family = Family::pareto;
  } else if (name == "frechet") {
    spec.family = Family::frechet;
  } else if (name == "burr") {
    spec.family = Family::burr;
  } else if (name == "half_cauchy") {
    spec.family = Family::half_cauchy;
  } else {
    throw std::invalid_argument("unknown distribution family '" + name + "'");
  }
  if (params.size() != expected_param_count(spec.family)) {
    throw std::invalid_argument(std::string(family_name(spec.family)) + " expects " +
                                std::to_string(expected_param_count(spec.family)) +
                                " parameter(s); got " + std::to_string(params.size()));
  }
  for (double p : params) {
    if (!(p > 0.0)) {
      throw std::invalid_argument(std::string(family_name(spec.family)) +
                                  ": parameters must be strictly positive");
    }
  }
  spec.params = params;
  switch (spec.family) {
    case Family::pareto: spec.true_gamma = params[0]; break;
    case Family::frechet: spec.true_gamma = 1.0 / params[0]; break;
    case Family::burr: spec.true_gamma = 1.0 / (params[0] * params[1]); break;
    case Family::half_cauchy: spec.true_gamma = 1.0; break;
  }
  return spec;
}

double quantile(const DistributionSpec& spec, double p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw std::invalid_argument("quantile: p must lie in [0, 1)");
  }
  return quantile_unchecked(spec, p);
}

double cdf(const DistributionSpec& spec, double x) {
  switch (spec.family) {
    case Family::pareto:
      return x <= 1.0 ? 0.0 : 1.0 - std::pow(x, -1.0 / spec.params[0]);
    case Family::frechet:
      return x <= 0.0 ? 0.0 : std::exp(-std::pow(x, -spec.params[0]));
    case Family::burr:
      return x <= 0.0 ? 0.0 : 1.0 - std::pow(1.0 + std::pow(x, spec.params[0]), -spec.params[1]);
    case Family::half_cauchy:
      return x <= 0.0 ? 0.0 : std::numbers::inv_pi * 2.0 * std::atan(x);
  }
  throw std::logic_error("cdf: unhandled family");
}

std::vector<double> sample(const DistributionSpec& spec, std::size_t n, const RngStream& stream) {
  if (n == 0) throw std::invalid_argument("sample: n must be at least 1");
  auto engine = make_engine(stream);
  std::vector<double> draws(n);
  for (double& x : draws) {
    x = quantile_unchecked(spec, static_cast<double>(engine() >> 11) * kUniformScale);
  }
  return draws;
}

}  // namespace tailband
