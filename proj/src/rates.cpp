#include "modgame/rates.hpp"

#include <algorithm>
#include <cmath>

#include "modgame/error.hpp"
#include "modgame/modgame_multivariate.hpp"

namespace modgame {

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::kLocalization:
      return "LOCALIZATION";
    case Phase::kRefinement:
      return "REFINEMENT";
    case Phase::kOptimal:
      return "OPTIMAL";
  }
  return "UNKNOWN";
}

RatePhase univariate_rate(std::int64_t total_bits, std::int64_t machines, double sigma) {
  require(machines >= 1, ErrorKind::kInvalidArgument, "need at least one machine");
  require(total_bits >= machines, ErrorKind::kInvalidArgument,
          "total bits must be at least the machine count");
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::kInvalidArgument,
          "sigma must be positive and finite");
  const double log_inv = -std::log2(sigma);
  const auto b = static_cast<double>(total_bits);
  const auto m = static_cast<double>(machines);
  const double variance = sigma * sigma;
  if (b < log_inv + 2.0) return {Phase::kLocalization, std::exp2(-2.0 * b)};
  if (b < log_inv + m) return {Phase::kRefinement, variance / (b - log_inv)};
  return {Phase::kOptimal, std::min(variance / m, 1.0)};
}

RatePhase multivariate_rate(std::span<const int> budgets, int dimension, double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::kInvalidArgument,
          "sigma must be positive and finite");
  const double m_eff = effective_sample_size(budgets, dimension);
  std::int64_t total = 0;
  for (const int b : budgets) total += b;
  const double d = dimension;
  const double per_coordinate = static_cast<double>(total) / d;
  const double log_inv = -std::log2(sigma);
  const double variance = sigma * sigma;
  if (per_coordinate < log_inv + 2.0) {
    return {Phase::kLocalization, d * std::exp2(-2.0 * per_coordinate)};
  }
  if (per_coordinate < log_inv + std::max(m_eff, 2.0)) {
    return {Phase::kRefinement, d * variance / (per_coordinate - log_inv)};
  }
  return {Phase::kOptimal, d * std::min(variance / m_eff, 1.0)};
}

}  // namespace modgame
