#pragma once

// Constant-free minimax rates, piecewise in the total budget.

#include <cstdint>
#include <span>

namespace modgame {

enum class Phase { kLocalization, kRefinement, kOptimal };

const char* to_string(Phase phase);

struct RatePhase {
  Phase phase = Phase::kOptimal;
  double rate = 0.0;
};

/// 2^-2B below log2(1/sigma) + 2 bits, sigma^2 / (B - log2(1/sigma)) up to
/// log2(1/sigma) + m, min(sigma^2/m, 1) beyond. Requires B >= m >= 1.
RatePhase univariate_rate(std::int64_t total_bits, std::int64_t machines, double sigma);

/// Per-coordinate version with B/d bits and m' = (1/d) sum min(b_i, d)
/// machines, scaled by d. Thresholds use max(m', 2).
RatePhase multivariate_rate(std::span<const int> budgets, int dimension, double sigma);

}  // namespace modgame
