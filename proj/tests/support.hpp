#pragma once

// Shared oracles and generators for the unit tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "modgame/gray_codec.hpp"

namespace modgame::test {

// Gray bit straight from the definition with integer arithmetic on a dyadic
// grid point x = s / 2^K (0 <= s <= 2^K, k <= K).
inline Bit gray_bit_on_grid(int k, std::int64_t s, int resolution) {
  const std::int64_t cell = s >> (resolution - k);
  const auto phase = cell % 4;
  return (phase == 1 || phase == 2) ? 1 : 0;
}

inline Bit conj_gray_bit_on_grid(int k, std::int64_t s, int resolution) {
  const std::int64_t cell = s >> (resolution - k);
  return (cell % 4) >= 2 ? 1 : 0;
}

// Brute-force decoder: scan the 2^-grid_exponent grid for points whose first
// K Gray bits match and return [first match, last match + step).
struct ScanResult {
  double lower;
  double upper;
  bool found;
};

inline ScanResult scan_decode(const std::vector<Bit>& bits, int grid_exponent) {
  const int resolution = static_cast<int>(bits.size());
  const std::int64_t points = std::int64_t{1} << grid_exponent;
  ScanResult out{0.0, 0.0, false};
  for (std::int64_t s = 0; s <= points; ++s) {
    bool match = true;
    for (int k = 1; k <= resolution && match; ++k) {
      match = gray_bit_on_grid(k, s, grid_exponent) == bits[k - 1];
    }
    if (!match) continue;
    const double x = std::ldexp(static_cast<double>(s), -grid_exponent);
    if (!out.found) out.lower = x;
    out.upper = std::min(1.0, x + std::ldexp(1.0, -grid_exponent));
    out.found = true;
  }
  return out;
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline std::vector<int> random_budgets(std::mt19937_64& rng, int machines, int max_bits) {
  std::vector<int> out(static_cast<std::size_t>(machines));
  for (int& b : out) b = uniform_int(rng, 1, max_bits);
  return out;
}

}  // namespace modgame::test
