#pragma once

#include <bit>
#include <cstdint>

namespace modgame::detail {

// 2^e as a double, for -1022 <= e <= 1023. Scaling by it is exact.
inline double pow2(int e) {
  return std::bit_cast<double>(static_cast<std::uint64_t>(1023 + e) << 52);
}

}  // namespace modgame::detail
