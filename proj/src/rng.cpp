#include "modgame/rng.hpp"

#include <cmath>

#include "modgame/normal.hpp"

namespace modgame {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
constexpr int kRounds = 10;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t product = std::uint64_t{a} * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Philox4x32 Philox4x32::from_seed(std::uint64_t seed) {
  const std::uint64_t mixed = splitmix64(seed);
  return Philox4x32({static_cast<std::uint32_t>(mixed),
                     static_cast<std::uint32_t>(mixed >> 32)});
}

Philox4x32::Counter Philox4x32::operator()(Counter ctr) const {
  Key key = key_;
  for (int round = 0; round < kRounds; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

double uniform_open(std::uint32_t hi, std::uint32_t lo) {
  // 52 bits so that the largest value plus one half is still below 2^52.
  const std::uint64_t bits = (std::uint64_t{hi >> 6} << 26) | (lo >> 6);
  return (static_cast<double>(bits) + 0.5) * 0x1p-52;
}

std::array<double, 2> normal_pair(const Philox4x32& rng,
                                  const Philox4x32::Counter& counter) {
  const auto block = rng(counter);
  return {normal::quantile(uniform_open(block[0], block[1])),
          normal::quantile(uniform_open(block[2], block[3]))};
}

}  // namespace modgame
