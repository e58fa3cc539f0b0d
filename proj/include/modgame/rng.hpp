#pragma once

// Counter-based random stream: Philox4x32-10 (Salmon et al., SC'11).
//
// Every draw is a pure function of (key, counter), so trials can run in any
// order on any number of threads and still see the same numbers.

#include <array>
#include <cstdint>

namespace modgame {

inline constexpr const char* kRngName = "philox4x32-10";

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(Key key) : key_(key) {}
  /// Key derived from a 64-bit seed through splitmix64.
  static Philox4x32 from_seed(std::uint64_t seed);

  Counter operator()(Counter counter) const;
  const Key& key() const { return key_; }

 private:
  Key key_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Uniform in the open interval (0,1) with 52 random bits.
double uniform_open(std::uint32_t hi, std::uint32_t lo);

/// Two standard normals from one Philox block, via the inverse CDF.
std::array<double, 2> normal_pair(const Philox4x32& rng,
                                  const Philox4x32::Counter& counter);

}  // namespace modgame
