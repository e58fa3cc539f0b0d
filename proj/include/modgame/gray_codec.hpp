#pragma once

// Gray functions on [0,1], their change points, and the Gray-string decoder.
//
// g_k(x) is 0 when floor(2^k * clamp(x)) mod 4 is 0 or 3 and 1 otherwise; the
// conjugate function shifts the pattern by one cell. Reading (g_1..g_K) as a
// code word labels each dyadic cell of width 2^-K, and codes of neighbouring
// cells differ in exactly one position.

#include <cstdint>
#include <span>
#include <vector>

namespace modgame {

using Bit = std::uint8_t;

/// Largest Gray index / decode resolution. Cells below 2^-48 are too close to
/// double granularity on [0,1] to be represented exactly.
inline constexpr int kMaxResolution = 48;

/// Clamp x to [lower, upper]. Throws invalid-interval when lower > upper.
double truncate(double x, double lower, double upper);

/// k-th Gray function. Negative k is identically zero.
Bit gray_bit(int k, double x);
/// k-th conjugate Gray function. Negative k is identically zero.
Bit conj_gray_bit(int k, double x);

// Same patterns continued periodically past [0,1] instead of clamping the
// argument. They agree with gray_bit / conj_gray_bit on [0,1).
Bit periodic_gray_bit(int k, double x);
Bit periodic_conj_gray_bit(int k, double x);

/// Interval with endpoints numerator * 2^-exponent. The upper endpoint is
/// excluded unless closed_upper is set (the cell touching x = 1 includes 1).
///
/// Intervals produced by decode() lie in [0,1]; stretched intervals may
/// protrude past either end, but their endpoints stay dyadic.
class DyadicInterval {
 public:
  DyadicInterval(std::int64_t lower_numerator, std::int64_t upper_numerator,
                 int exponent, bool closed_upper);

  /// The closed unit interval [0,1].
  static DyadicInterval unit();

  std::int64_t lower_numerator() const { return lower_; }
  std::int64_t upper_numerator() const { return upper_; }
  int exponent() const { return exponent_; }
  bool closed_upper() const { return closed_upper_; }

  double lower() const;
  double upper() const;
  double width() const { return upper() - lower(); }
  double midpoint() const { return 0.5 * (lower() + upper()); }

  bool contains(double x) const;
  /// True when [other.lower, other.upper] lies within this interval's closure.
  bool encloses(const DyadicInterval& other) const;

  /// Same interval expressed with a finer (larger) exponent.
  DyadicInterval rescaled(int exponent) const;
  /// {x : d(x, *this) <= 2^-amount}; keeps the upper endpoint's openness.
  DyadicInterval stretched(int amount) const;
  /// Intersection. Disjoint inputs give an empty interval (lower == upper,
  /// upper open).
  DyadicInterval intersect(const DyadicInterval& other) const;
  bool empty() const { return lower_ == upper_ && !closed_upper_; }

  friend bool operator==(const DyadicInterval& a, const DyadicInterval& b);

 private:
  std::int64_t lower_;
  std::int64_t upper_;
  int exponent_;
  bool closed_upper_;
};

/// Dec_K: the set of x in [0,1] whose first K Gray bits equal `bits`.
/// Always a single cell of width 2^-K. Requires 1 <= K <= kMaxResolution.
DyadicInterval decode(std::span<const Bit> bits);

/// Sorted change points of a (conjugate) Gray function inside (0,1).
///
/// Both families are arithmetic progressions of dyadic rationals, so the set
/// is stored as {(first + j * stride) * 2^-exponent : 0 <= j < count} and
/// never materialized unless asked.
class ChangePointSet {
 public:
  ChangePointSet(std::int64_t first, std::int64_t stride, std::int64_t count,
                 int exponent);

  std::int64_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  int exponent() const { return exponent_; }
  double operator[](std::int64_t j) const;
  /// Materialized list. Refuses sets with more than 2^24 points.
  std::vector<double> points() const;

  /// Index of the point closest to x (ties to the lower one). Set must be
  /// nonempty.
  std::int64_t nearest_index(double x) const;

 private:
  std::int64_t first_;
  std::int64_t stride_;
  std::int64_t count_;
  int exponent_;
};

/// G_k (conjugate = false) or the conjugate family for index k.
/// G_k = {(2j-1) 2^-k : 1 <= j <= 2^(k-1)}; the conjugate set is the even
/// multiples of 2^-k in (0,1), i.e. {j 2^-(k-1) : 1 <= j < 2^(k-1)}.
ChangePointSet change_points(int k, bool conjugate);

/// min_{y in S} |x - y|. Throws invalid-argument for an empty set.
double dist_to_set(double x, const ChangePointSet& set);
/// Distance to the closure of the interval; zero inside.
double dist_to_set(double x, const DyadicInterval& interval);

}  // namespace modgame
