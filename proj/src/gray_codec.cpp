#include "modgame/gray_codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "modgame/error.hpp"
#include "pow2.hpp"

namespace modgame {

namespace {

constexpr int kMaxExponent = 62;

void check_index(int k) {
  if (k > kMaxResolution) {
    fail(ErrorKind::kResolutionOverflow,
         "Gray index " + std::to_string(k) + " exceeds " +
             std::to_string(kMaxResolution));
  }
}

// floor(2^k * x) mod 4, in {0,1,2,3}.
int cell_phase(int k, double x) {
  const double scaled = std::floor(x * detail::pow2(k));
  const auto cell = static_cast<std::int64_t>(scaled);
  return static_cast<int>(((cell % 4) + 4) % 4);
}

Bit gray_from_phase(int phase) { return (phase == 1 || phase == 2) ? 1 : 0; }
Bit conj_from_phase(int phase) { return phase >= 2 ? 1 : 0; }

std::int64_t shift_left_checked(std::int64_t value, int shift) {
  if (shift == 0) return value;
  const std::int64_t limit = std::numeric_limits<std::int64_t>::max() >> shift;
  require(value <= limit && value >= -limit, ErrorKind::kResolutionOverflow,
          "dyadic numerator overflow");
  return value * (std::int64_t{1} << shift);
}

}  // namespace

double truncate(double x, double lower, double upper) {
  require(lower <= upper, ErrorKind::kInvalidInterval,
          "truncate: lower bound exceeds upper bound");
  if (x <= lower) return lower;
  if (x >= upper) return upper;
  return x;
}

Bit gray_bit(int k, double x) {
  if (k < 0) return 0;
  check_index(k);
  return gray_from_phase(cell_phase(k, truncate(x, 0.0, 1.0)));
}

Bit conj_gray_bit(int k, double x) {
  if (k < 0) return 0;
  check_index(k);
  return conj_from_phase(cell_phase(k, truncate(x, 0.0, 1.0)));
}

Bit periodic_gray_bit(int k, double x) {
  if (k < 0) return 0;
  check_index(k);
  return gray_from_phase(cell_phase(k, x));
}

Bit periodic_conj_gray_bit(int k, double x) {
  if (k < 0) return 0;
  check_index(k);
  return conj_from_phase(cell_phase(k, x));
}

// --- DyadicInterval ---------------------------------------------------------

DyadicInterval::DyadicInterval(std::int64_t lower_numerator,
                               std::int64_t upper_numerator, int exponent,
                               bool closed_upper)
    : lower_(lower_numerator),
      upper_(upper_numerator),
      exponent_(exponent),
      closed_upper_(closed_upper) {
  require(exponent >= 0 && exponent <= kMaxExponent, ErrorKind::kInvalidArgument,
          "dyadic exponent out of range");
  require(lower_ <= upper_, ErrorKind::kInvalidInterval,
          "dyadic interval with lower > upper");
}

DyadicInterval DyadicInterval::unit() { return {0, 1, 0, true}; }

double DyadicInterval::lower() const {
  return std::ldexp(static_cast<double>(lower_), -exponent_);
}

double DyadicInterval::upper() const {
  return std::ldexp(static_cast<double>(upper_), -exponent_);
}

bool DyadicInterval::contains(double x) const {
  if (x < lower()) return false;
  return closed_upper_ ? x <= upper() : x < upper();
}

bool DyadicInterval::encloses(const DyadicInterval& other) const {
  return lower() <= other.lower() && other.upper() <= upper();
}

DyadicInterval DyadicInterval::rescaled(int exponent) const {
  require(exponent >= exponent_, ErrorKind::kInvalidArgument,
          "rescaled: exponent must not decrease");
  const int shift = exponent - exponent_;
  return {shift_left_checked(lower_, shift), shift_left_checked(upper_, shift),
          exponent, closed_upper_};
}

DyadicInterval DyadicInterval::stretched(int amount) const {
  require(amount >= 0, ErrorKind::kInvalidArgument,
          "stretch amount must be 2^-s with s >= 0");
  DyadicInterval out = rescaled(std::max(exponent_, amount));
  const std::int64_t delta = std::int64_t{1} << (out.exponent_ - amount);
  out.lower_ -= delta;
  out.upper_ += delta;
  return out;
}

DyadicInterval DyadicInterval::intersect(const DyadicInterval& other) const {
  const int exponent = std::max(exponent_, other.exponent_);
  const DyadicInterval a = rescaled(exponent);
  const DyadicInterval b = other.rescaled(exponent);
  const std::int64_t lo = std::max(a.lower_, b.lower_);
  std::int64_t hi = 0;
  bool closed = false;
  if (a.upper_ < b.upper_) {
    hi = a.upper_;
    closed = a.closed_upper_;
  } else if (b.upper_ < a.upper_) {
    hi = b.upper_;
    closed = b.closed_upper_;
  } else {
    hi = a.upper_;
    closed = a.closed_upper_ && b.closed_upper_;
  }
  if (lo > hi || (lo == hi && !closed)) return {lo, lo, exponent, false};
  return {lo, hi, exponent, closed};
}

bool operator==(const DyadicInterval& a, const DyadicInterval& b) {
  const int exponent = std::max(a.exponent_, b.exponent_);
  const DyadicInterval x = a.rescaled(exponent);
  const DyadicInterval y = b.rescaled(exponent);
  return x.lower_ == y.lower_ && x.upper_ == y.upper_ &&
         x.closed_upper_ == y.closed_upper_;
}

// --- decoding -----------------------------------------------------------------

DyadicInterval decode(std::span<const Bit> bits) {
  const auto resolution = static_cast<int>(bits.size());
  require(resolution >= 1, ErrorKind::kInvalidArgument,
          "decode needs at least one bit");
  check_index(resolution);

  // Reflected Gray code: binary digit k is the running XOR of Gray bits 1..k.
  std::int64_t cell = 0;
  Bit binary = 0;
  for (const Bit bit : bits) {
    require(bit <= 1, ErrorKind::kInvalidArgument, "bit value outside {0,1}");
    binary ^= bit;
    cell = 2 * cell + binary;
  }
  const std::int64_t last = (std::int64_t{1} << resolution) - 1;
  return {cell, cell + 1, resolution, cell == last};
}

// --- change points ------------------------------------------------------------

ChangePointSet::ChangePointSet(std::int64_t first, std::int64_t stride,
                               std::int64_t count, int exponent)
    : first_(first), stride_(stride), count_(count), exponent_(exponent) {
  require(stride > 0 && count >= 0, ErrorKind::kInvalidArgument,
          "change point progression needs positive stride");
}

double ChangePointSet::operator[](std::int64_t j) const {
  return std::ldexp(static_cast<double>(first_ + j * stride_), -exponent_);
}

std::vector<double> ChangePointSet::points() const {
  require(count_ <= (std::int64_t{1} << 24), ErrorKind::kResolutionOverflow,
          "change point set too large to materialize");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count_));
  for (std::int64_t j = 0; j < count_; ++j) out.push_back((*this)[j]);
  return out;
}

std::int64_t ChangePointSet::nearest_index(double x) const {
  require(count_ > 0, ErrorKind::kInvalidArgument, "empty change point set");
  const double position =
      (std::ldexp(x, exponent_) - static_cast<double>(first_)) /
      static_cast<double>(stride_);
  if (position <= 0.0) return 0;
  if (position >= static_cast<double>(count_ - 1)) return count_ - 1;
  const auto below = static_cast<std::int64_t>(std::floor(position));
  const double to_below = std::abs(x - (*this)[below]);
  const double to_above = std::abs((*this)[below + 1] - x);
  return to_above < to_below ? below + 1 : below;
}

ChangePointSet change_points(int k, bool conjugate) {
  require(k >= 1, ErrorKind::kInvalidArgument, "change points need k >= 1");
  check_index(k);
  const std::int64_t half = std::int64_t{1} << (k - 1);
  if (conjugate) return {2, 2, half - 1, k};
  return {1, 2, half, k};
}

double dist_to_set(double x, const ChangePointSet& set) {
  require(!set.empty(), ErrorKind::kInvalidArgument,
          "distance to an empty set is undefined");
  return std::abs(x - set[set.nearest_index(x)]);
}

double dist_to_set(double x, const DyadicInterval& interval) {
  require(!interval.empty(), ErrorKind::kInvalidArgument,
          "distance to an empty interval is undefined");
  if (x < interval.lower()) return interval.lower() - x;
  if (x > interval.upper()) return x - interval.upper();
  return 0.0;
}

}  // namespace modgame
