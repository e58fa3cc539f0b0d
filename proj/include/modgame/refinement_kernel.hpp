#pragma once

// Square-wave refinement functions, their Gaussian smoothing
//   Phi_f(x) = E[f(X)],  X ~ N(x, sigma^2),
// and the monotone inversion used to turn an average of refinement bits back
// into a location estimate.

#include "modgame/gray_codec.hpp"

namespace modgame {

/// floor(log2(1 / sigma)) computed exactly from the binary representation.
/// Requires sigma > 0; may be zero or negative for sigma >= 1/2.
int crude_precision(double sigma);

/// Square wave with half-period 2^-exponent. The plain wave is
/// floor(2^e x) mod 2; the conjugate wave is floor(2^e x - 1/2) mod 2, i.e.
/// the plain wave delayed by a quarter period.
struct RefinementWave {
  int exponent = 1;
  bool conjugate = false;

  friend bool operator==(const RefinementWave&, const RefinementWave&) = default;
};

/// Valid wave exponents. Negative exponents give waves whose half-period
/// exceeds the unit interval; they are used when sigma > 2^-7.
inline constexpr int kMinWaveExponent = -60;

/// Refinement wave matched to a crude precision E: exponent E - 7.
RefinementWave refinement_wave(int precision, bool conjugate);

Bit wave_bit(const RefinementWave& wave, double x);

/// Phi_wave(x) for noise level sigma, accurate to ~1e-15 absolute. Mass
/// beyond x +- 10 sigma (< 8e-24) is dropped.
double phi_of(const RefinementWave& wave, double x, double sigma);

enum class Alignment { kPlain, kConjugate };

const char* to_string(Alignment alignment);

/// Classifies a finer interval against the two window families
///   plain:     [(2j - 3/4) W, (2j + 3/4) W]
///   conjugate: [(2j + 1/4) W, (2j + 7/4) W]
/// with W = 2^-(E - 6), E = crude_precision(sigma). Plain wins when both fit.
/// Throws protocol-invariant-violation when neither window holds the interval.
Alignment alignment_case(const DyadicInterval& interval, double sigma);
/// Same for the closed real interval [lower, upper].
Alignment alignment_case(double lower, double upper, double sigma);

/// Phi of one refinement wave restricted to an aligned interval, where it is
/// monotone. lo_value/hi_value are the extreme values of Phi over the interval.
///
/// Far from the wave's change point Phi saturates to 0 or 1 in double
/// precision, so the construction check accepts ties between grid points and
/// the direction comes from the jump at the nearest change point.
class MonotoneBranch {
 public:
  MonotoneBranch(const DyadicInterval& interval, const RefinementWave& wave,
                 double sigma);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  const RefinementWave& wave() const { return wave_; }
  double sigma() const { return sigma_; }
  double lo_value() const { return lo_value_; }
  double hi_value() const { return hi_value_; }
  /// +1 when Phi increases with x on the interval, -1 otherwise.
  int direction() const { return direction_; }

  double phi(double x) const { return phi_of(wave_, x, sigma_); }
  /// Endpoint at which Phi attains lo_value (resp. hi_value).
  double argmin() const { return direction_ > 0 ? lower_ : upper_; }
  double argmax() const { return direction_ > 0 ? upper_ : lower_; }

 private:
  double lower_;
  double upper_;
  RefinementWave wave_;
  double sigma_;
  double lo_value_;
  double hi_value_;
  int direction_;
};

/// Phi^-1(truncate(y, lo_value, hi_value)) on the branch interval, by
/// bisection to 1e-12 * max(sigma, width).
double invert_phi(const MonotoneBranch& branch, double y);

}  // namespace modgame
