#include "modgame/refinement_kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "modgame/error.hpp"
#include "pow2.hpp"
#include "modgame/normal.hpp"

namespace modgame {

namespace {

constexpr double kWindowSigmas = 10.0;
constexpr std::int64_t kMaxPiecesInWindow = std::int64_t{1} << 22;
// Rounding slack when comparing sums of normal masses.
constexpr double kPhiSlack = 1e-15;
constexpr int kMonotoneGridPoints = 17;
constexpr int kBisectionSteps = 60;

[[noreturn, gnu::cold]] void wave_out_of_range(int exponent) {
  fail(ErrorKind::kResolutionOverflow,
       "refinement wave exponent " + std::to_string(exponent) + " out of range");
}

inline void check_wave(const RefinementWave& wave) {
  if (wave.exponent < kMinWaveExponent || wave.exponent > kMaxResolution) {
    wave_out_of_range(wave.exponent);
  }
}

// Position of the wave's value-1 pieces in scaled coordinates u = 2^e x:
// plain waves are 1 on [2i + 1, 2i + 2), conjugate waves on [2i + 1.5, 2i + 2.5).
double phase_offset(const RefinementWave& wave) {
  return wave.conjugate ? 0.5 : 0.0;
}

}  // namespace

int crude_precision(double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::kInvalidArgument,
          "sigma must be positive and finite");
  int exponent = 0;
  const double mantissa = std::frexp(sigma, &exponent);
  // sigma = mantissa * 2^exponent with mantissa in [1/2, 1).
  if (mantissa == 0.5) return 1 - exponent;
  return -exponent;
}

RefinementWave refinement_wave(int precision, bool conjugate) {
  RefinementWave wave{precision - 7, conjugate};
  check_wave(wave);
  return wave;
}

Bit wave_bit(const RefinementWave& wave, double x) {
  check_wave(wave);
  const double u = x * detail::pow2(wave.exponent) - phase_offset(wave);
  const auto cell = static_cast<std::int64_t>(std::floor(u));
  return static_cast<Bit>(((cell % 2) + 2) % 2);
}

double phi_of(const RefinementWave& wave, double x, double sigma) {
  check_wave(wave);
  require(sigma > 0.0 && std::isfinite(sigma), ErrorKind::kInvalidArgument,
          "phi_of: sigma must be positive and finite");

  const double offset = phase_offset(wave);
  const double u_lo = std::ldexp(x - kWindowSigmas * sigma, wave.exponent);
  const double u_hi = std::ldexp(x + kWindowSigmas * sigma, wave.exponent);
  // Value-1 pieces [2i + 1 + offset, 2i + 2 + offset) meeting [u_lo, u_hi].
  const double first = std::floor((u_lo - offset - 2.0) / 2.0);
  const double last = std::ceil((u_hi - offset - 1.0) / 2.0);
  require(last - first <= static_cast<double>(kMaxPiecesInWindow),
          ErrorKind::kInvalidArgument,
          "phi_of: wave period too short relative to sigma");

  double total = 0.0;
  for (double i = first; i <= last; i += 1.0) {
    const double start = std::max(2.0 * i + 1.0 + offset, u_lo);
    const double stop = std::min(2.0 * i + 2.0 + offset, u_hi);
    if (!(start < stop)) continue;
    const double a = (std::ldexp(start, -wave.exponent) - x) / sigma;
    const double b = (std::ldexp(stop, -wave.exponent) - x) / sigma;
    total += normal::mass(a, b);
  }
  return std::clamp(total, 0.0, 1.0);
}

const char* to_string(Alignment alignment) {
  return alignment == Alignment::kPlain ? "plain" : "conjugate";
}

Alignment alignment_case(const DyadicInterval& interval, double sigma) {
  return alignment_case(interval.lower(), interval.upper(), sigma);
}

Alignment alignment_case(double lo, double hi, double sigma) {
  require(lo <= hi, ErrorKind::kInvalidInterval, "alignment: lower exceeds upper");
  const int precision = crude_precision(sigma);
  const double window = std::ldexp(1.0, -(precision - 6));
  const double mid = 0.5 * (lo + hi);

  // Plain windows are centred on even multiples of W, conjugate ones on odd.
  const auto fits = [&](double centre) {
    return centre - 0.75 * window <= lo && hi <= centre + 0.75 * window;
  };
  const auto search = [&](double parity) {
    const double j0 = std::round((mid / window - parity) / 2.0);
    for (const double j : {j0 - 1.0, j0, j0 + 1.0}) {
      if (fits((2.0 * j + parity) * window)) return true;
    }
    return false;
  };
  if (search(0.0)) return Alignment::kPlain;
  if (search(1.0)) return Alignment::kConjugate;
  fail(ErrorKind::kProtocolInvariantViolation,
       "finer interval [" + std::to_string(lo) + ", " + std::to_string(hi) +
           "] fits neither alignment window");
}

MonotoneBranch::MonotoneBranch(const DyadicInterval& interval,
                               const RefinementWave& wave, double sigma)
    : lower_(interval.lower()),
      upper_(interval.upper()),
      wave_(wave),
      sigma_(sigma),
      lo_value_(0.0),
      hi_value_(0.0),
      direction_(1) {
  check_wave(wave);
  require(sigma > 0.0, ErrorKind::kInvalidArgument, "sigma must be positive");

  // Jump of the wave at the change point nearest the interval centre decides
  // whether Phi rises or falls across the interval.
  const double u_mid = std::ldexp(0.5 * (lower_ + upper_), wave.exponent) -
                       phase_offset(wave);
  const auto nearest = static_cast<std::int64_t>(std::round(u_mid));
  direction_ = (((nearest % 2) + 2) % 2 == 1) ? 1 : -1;

  std::array<double, kMonotoneGridPoints> values{};
  for (int i = 0; i < kMonotoneGridPoints; ++i) {
    const double x =
        lower_ + (upper_ - lower_) * i / (kMonotoneGridPoints - 1);
    values[i] = phi(x);
    if (i > 0 && direction_ * (values[i] - values[i - 1]) < -kPhiSlack) {
      fail(ErrorKind::kProtocolInvariantViolation,
           "Phi is not monotone on the refinement interval");
    }
  }
  lo_value_ = std::min(values.front(), values.back());
  hi_value_ = std::max(values.front(), values.back());
}

double invert_phi(const MonotoneBranch& branch, double y) {
  const double lo = branch.lo_value();
  const double hi = branch.hi_value();
  if (y < lo) return branch.argmin();
  if (y > hi) return branch.argmax();
  if (lo == hi) return y >= 0.5 ? branch.argmax() : branch.argmin();
  if (y == lo) return branch.argmin();
  if (y == hi) return branch.argmax();

  double below = branch.argmin();  // phi(below) <= y
  double above = branch.argmax();  // phi(above) >= y
  const double tolerance =
      1e-12 * std::max(branch.sigma(), branch.upper() - branch.lower());
  for (int step = 0; step < kBisectionSteps; ++step) {
    if (std::abs(above - below) <= tolerance) break;
    const double mid = 0.5 * (below + above);
    const double value = branch.phi(mid);
    if (value < lo - kPhiSlack || value > hi + kPhiSlack) {
      fail(ErrorKind::kProtocolInvariantViolation,
           "Phi left its range during inversion");
    }
    if (value < y) {
      below = mid;
    } else {
      above = mid;
    }
  }
  return 0.5 * (below + above);
}

}  // namespace modgame
