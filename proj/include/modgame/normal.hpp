#pragma once

// Standard normal CDF, interval mass and quantile.

namespace modgame::normal {

/// P(Z <= z).
double cdf(double z);
/// P(Z > z), accurate deep in the upper tail.
double upper_tail(double z);
/// P(a <= Z <= b) without cancellation when both ends sit in the same tail.
double mass(double a, double b);

/// Inverse CDF on (0,1), Wichura's AS241 (relative error about 1e-16).
/// Returns -inf at 0 and +inf at 1; NaN outside [0,1].
double quantile(double p);

}  // namespace modgame::normal
