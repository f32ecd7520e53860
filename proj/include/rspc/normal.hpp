#pragma once

#include <cmath>
#include <numbers>

namespace rspc {

// Phi^{-1}(3/4) to full double precision. Hard-coded so the consistency
// constants need no runtime quantile routine and stay bit-stable.
inline constexpr double kInvPhi34 = 0.6744897501960817;

// sqrt(2) * Phi^{-1}(3/4), the Fisher-consistency denominator of the
// pairwise-difference scale estimator.
inline constexpr double kSqrt2InvPhi34 = 0.9538725524089398;

// Standard normal CDF. erfc keeps full relative accuracy deep in the tails.
inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace rspc
