#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "conceptx/error.hpp"

namespace conceptx {

// Deviation bounds for means of n independent [-1, 1]-valued samples:
// Pr(|mean - E| > eps) < exp(-n eps^2 / 2).

/// Smallest n with exp(-n eps^2 / 2) <= delta, i.e. ceil(2 ln(1/delta) / eps^2).
inline std::int64_t hoeffding_sample_size(double epsilon, double delta) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw DomainError("epsilon must lie in (0, 1)");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("delta must lie in (0, 1)");
  }
  const double n = std::ceil(2.0 * std::log(1.0 / delta) / (epsilon * epsilon));
  if (!(n < 9.0e15)) throw DomainError("sample size overflows: epsilon too small");
  return static_cast<std::int64_t>(n);
}

/// Radius eps = sqrt(2 ln(1/delta) / n) achieved by n samples at confidence 1 - delta.
inline double hoeffding_radius(std::int64_t n, double delta) {
  if (n <= 0) throw DomainError("sample count must be positive, got " + std::to_string(n));
  if (!(delta > 0.0 && delta < 1.0)) {
    throw DomainError("delta must lie in (0, 1)");
  }
  return std::sqrt(2.0 * std::log(1.0 / delta) / static_cast<double>(n));
}

}  // namespace conceptx
