#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <system_error>
#include <vector>

#include "conceptx/error.hpp"

namespace conceptx {

/// Compensated (Kahan-Babuska / Neumaier) running sum. Terms are folded in
/// call order, so a fixed input order gives a bit-identical result.
class CompensatedSum {
 public:
  CompensatedSum() = default;

  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      compensation_ += (sum_ - t) + x;
    } else {
      compensation_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

  /// Merges a partial sum computed over a later chunk of the input.
  void merge(const CompensatedSum& other) noexcept {
    add(other.sum_);
    add(other.compensation_);
  }

  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

inline void require_same_dim(std::span<const double> a, std::span<const double> b,
                             const char* what) {
  if (a.size() != b.size()) {
    throw ValidationError(std::string(what) + ": dimension mismatch (" +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                          ")");
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b, "dot");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Returns a / ||a||. Throws ValidationError on a zero (or non-finite) vector.
inline std::vector<double> normalized(std::span<const double> a) {
  const double n = norm(a);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw ValidationError("cannot normalize a zero or non-finite vector");
  }
  std::vector<double> out(a.begin(), a.end());
  for (double& x : out) x /= n;
  return out;
}

inline bool is_unit(std::span<const double> a, double tol = 1e-9) {
  return std::fabs(norm(a) - 1.0) <= tol;
}

/// Shortest decimal text that round-trips to the same double.
inline std::string format_double(double x) {
  if (x == 0.0) return "0";  // folds -0 into 0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

/// Fixed-point text with the given number of decimals (used for SVG geometry).
inline std::string format_fixed(double x, int decimals) {
  if (std::fabs(x) < 0.5 * std::pow(10.0, -decimals)) x = 0.0;
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::fixed, decimals);
  if (res.ec != std::errc{}) return "nan";
  return std::string(buf, res.ptr);
}

}  // namespace conceptx
