#pragma once

// Counter-based random numbers. Every stochastic routine in the library draws
// from a Philox4x32-10 stream identified by (seed, stream id), so a result is a
// pure function of its seed and independent workers never share state.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

namespace conceptx {

/// Philox4x32 with 10 rounds (Salmon et al., Random123). Pure bijection of a
/// 128-bit counter under a 64-bit key.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept {
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

/// Sequential view over one Philox stream. The key is the 64-bit seed; the
/// counter's upper half is the stream id and its lower half the block index.
/// Satisfies UniformRandomBitGenerator, but library code only uses the
/// distribution helpers below, whose output is fixed across standard libraries.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (buffered_ == 0) refill();
    --buffered_;
    return buffer_[buffered_];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1].
  double uniform_open_low() noexcept { return 1.0 - uniform(); }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n) by rejection; n must be positive.
  std::uint64_t index(std::uint64_t n) noexcept {
    const std::uint64_t limit = max() - (max() % n + 1) % n;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x > limit);
    return x % n;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open_low()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
  }

  template <typename T>
  void shuffle(std::vector<T>& xs) noexcept {
    for (std::size_t i = xs.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(index(i));
      std::swap(xs[i - 1], xs[j]);
    }
  }

  /// Uniform point on the unit sphere in R^dim.
  std::vector<double> unit_vector(std::size_t dim) {
    std::vector<double> v(dim);
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (double& x : v) {
        x = normal();
        n2 += x * x;
      }
    } while (n2 == 0.0);
    const double n = std::sqrt(n2);
    for (double& x : v) x /= n;
    return v;
  }

 private:
  void refill() noexcept {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                  static_cast<std::uint32_t>(block_ >> 32),
                                  static_cast<std::uint32_t>(stream_),
                                  static_cast<std::uint32_t>(stream_ >> 32)};
    const auto out = Philox4x32::block(ctr, key_);
    ++block_;
    // Popped from the back: first draw is (out[1] << 32 | out[0]).
    buffer_[1] = (std::uint64_t{out[1]} << 32) | out[0];
    buffer_[0] = (std::uint64_t{out[3]} << 32) | out[2];
    buffered_ = 2;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Derives the seed of an independent child stream (e.g. trial i of a batch).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t child) noexcept {
  const auto out = Philox4x32::block(
      {static_cast<std::uint32_t>(child), static_cast<std::uint32_t>(child >> 32),
       0x5EEDu, 0xC0FFEEu},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  return (std::uint64_t{out[1]} << 32) | out[0];
}

}  // namespace conceptx
