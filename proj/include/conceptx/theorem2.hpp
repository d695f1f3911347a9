#pragma once

// Monte Carlo harness for the TCAV / class-conditioned bound: with unit w_h,
// v, threshold theta_h = 1 - eps^2 / 8 and n = hoeffding_sample_size(eps,
// delta) embeddings from the spherical cap {g : w_h . g > theta_h},
// |mean c(x) - TCAV_con| < eps should hold with probability >= 1 - delta.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "conceptx/error.hpp"
#include "conceptx/hoeffding.hpp"
#include "conceptx/numeric.hpp"
#include "conceptx/parallel.hpp"
#include "conceptx/rng.hpp"
#include "conceptx/tcav.hpp"

namespace conceptx {

enum class CapSampling {
  automatic,  // rejection when a pilot run accepts >= 1%, tangent otherwise
  rejection,  // uniform sphere draws filtered by the cap condition
  tangent     // cos angle ~ U(min_cos, 1], direction uniform in the tangent space
};

inline std::string_view to_string(CapSampling s) noexcept {
  switch (s) {
    case CapSampling::automatic:
      return "automatic";
    case CapSampling::rejection:
      return "rejection";
    case CapSampling::tangent:
      return "tangent";
  }
  return "unknown";
}

struct CapSample {
  std::vector<std::vector<double>> points;
  CapSampling method_used = CapSampling::rejection;
  double acceptance_rate = 1.0;  // of the rejection stage or pilot; 1 if never rejecting
};

namespace detail {

inline constexpr std::size_t kPilotDraws = 4096;
inline constexpr double kMinAcceptance = 0.01;
inline constexpr std::size_t kMaxDrawsPerPoint = 10000;

inline std::vector<double> tangent_cap_point(std::span<const double> axis, double min_cos,
                                             Rng& rng) {
  const std::size_t dim = axis.size();
  for (;;) {
    const double t = min_cos + (1.0 - min_cos) * rng.uniform_open_low();
    std::vector<double> u = rng.unit_vector(dim);
    const double along = dot(u, axis);
    for (std::size_t i = 0; i < dim; ++i) u[i] -= along * axis[i];
    const double un = norm(u);
    if (!(un > 1e-12)) continue;
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t)) / un;
    std::vector<double> g(dim);
    for (std::size_t i = 0; i < dim; ++i) g[i] = t * axis[i] + s * u[i];
    g = normalized(g);
    if (dot(axis, g) > min_cos) return g;
  }
}

}  // namespace detail

/// Draws n unit vectors g with axis . g > min_cos. `axis` must be unit norm.
inline CapSample sample_cap(std::span<const double> axis, double min_cos, std::size_t n, Rng& rng,
                            CapSampling mode = CapSampling::automatic) {
  if (axis.size() < 2) throw DomainError("cap sampling needs dim >= 2");
  if (!(min_cos >= -1.0 && min_cos < 1.0)) throw DomainError("cap threshold must lie in [-1, 1)");
  CapSample out;
  out.points.reserve(n);
  std::size_t draws = 0;
  std::size_t accepted = 0;
  const auto draw = [&]() {
    ++draws;
    auto g = rng.unit_vector(axis.size());
    if (dot(axis, g) > min_cos) {
      ++accepted;
      return std::optional<std::vector<double>>(std::move(g));
    }
    return std::optional<std::vector<double>>();
  };

  if (mode == CapSampling::automatic) {
    std::vector<std::vector<double>> pilot;
    for (std::size_t i = 0; i < detail::kPilotDraws; ++i) {
      if (auto g = draw()) pilot.push_back(std::move(*g));
    }
    const double rate = static_cast<double>(accepted) / static_cast<double>(draws);
    if (rate < detail::kMinAcceptance) {
      out.method_used = CapSampling::tangent;
      out.acceptance_rate = rate;
      for (std::size_t i = 0; i < n; ++i) {
        out.points.push_back(detail::tangent_cap_point(axis, min_cos, rng));
      }
      return out;
    }
    for (auto& g : pilot) {
      if (out.points.size() == n) break;
      out.points.push_back(std::move(g));
    }
    mode = CapSampling::rejection;
  }

  if (mode == CapSampling::tangent) {
    out.method_used = CapSampling::tangent;
    for (std::size_t i = 0; i < n; ++i) {
      out.points.push_back(detail::tangent_cap_point(axis, min_cos, rng));
    }
    return out;
  }

  out.method_used = CapSampling::rejection;
  const std::size_t budget = draws + detail::kMaxDrawsPerPoint * (n - out.points.size());
  while (out.points.size() < n) {
    if (draws >= budget) {
      throw SamplingError("spherical cap rejection sampling exhausted its draw budget",
                          static_cast<double>(accepted) / static_cast<double>(draws));
    }
    if (auto g = draw()) out.points.push_back(std::move(*g));
  }
  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(draws);
  return out;
}

/// The per-example step of the bound: unit g with w . g >= 1 - eps^2/8 gives
/// |g . v - w . v| <= ||g - w|| = sqrt(2 (1 - g . w)) <= eps / 2.
inline bool pointwise_step_holds(std::span<const double> w, std::span<const double> v,
                                 std::span<const double> g, double epsilon) {
  return std::fabs(dot(g, v) - dot(w, v)) <= epsilon / 2.0;
}

struct Theorem2Options {
  bool align_concept_with_classifier = false;  // force v = w_h
  CapSampling sampling = CapSampling::automatic;
};

struct TrialRecord {
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  double epsilon = 0.0;
  double delta = 0.0;
  double theta_h = 0.0;
  std::int64_t n_used = 0;
  double tcav = 0.0;
  double tcav_con = 0.0;
  double class_conditioned = 0.0;
  double lhs_gap = 0.0;
  bool bound_holds = false;
  CapSampling sampling = CapSampling::rejection;
  double acceptance_rate = 1.0;
};

inline TrialRecord theorem2_trial(double epsilon, double delta, std::size_t dim,
                                  std::uint64_t seed, const Theorem2Options& opt = {}) {
  const std::int64_t n = hoeffding_sample_size(epsilon, delta);
  if (dim < 2) throw DomainError("dim must be at least 2");
  Rng rng(seed, 0x746832ULL);
  auto w = rng.unit_vector(dim);
  auto v = opt.align_concept_with_classifier ? w : rng.unit_vector(dim);
  const double theta = 1.0 - epsilon * epsilon / 8.0;
  const LinearConceptModel model(w, theta, v);

  const auto cap = sample_cap(model.w_h(), theta, static_cast<std::size_t>(n), rng, opt.sampling);
  std::vector<EmbeddedExample> xs;
  xs.reserve(cap.points.size());
  for (std::size_t i = 0; i < cap.points.size(); ++i) {
    xs.push_back({"g" + std::to_string(i), cap.points[i]});
  }

  TrialRecord r;
  r.seed = seed;
  r.dim = dim;
  r.epsilon = epsilon;
  r.delta = delta;
  r.theta_h = theta;
  r.n_used = n;
  r.tcav = tcav_discrete(model, xs);
  r.tcav_con = tcav_continuous(model, xs);
  r.class_conditioned = class_conditioned_from_embeddings(model, xs);
  r.lhs_gap = std::fabs(r.class_conditioned - r.tcav_con);
  r.bound_holds = r.lhs_gap < epsilon;
  r.sampling = cap.method_used;
  r.acceptance_rate = cap.acceptance_rate;
  return r;
}

/// Trial i uses seed derive_seed(seed, i); results are in trial order for any
/// thread count.
inline std::vector<TrialRecord> theorem2_batch(double epsilon, double delta, std::size_t dim,
                                               std::size_t trials, std::uint64_t seed,
                                               unsigned threads = 1,
                                               const Theorem2Options& opt = {}) {
  std::vector<TrialRecord> out(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    out[i] = theorem2_trial(epsilon, delta, dim, derive_seed(seed, i), opt);
  });
  return out;
}

/// delta plus three binomial standard errors over `trials` trials.
inline double theorem2_failure_allowance(double delta, std::size_t trials) {
  return delta + 3.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(trials));
}

inline nlohmann::ordered_json to_json(const TrialRecord& r) {
  nlohmann::ordered_json j;
  j["seed"] = r.seed;
  j["dim"] = r.dim;
  j["epsilon"] = r.epsilon;
  j["delta"] = r.delta;
  j["theta_h"] = r.theta_h;
  j["n_used"] = r.n_used;
  j["tcav"] = r.tcav;
  j["tcav_con"] = r.tcav_con;
  j["class_conditioned"] = r.class_conditioned;
  j["lhs_gap"] = r.lhs_gap;
  j["bound_holds"] = r.bound_holds;
  j["sampling"] = std::string(to_string(r.sampling));
  j["acceptance_rate"] = r.acceptance_rate;
  return j;
}

inline void write_trials_jsonl(std::span<const TrialRecord> records, std::ostream& out) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

}  // namespace conceptx
