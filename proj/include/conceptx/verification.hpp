#pragma once

// Executable checks of the structural claims behind the measures, shared by
// the `verify` command and the test suites.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "conceptx/completeness.hpp"
#include "conceptx/dataset.hpp"
#include "conceptx/measures.hpp"
#include "conceptx/parallel.hpp"
#include "conceptx/rng.hpp"
#include "conceptx/synthetic.hpp"
#include "conceptx/theorem2.hpp"

namespace conceptx {

inline constexpr double kIdentityTolerance = 1e-12;

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  bool passed = false;
  std::string detail;
  std::vector<nlohmann::ordered_json> records;  // failures (or every trial for theorem2)
};

/// Every example duplicated with half its weight; all measures are unchanged.
inline ConceptDataset duplicate_halved(const ConceptDataset& d) {
  std::vector<LabeledExample> out;
  out.reserve(2 * d.size());
  for (const auto& ex : d.examples()) {
    LabeledExample a = ex;
    LabeledExample b = ex;
    a.weight = ex.weight / 2;
    b.weight = ex.weight / 2;
    a.id += "#1";
    b.id += "#2";
    out.push_back(std::move(a));
    out.push_back(std::move(b));
  }
  return ConceptDataset::from_examples(d.concept_names(), std::move(out),
                                       WeightHandling::require_unit);
}

/// All three measures of every concept, with std::nullopt for undefined ones.
inline std::vector<std::optional<double>> measure_profile(const ConceptDataset& d,
                                                          double theta) {
  std::vector<std::optional<double>> out;
  for (const auto& name : d.concept_names()) {
    out.push_back(symmetric_measure(d, name).value);
    try {
      out.push_back(class_conditioned_measure(d, name).value);
    } catch (const UndefinedMeasureError&) {
      out.push_back(std::nullopt);
    }
    try {
      out.push_back(concept_conditioned_measure(d, name, theta).value);
    } catch (const UndefinedMeasureError&) {
      out.push_back(std::nullopt);
    }
  }
  return out;
}

inline bool profiles_match(const std::vector<std::optional<double>>& a,
                           const std::vector<std::optional<double>>& b,
                           double tol = kIdentityTolerance) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].has_value() != b[i].has_value()) return false;
    if (a[i] && std::fabs(*a[i] - *b[i]) > tol) return false;
  }
  return true;
}

/// k / 2^m with m in [1, 10] and odd k: exactly representable in (0, 1).
inline double random_dyadic_fraction(Rng& rng) {
  const int m = 1 + static_cast<int>(rng.index(10));
  const std::uint64_t denom = std::uint64_t{1} << m;
  const std::uint64_t k = 2 * rng.index(denom / 2) + 1;
  return std::ldexp(static_cast<double>(k), -m);
}

/// Recursivity under random dyadic splits, invariance under duplicate-and-halve
/// reweighting, and the [-1, 1] range of every defined measure.
inline SuiteResult run_axioms_suite(std::size_t trials, std::uint64_t seed, unsigned threads = 1) {
  SuiteResult res;
  res.name = "axioms";
  res.trials = trials;
  std::vector<std::optional<nlohmann::ordered_json>> failures(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const std::uint64_t s = derive_seed(seed, t);
    Rng rng(s);
    const std::size_t n = 1 + rng.index(20);
    const auto kind = rng.bernoulli(0.5) ? synth::ConceptKind::binary : synth::ConceptKind::continuous;
    const auto d = synth::random_dataset(rng, n, 2, kind);
    const double theta = static_cast<double>(static_cast<int>(rng.index(5)) - 2) / 2.0;
    const auto base = measure_profile(d, theta);

    std::string reason;
    for (const auto& v : base) {
      if (v && !(*v >= -1.0 && *v <= 1.0)) reason = "measure outside [-1, 1]";
    }
    const std::string& id = d.examples()[rng.index(d.size())].id;
    const double fraction = random_dyadic_fraction(rng);
    if (reason.empty() && !profiles_match(base, measure_profile(synth::split_example(d, id, fraction), theta))) {
      reason = "split of '" + id + "' at " + format_double(fraction) + " changed a measure";
    }
    if (reason.empty() && !profiles_match(base, measure_profile(duplicate_halved(d), theta))) {
      reason = "duplicate-and-halve changed a measure";
    }
    if (!reason.empty()) {
      nlohmann::ordered_json j;
      j["trial"] = t;
      j["seed"] = s;
      j["reason"] = reason;
      failures[t] = j;
    }
  });
  for (auto& f : failures) {
    if (f) {
      ++res.failures;
      res.records.push_back(std::move(*f));
    }
  }
  res.passed = res.failures == 0;
  res.detail = std::to_string(trials - res.failures) + "/" + std::to_string(trials) +
               " datasets invariant within 1e-12";
  return res;
}

/// Closed-form completeness equals the maximum over the four decoders.
inline SuiteResult run_theorem1_suite(std::size_t trials, std::uint64_t seed, unsigned threads = 1) {
  SuiteResult res;
  res.name = "theorem1";
  res.trials = trials;
  std::vector<std::optional<nlohmann::ordered_json>> failures(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const std::uint64_t s = derive_seed(seed, t);
    Rng rng(s);
    const auto d = synth::random_dataset(rng, 1 + rng.index(12), 1, synth::ConceptKind::binary);
    const double closed = completeness_closed_form(d, "c0").value;
    const double brute = completeness_brute_force(d, "c0").value;
    if (!(std::fabs(closed - brute) <= kIdentityTolerance)) {
      nlohmann::ordered_json j;
      j["trial"] = t;
      j["seed"] = s;
      j["closed_form"] = closed;
      j["brute_force"] = brute;
      failures[t] = j;
    }
  });
  for (auto& f : failures) {
    if (f) {
      ++res.failures;
      res.records.push_back(std::move(*f));
    }
  }
  res.passed = res.failures == 0;
  res.detail = std::to_string(trials - res.failures) + "/" + std::to_string(trials) +
               " datasets with closed form == brute force within 1e-12";
  return res;
}

/// Passes when the empirical failure rate stays within delta plus three
/// binomial standard errors.
inline SuiteResult run_theorem2_suite(std::size_t trials, std::uint64_t seed, double epsilon,
                                      double delta, std::size_t dim, unsigned threads = 1) {
  SuiteResult res;
  res.name = "theorem2";
  res.trials = trials;
  const auto batch = theorem2_batch(epsilon, delta, dim, trials, seed, threads);
  for (const auto& r : batch) {
    if (!r.bound_holds) ++res.failures;
    res.records.push_back(to_json(r));
  }
  const double rate = trials ? static_cast<double>(res.failures) / static_cast<double>(trials) : 0.0;
  const double allowance = theorem2_failure_allowance(delta, trials);
  res.passed = trials > 0 && rate <= allowance;
  res.detail = "dim " + std::to_string(dim) + ": failure rate " + format_double(rate) +
               " (allowed " + format_double(allowance) + ")";
  return res;
}

}  // namespace conceptx
