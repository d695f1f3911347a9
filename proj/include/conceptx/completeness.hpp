#pragma once

// Completeness-aware score for a single binary concept, with y := h(x):
//
//   S = sup_g Pr[h(x) = g(c(x))]
//
// g ranges over decoders {-1,+1} -> {-1,+1}. The closed form aggregates the
// concept-conditioned measure over both concept levels,
//
//   S = 1/2 + 1/2 * sum_l |E[h | c = l]| * Pr(c = l),
//
// and the brute-force route enumerates the four decoders directly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "conceptx/dataset.hpp"
#include "conceptx/error.hpp"
#include "conceptx/numeric.hpp"

namespace conceptx {

enum class CompletenessMethod { closed_form, brute_force };

struct LevelTerm {
  double abs_conditional_mean = 0.0;  // |E[h | c = level]|, 0 when the level is empty
  double probability = 0.0;           // Pr(c = level)
};

struct CompletenessScore {
  double value = 0.5;
  LevelTerm positive;  // level +1
  LevelTerm negative;  // level -1
  CompletenessMethod method = CompletenessMethod::closed_form;
};

namespace detail {

inline std::size_t require_binary_concept(const ConceptDataset& d, std::string_view name) {
  const std::size_t j = d.concept_index(name);
  for (const auto& ex : d.examples()) {
    const double c = ex.concepts[j];
    if (c != 1.0 && c != -1.0) {
      throw DomainError("completeness score needs a binary concept: '" + std::string(name) +
                        "' has value " + format_double(c) + " on example '" + ex.id +
                        "'; binarize it first (e.g. c >= theta -> +1)");
    }
  }
  return j;
}

// Joint masses Pr(h = a, c = b); index 0 is -1, index 1 is +1.
inline std::array<std::array<CompensatedSum, 2>, 2> joint_masses(const ConceptDataset& d,
                                                                  std::size_t j) {
  std::array<std::array<CompensatedSum, 2>, 2> m{};
  for (const auto& ex : d.examples()) {
    m[ex.prediction > 0][ex.concepts[j] > 0].add(ex.weight);
  }
  return m;
}

inline std::array<LevelTerm, 2> level_terms(const ConceptDataset& d, std::size_t j) {
  std::array<CompensatedSum, 2> signed_mass{};
  std::array<CompensatedSum, 2> mass{};
  for (const auto& ex : d.examples()) {
    const std::size_t level = ex.concepts[j] > 0;
    signed_mass[level].add(ex.weight * ex.prediction);
    mass[level].add(ex.weight);
  }
  std::array<LevelTerm, 2> terms{};
  for (std::size_t l = 0; l < 2; ++l) {
    terms[l].probability = mass[l].value();
    if (terms[l].probability > 0.0) {
      terms[l].abs_conditional_mean =
          std::min(1.0, std::fabs(signed_mass[l].value()) / terms[l].probability);
    }
  }
  return terms;
}

}  // namespace detail

inline CompletenessScore completeness_closed_form(const ConceptDataset& d,
                                                  std::string_view concept_name) {
  const std::size_t j = detail::require_binary_concept(d, concept_name);
  const auto terms = detail::level_terms(d, j);
  CompletenessScore s;
  s.method = CompletenessMethod::closed_form;
  s.negative = terms[0];
  s.positive = terms[1];
  CompensatedSum agg;
  for (const auto& t : terms) {
    if (t.probability > 0.0) agg.add(t.abs_conditional_mean * t.probability);
  }
  s.value = 0.5 + 0.5 * agg.value();
  return s;
}

inline CompletenessScore completeness_brute_force(const ConceptDataset& d,
                                                  std::string_view concept_name) {
  const std::size_t j = detail::require_binary_concept(d, concept_name);
  const auto m = detail::joint_masses(d, j);
  double best = 0.0;
  // decoder bit l set => g(level l) = +1
  for (unsigned decoder = 0; decoder < 4; ++decoder) {
    CompensatedSum agree;
    for (std::size_t level = 0; level < 2; ++level) {
      const std::size_t out = (decoder >> level) & 1u;
      agree.add(m[out][level].value());
    }
    best = std::max(best, agree.value());
  }
  CompletenessScore s;
  s.method = CompletenessMethod::brute_force;
  const auto terms = detail::level_terms(d, j);
  s.negative = terms[0];
  s.positive = terms[1];
  s.value = best;
  return s;
}

/// Normalized completeness (S - a_r) / (1 - a_r); the denominator's model
/// accuracy term is 1 because y := h(x). a_r defaults to 0, giving S itself.
inline double normalized_completeness(const CompletenessScore& s, double random_accuracy = 0.0) {
  if (!(random_accuracy >= 0.0 && random_accuracy < 1.0)) {
    throw DomainError("random-prediction accuracy must lie in [0, 1)");
  }
  return (s.value - random_accuracy) / (1.0 - random_accuracy);
}

}  // namespace conceptx
