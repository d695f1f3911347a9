#pragma once

// The three axiomatic concept-importance measures, each a weighted empirical
// expectation over a ConceptDataset:
//
//   symmetric            E[h(x) c(x)]
//   class-conditioned    E[c(x) | h(x) = 1]
//   concept-conditioned  E[h(x) | c(x) >= theta]
//
// All reductions run in dataset order with compensated summation, so results
// are bit-identical for identical inputs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "conceptx/dataset.hpp"
#include "conceptx/error.hpp"
#include "conceptx/hoeffding.hpp"
#include "conceptx/numeric.hpp"

namespace conceptx {

enum class MeasureKind { symmetric, class_conditioned, concept_conditioned };

inline std::string_view to_string(MeasureKind k) noexcept {
  switch (k) {
    case MeasureKind::symmetric:
      return "symmetric";
    case MeasureKind::class_conditioned:
      return "class_conditioned";
    case MeasureKind::concept_conditioned:
      return "concept_conditioned";
  }
  return "unknown";
}

inline MeasureKind parse_measure_kind(std::string_view s) {
  if (s == "symmetric") return MeasureKind::symmetric;
  if (s == "class_conditioned" || s == "class") return MeasureKind::class_conditioned;
  if (s == "concept_conditioned" || s == "concept") return MeasureKind::concept_conditioned;
  throw DomainError("unknown measure '" + std::string(s) + "'");
}

/// Which label plays the role of h: the model's prediction, or the ground
/// truth y (for the reference series drawn next to model bars).
enum class LabelSource { prediction, ground_truth };

struct MeasureResult {
  MeasureKind kind = MeasureKind::symmetric;
  std::string concept_name;
  double value = 0.0;
  std::optional<double> threshold;
  double effective_count = 0.0;   // total weight of the conditioning set
  std::int64_t sample_count = 0;  // number of examples in the conditioning set
  std::optional<double> confidence_radius;
};

namespace detail {

inline int label_of(const LabeledExample& ex, LabelSource src) {
  return src == LabelSource::prediction ? ex.prediction : *ex.ground_truth;
}

inline void require_labels(const ConceptDataset& d, LabelSource src) {
  if (src == LabelSource::ground_truth && !d.all_have_ground_truth()) {
    throw ValidationError("ground_truth requested but missing on some examples");
  }
}

inline double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace detail

inline MeasureResult symmetric_measure(const ConceptDataset& d, std::string_view concept_name,
                                       LabelSource src = LabelSource::prediction) {
  const std::size_t j = d.concept_index(concept_name);
  detail::require_labels(d, src);
  CompensatedSum num;
  CompensatedSum mass;
  for (const auto& ex : d.examples()) {
    num.add(ex.weight * detail::label_of(ex, src) * ex.concepts[j]);
    mass.add(ex.weight);
  }
  MeasureResult r;
  r.kind = MeasureKind::symmetric;
  r.concept_name = std::string(concept_name);
  r.value = detail::clamp_unit(num.value());
  r.effective_count = mass.value();
  r.sample_count = static_cast<std::int64_t>(d.size());
  return r;
}

/// E[c | label = cls]. The default cls = +1 is the class-conditioned measure;
/// cls = -1 is its complement, used by the conditional decomposition of the
/// symmetric measure.
inline MeasureResult class_conditioned_measure(const ConceptDataset& d,
                                               std::string_view concept_name, int cls = 1,
                                               LabelSource src = LabelSource::prediction) {
  if (!is_sign(cls)) throw DomainError("class must be -1 or +1");
  const std::size_t j = d.concept_index(concept_name);
  detail::require_labels(d, src);
  CompensatedSum num;
  CompensatedSum mass;
  std::int64_t count = 0;
  for (const auto& ex : d.examples()) {
    if (detail::label_of(ex, src) != cls) continue;
    num.add(ex.weight * ex.concepts[j]);
    mass.add(ex.weight);
    ++count;
  }
  if (!(mass.value() > 0.0)) {
    throw UndefinedMeasureError("class-conditioned measure of '" + std::string(concept_name) +
                                "' undefined: no mass with label " + std::to_string(cls));
  }
  MeasureResult r;
  r.kind = MeasureKind::class_conditioned;
  r.concept_name = std::string(concept_name);
  r.value = detail::clamp_unit(num.value() / mass.value());
  r.effective_count = mass.value();
  r.sample_count = count;
  return r;
}

/// E[label | c >= theta]; ties c == theta are included.
inline MeasureResult concept_conditioned_measure(const ConceptDataset& d,
                                                 std::string_view concept_name, double theta,
                                                 LabelSource src = LabelSource::prediction) {
  if (!(theta >= -1.0 && theta <= 1.0)) {
    throw DomainError("theta must lie in [-1, 1]");
  }
  const std::size_t j = d.concept_index(concept_name);
  detail::require_labels(d, src);
  CompensatedSum num;
  CompensatedSum mass;
  std::int64_t count = 0;
  for (const auto& ex : d.examples()) {
    if (!(ex.concepts[j] >= theta)) continue;
    num.add(ex.weight * detail::label_of(ex, src));
    mass.add(ex.weight);
    ++count;
  }
  if (!(mass.value() > 0.0)) {
    throw UndefinedMeasureError("concept-conditioned measure of '" +
                                std::string(concept_name) + "' undefined: no mass with c >= " +
                                format_double(theta));
  }
  MeasureResult r;
  r.kind = MeasureKind::concept_conditioned;
  r.concept_name = std::string(concept_name);
  r.value = detail::clamp_unit(num.value() / mass.value());
  r.threshold = theta;
  r.effective_count = mass.value();
  r.sample_count = count;
  return r;
}

/// Dispatches on kind; theta is mandatory for the concept-conditioned measure.
inline MeasureResult compute_measure(const ConceptDataset& d, MeasureKind kind,
                                     std::string_view concept_name,
                                     std::optional<double> theta = std::nullopt,
                                     LabelSource src = LabelSource::prediction) {
  switch (kind) {
    case MeasureKind::symmetric:
      return symmetric_measure(d, concept_name, src);
    case MeasureKind::class_conditioned:
      return class_conditioned_measure(d, concept_name, 1, src);
    case MeasureKind::concept_conditioned:
      if (!theta) throw DomainError("concept-conditioned measure requires an explicit theta");
      return concept_conditioned_measure(d, concept_name, *theta, src);
  }
  throw DomainError("unknown measure kind");
}

/// Attaches the Hoeffding radius for the result's sample count at confidence 1 - delta.
inline MeasureResult with_confidence(MeasureResult r, double delta) {
  r.confidence_radius = hoeffding_radius(r.sample_count, delta);
  return r;
}

/// Weighted Pr(label = cls).
inline double label_probability(const ConceptDataset& d, int cls,
                                LabelSource src = LabelSource::prediction) {
  detail::require_labels(d, src);
  CompensatedSum mass;
  for (const auto& ex : d.examples()) {
    if (detail::label_of(ex, src) == cls) mass.add(ex.weight);
  }
  return mass.value();
}

}  // namespace conceptx
