#pragma once

// Deterministic synthetic instances for exercising the measures: planted
// datasets, weight splits, sampled populations with known measure values and a
// two-level class hierarchy.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "conceptx/dataset.hpp"
#include "conceptx/error.hpp"
#include "conceptx/numeric.hpp"
#include "conceptx/rng.hpp"

namespace conceptx::synth {

enum class ConceptKind { binary, continuous };

struct SyntheticSpec {
  std::size_t n_examples = 100;
  std::size_t n_concepts = 1;
  ConceptKind concept_kind = ConceptKind::binary;
  std::uint64_t seed = 0;
  /// concept name -> target symmetric measure; planted concepts come first in
  /// the schema, remaining slots are named concept_<k>.
  std::vector<std::pair<std::string, double>> planted_measures;
  /// When set, ground_truth = prediction flipped with this probability.
  std::optional<double> ground_truth_flip;
};

inline std::string example_id(std::size_t i) {
  std::string s = std::to_string(i);
  return "x" + std::string(s.size() < 5 ? 5 - s.size() : 0, '0') + s;
}

/// Builds the joint (h, c) table directly: for a binary concept with target m,
/// round(n (1 + m) / 2) examples agree with the prediction, split evenly across
/// the two prediction classes. Continuous concepts use c = h * t with the t's
/// averaging to m exactly in antisymmetric pairs.
inline ConceptDataset generate_dataset(const SyntheticSpec& spec) {
  const std::size_t n = spec.n_examples;
  if (n == 0) throw InfeasibleError("n_examples must be positive");
  if (spec.n_concepts == 0) throw InfeasibleError("n_concepts must be positive");
  if (spec.planted_measures.size() > spec.n_concepts) {
    throw InfeasibleError("more planted concepts than n_concepts");
  }
  if (spec.ground_truth_flip && !(*spec.ground_truth_flip >= 0.0 && *spec.ground_truth_flip <= 1.0)) {
    throw InfeasibleError("ground_truth_flip must lie in [0, 1]");
  }
  std::vector<std::string> names;
  std::unordered_set<std::string> seen;
  for (const auto& [name, target] : spec.planted_measures) {
    if (!(target >= -1.0 && target <= 1.0)) {
      throw InfeasibleError("planted value for '" + name + "' outside [-1, 1]");
    }
    if (!seen.insert(name).second) throw InfeasibleError("concept '" + name + "' planted twice");
    names.push_back(name);
  }
  for (std::size_t k = 0; names.size() < spec.n_concepts; ++k) {
    std::string name = "concept_" + std::to_string(k);
    if (seen.insert(name).second) names.push_back(std::move(name));
  }

  Rng rng(spec.seed, 0x67656eULL);
  const std::size_t n_plus = (n + 1) / 2;
  std::vector<int> h(n, -1);
  std::fill_n(h.begin(), n_plus, 1);
  rng.shuffle(h);
  std::vector<std::size_t> plus_idx, minus_idx, all_idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    (h[i] > 0 ? plus_idx : minus_idx).push_back(i);
    all_idx[i] = i;
  }

  std::vector<std::vector<double>> columns(names.size(), std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < names.size(); ++j) {
    auto& col = columns[j];
    const bool planted = j < spec.planted_measures.size();
    if (spec.concept_kind == ConceptKind::binary) {
      if (!planted) {
        for (auto& c : col) c = rng.bernoulli(0.5) ? 1.0 : -1.0;
        continue;
      }
      const double m = spec.planted_measures[j].second;
      const auto agree = static_cast<std::size_t>(
          std::llround(static_cast<double>(n) * (1.0 + m) / 2.0));
      const std::size_t agree_plus = std::min((agree + 1) / 2, plus_idx.size());
      const std::size_t agree_minus = agree - agree_plus;
      if (agree_minus > minus_idx.size()) {
        throw InfeasibleError("cannot plant " + format_double(m) + " on " + std::to_string(n) +
                              " examples");
      }
      auto p = plus_idx;
      auto q = minus_idx;
      rng.shuffle(p);
      rng.shuffle(q);
      for (std::size_t k = 0; k < p.size(); ++k) col[p[k]] = k < agree_plus ? 1.0 : -1.0;
      for (std::size_t k = 0; k < q.size(); ++k) col[q[k]] = k < agree_minus ? -1.0 : 1.0;
    } else {
      if (!planted) {
        for (auto& c : col) c = rng.uniform(-1.0, 1.0);
        continue;
      }
      const double m = spec.planted_measures[j].second;
      const double spread = std::min(1.0 - std::fabs(m), 0.5);
      auto order = all_idx;
      rng.shuffle(order);
      for (std::size_t k = 0; k + 1 < n; k += 2) {
        const double r = spread * rng.uniform();
        col[order[k]] = h[order[k]] * (m + r);
        col[order[k + 1]] = h[order[k + 1]] * (m - r);
      }
      if (n % 2 == 1) col[order[n - 1]] = h[order[n - 1]] * m;
    }
  }

  std::vector<LabeledExample> examples(n);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& ex = examples[i];
    ex.id = example_id(i);
    ex.prediction = h[i];
    ex.weight = w;
    ex.concepts.resize(names.size());
    for (std::size_t j = 0; j < names.size(); ++j) ex.concepts[j] = columns[j][i];
    if (spec.ground_truth_flip) {
      ex.ground_truth = rng.bernoulli(*spec.ground_truth_flip) ? -h[i] : h[i];
    }
  }
  return ConceptDataset::from_examples(std::move(names), std::move(examples));
}

/// Replaces example `id` by two copies carrying fraction * w and the remainder.
/// The copies keep their position; no renormalization is applied.
inline ConceptDataset split_example(const ConceptDataset& d, const std::string& id,
                                    double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw DomainError("fraction must lie in (0, 1)");
  std::unordered_set<std::string> ids;
  for (const auto& ex : d.examples()) ids.insert(ex.id);
  if (!ids.count(id)) throw ValidationError("unknown example id '" + id + "'");
  const auto fresh = [&](std::string base) {
    while (ids.count(base)) base += "'";
    ids.insert(base);
    return base;
  };
  std::vector<LabeledExample> out;
  out.reserve(d.size() + 1);
  for (const auto& ex : d.examples()) {
    if (ex.id != id) {
      out.push_back(ex);
      continue;
    }
    LabeledExample a = ex;
    LabeledExample b = ex;
    a.weight = fraction * ex.weight;
    b.weight = ex.weight - a.weight;
    a.id = fresh(ex.id + "#a");
    b.id = fresh(ex.id + "#b");
    out.push_back(std::move(a));
    out.push_back(std::move(b));
  }
  return ConceptDataset::from_examples(d.concept_names(), std::move(out),
                                       WeightHandling::require_unit);
}

/// Random dataset with random positive weights (renormalized), for property
/// tests. Binary concepts take values in {-1, +1}; continuous ones are drawn
/// from a few-level grid mixed with uniform draws so threshold ties occur.
inline ConceptDataset random_dataset(Rng& rng, std::size_t n, std::size_t n_concepts,
                                     ConceptKind kind, bool with_ground_truth = false) {
  std::vector<std::string> names;
  for (std::size_t j = 0; j < n_concepts; ++j) names.push_back("c" + std::to_string(j));
  std::vector<LabeledExample> ex(n);
  for (std::size_t i = 0; i < n; ++i) {
    ex[i].id = example_id(i);
    ex[i].prediction = rng.bernoulli(0.5) ? 1 : -1;
    ex[i].weight = rng.uniform_open_low();
    ex[i].concepts.resize(n_concepts);
    for (auto& c : ex[i].concepts) {
      if (kind == ConceptKind::binary) {
        c = rng.bernoulli(0.5) ? 1.0 : -1.0;
      } else if (rng.bernoulli(0.3)) {
        c = static_cast<double>(static_cast<int>(rng.index(5)) - 2) / 2.0;
      } else {
        c = rng.uniform(-1.0, 1.0);
      }
    }
    if (with_ground_truth) ex[i].ground_truth = rng.bernoulli(0.5) ? 1 : -1;
  }
  return ConceptDataset::from_examples(std::move(names), std::move(ex));
}

/// Population over binary (h, c) given by its joint probabilities.
struct JointTable {
  double h_pos_c_pos = 0.25;
  double h_pos_c_neg = 0.25;
  double h_neg_c_pos = 0.25;
  double h_neg_c_neg = 0.25;

  /// P(c = h) = (1 + m) / 2 independently of h, with P(h = +1) = p_pos.
  static JointTable planted(double symmetric_target, double p_pos = 0.5) {
    if (!(symmetric_target >= -1.0 && symmetric_target <= 1.0)) {
      throw InfeasibleError("planted symmetric value outside [-1, 1]");
    }
    if (!(p_pos > 0.0 && p_pos < 1.0)) throw InfeasibleError("p_pos must lie in (0, 1)");
    const double agree = (1.0 + symmetric_target) / 2.0;
    return {p_pos * agree, p_pos * (1.0 - agree), (1.0 - p_pos) * (1.0 - agree),
            (1.0 - p_pos) * agree};
  }

  double symmetric() const { return h_pos_c_pos + h_neg_c_neg - h_pos_c_neg - h_neg_c_pos; }
  double class_conditioned() const {
    return (h_pos_c_pos - h_pos_c_neg) / (h_pos_c_pos + h_pos_c_neg);
  }
  double concept_conditioned() const {
    return (h_pos_c_pos - h_neg_c_pos) / (h_pos_c_pos + h_neg_c_pos);
  }

  /// n i.i.d. draws with uniform weights (the plain empirical estimator).
  ConceptDataset sample(std::size_t n, Rng& rng, const std::string& concept_name = "c") const {
    const std::array<double, 3> cdf{h_pos_c_pos, h_pos_c_pos + h_pos_c_neg,
                                    h_pos_c_pos + h_pos_c_neg + h_neg_c_pos};
    std::vector<LabeledExample> ex(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = rng.uniform();
      int h = 1;
      double c = 1.0;
      if (u < cdf[0]) {
      } else if (u < cdf[1]) {
        c = -1.0;
      } else if (u < cdf[2]) {
        h = -1;
      } else {
        h = -1;
        c = -1.0;
      }
      ex[i] = {example_id(i), h, {c}, 1.0, std::nullopt};
    }
    return ConceptDataset::from_examples({concept_name}, std::move(ex));
  }
};

/// Fine classes nested under a parent group, next to an unrelated group and
/// filler classes. A noisy multi-class model picks the true class except with
/// probability error_rate, when it picks another class uniformly.
struct HierarchySpec {
  std::size_t n_examples = 2400;
  std::size_t n_children = 6;   // fine classes under the parent concept
  std::size_t n_unrelated = 2;  // classes under the unrelated concept
  std::size_t n_filler = 4;
  double error_rate = 0.03;
  std::uint64_t seed = 0;
};

struct HierarchyDatasets {
  /// One-vs-all predictor per fine class; concepts {parent, unrelated}.
  std::vector<ConceptDataset> child_predictors;
  /// Coarse parent-group predictor; concepts child_0..child_{k-1}.
  ConceptDataset parent_predictor;
  /// Coarse unrelated-group predictor; same concepts.
  ConceptDataset unrelated_predictor;
};

inline HierarchyDatasets generate_hierarchy(const HierarchySpec& spec) {
  const std::size_t n_classes = spec.n_children + spec.n_unrelated + spec.n_filler;
  if (spec.n_children == 0 || spec.n_unrelated == 0 || n_classes < 2 || spec.n_examples == 0) {
    throw InfeasibleError("hierarchy needs children, an unrelated group and examples");
  }
  Rng rng(spec.seed, 0x686965ULL);
  std::vector<std::size_t> truth(spec.n_examples), predicted(spec.n_examples);
  for (std::size_t i = 0; i < spec.n_examples; ++i) {
    truth[i] = static_cast<std::size_t>(rng.index(n_classes));
    predicted[i] = truth[i];
    if (rng.bernoulli(spec.error_rate)) {
      const auto other = static_cast<std::size_t>(rng.index(n_classes - 1));
      predicted[i] = other >= truth[i] ? other + 1 : other;
    }
  }
  const auto is_child = [&](std::size_t k) { return k < spec.n_children; };
  const auto is_unrelated = [&](std::size_t k) {
    return k >= spec.n_children && k < spec.n_children + spec.n_unrelated;
  };
  const auto sign = [](bool b) { return b ? 1 : -1; };

  const auto build = [&](auto&& predict, std::vector<std::string> names, auto&& concepts) {
    std::vector<LabeledExample> ex(spec.n_examples);
    for (std::size_t i = 0; i < spec.n_examples; ++i) {
      ex[i].id = example_id(i);
      ex[i].prediction = predict(predicted[i]);
      ex[i].ground_truth = predict(truth[i]);
      ex[i].weight = 1.0;
      ex[i].concepts = concepts(truth[i]);
    }
    return ConceptDataset::from_examples(std::move(names), std::move(ex));
  };

  std::vector<std::string> fine_names;
  for (std::size_t k = 0; k < spec.n_children; ++k) fine_names.push_back("child_" + std::to_string(k));
  const auto fine_concepts = [&](std::size_t t) {
    std::vector<double> c(spec.n_children, -1.0);
    if (is_child(t)) c[t] = 1.0;
    return c;
  };
  const auto group_concepts = [&](std::size_t t) {
    return std::vector<double>{is_child(t) ? 1.0 : -1.0, is_unrelated(t) ? 1.0 : -1.0};
  };

  HierarchyDatasets out{
      {},
      build([&](std::size_t k) { return sign(is_child(k)); }, fine_names, fine_concepts),
      build([&](std::size_t k) { return sign(is_unrelated(k)); }, fine_names, fine_concepts)};
  for (std::size_t child = 0; child < spec.n_children; ++child) {
    out.child_predictors.push_back(build([&](std::size_t k) { return sign(k == child); },
                                         {"parent", "unrelated"}, group_concepts));
  }
  return out;
}

}  // namespace conceptx::synth
