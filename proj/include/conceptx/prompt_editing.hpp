#pragma once

// Zero-shot classification over prompt embeddings and prompt editing: a class
// prompt I_z is replaced by I_z - lambda * mean_{c in C} I_c to remove the
// influence of irrelevant concepts, with lambda optionally fitted on few-shot
// data by grid search.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conceptx/embedding_file.hpp"
#include "conceptx/error.hpp"
#include "conceptx/numeric.hpp"

namespace conceptx {

enum class PromptKind { class_prompt, concept_prompt, edited };

struct PromptEmbedding {
  std::string name;
  std::vector<double> vector;
  PromptKind kind = PromptKind::class_prompt;
};

/// Checks the unit-norm invariant; edited prompts may have any norm.
inline void validate_prompt(const PromptEmbedding& p) {
  if (p.vector.empty()) throw ValidationError("prompt '" + p.name + "' has no components");
  if (p.kind != PromptKind::edited && !is_unit(p.vector)) {
    throw ValidationError("prompt '" + p.name + "' must be unit norm");
  }
}

inline std::vector<PromptEmbedding> prompts_from(const EmbeddingSet& set, PromptKind kind) {
  std::vector<PromptEmbedding> out;
  out.reserve(set.vectors.size());
  for (const auto& r : set.vectors) out.push_back({r.id, r.values, kind});
  return out;
}

struct EditPlan {
  std::string class_name;
  std::vector<std::string> concept_names;
  double lambda = 0.1;
};

inline void validate_plan(const EditPlan& plan) {
  if (plan.concept_names.empty()) {
    throw ValidationError("edit plan for '" + plan.class_name + "' names no concepts");
  }
  if (!(plan.lambda >= 0.0) || !std::isfinite(plan.lambda)) {
    throw ValidationError("edit plan for '" + plan.class_name + "' needs finite lambda >= 0");
  }
}

/// Index of the prompt with the largest dot product; the first index wins ties.
inline std::size_t classify_index(std::span<const double> image,
                                  std::span<const PromptEmbedding> prompts) {
  if (prompts.empty()) throw ValidationError("classify: empty class prompt list");
  std::size_t best = 0;
  double best_score = 0.0;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    require_same_dim(image, prompts[i].vector, "classify");
    const double s = dot(image, prompts[i].vector);
    if (i == 0 || s > best_score) {
      best = i;
      best_score = s;
    }
  }
  return best;
}

inline const std::string& classify(std::span<const double> image,
                                   std::span<const PromptEmbedding> prompts) {
  return prompts[classify_index(image, prompts)].name;
}

struct EditOptions {
  bool renormalize = false;
};

/// class_prompt - lambda * mean(concepts). Not renormalized unless requested.
inline PromptEmbedding edit_prompt(const PromptEmbedding& class_prompt,
                                   std::span<const PromptEmbedding> concepts, double lambda,
                                   const EditOptions& opt = {}) {
  if (concepts.empty()) throw ValidationError("edit_prompt: no concepts to subtract");
  if (!std::isfinite(lambda)) throw ValidationError("edit_prompt: lambda must be finite");
  const std::size_t dim = class_prompt.vector.size();
  std::vector<CompensatedSum> mean(dim);
  for (const auto& c : concepts) {
    require_same_dim(class_prompt.vector, c.vector, "edit_prompt");
    for (std::size_t i = 0; i < dim; ++i) mean[i].add(c.vector[i]);
  }
  PromptEmbedding out{class_prompt.name, std::vector<double>(dim), PromptKind::edited};
  const double k = static_cast<double>(concepts.size());
  for (std::size_t i = 0; i < dim; ++i) {
    out.vector[i] = class_prompt.vector[i] - lambda * (mean[i].value() / k);
  }
  if (opt.renormalize) {
    const double n = norm(out.vector);
    if (n > 0.0) {
      for (double& x : out.vector) x /= n;
    }
  }
  return out;
}

/// Copy of `class_prompts` with the plan's class replaced by its edited prompt.
inline std::vector<PromptEmbedding> apply_edit_plan(std::span<const PromptEmbedding> class_prompts,
                                                    std::span<const PromptEmbedding> concept_prompts,
                                                    const EditPlan& plan,
                                                    const EditOptions& opt = {}) {
  validate_plan(plan);
  std::vector<PromptEmbedding> chosen;
  for (const auto& name : plan.concept_names) {
    const auto it = std::find_if(concept_prompts.begin(), concept_prompts.end(),
                                 [&](const PromptEmbedding& p) { return p.name == name; });
    if (it == concept_prompts.end()) throw ValidationError("unknown concept prompt '" + name + "'");
    chosen.push_back(*it);
  }
  std::vector<PromptEmbedding> out(class_prompts.begin(), class_prompts.end());
  const auto it = std::find_if(out.begin(), out.end(),
                               [&](const PromptEmbedding& p) { return p.name == plan.class_name; });
  if (it == out.end()) throw ValidationError("unknown class prompt '" + plan.class_name + "'");
  *it = edit_prompt(*it, chosen, plan.lambda, opt);
  return out;
}

struct ClassStats {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;    // true examples of the class
  std::size_t predicted = 0;  // examples predicted as the class
};

struct Evaluation {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  std::map<std::string, ClassStats> per_class;
};

/// (predicted, true) pairs.
using PredictionPair = std::pair<std::string, std::string>;

/// Accuracy and macro-F1. The label set is `labels` when given, otherwise the
/// union of predicted and true labels. F1 is 0 when precision + recall = 0.
inline Evaluation evaluate(std::span<const PredictionPair> pairs,
                           std::optional<std::span<const std::string>> labels = std::nullopt) {
  if (pairs.empty()) throw ValidationError("evaluate: no predictions");
  Evaluation e;
  if (labels) {
    for (const auto& l : *labels) e.per_class[l];
  } else {
    for (const auto& [pred, truth] : pairs) {
      e.per_class[pred];
      e.per_class[truth];
    }
  }
  std::map<std::string, std::size_t> tp;
  std::size_t correct = 0;
  for (const auto& [pred, truth] : pairs) {
    if (!e.per_class.count(pred) || !e.per_class.count(truth)) {
      throw ValidationError("evaluate: label outside the label set");
    }
    ++e.per_class[truth].support;
    ++e.per_class[pred].predicted;
    if (pred == truth) {
      ++correct;
      ++tp[truth];
    }
  }
  e.accuracy = static_cast<double>(correct) / static_cast<double>(pairs.size());
  CompensatedSum f1_sum;
  for (auto& [label, s] : e.per_class) {
    const double t = static_cast<double>(tp[label]);
    s.precision = s.predicted ? t / static_cast<double>(s.predicted) : 0.0;
    s.recall = s.support ? t / static_cast<double>(s.support) : 0.0;
    const double pr = s.precision + s.recall;
    s.f1 = pr > 0.0 ? 2.0 * s.precision * s.recall / pr : 0.0;
    f1_sum.add(s.f1);
  }
  e.macro_f1 = f1_sum.value() / static_cast<double>(e.per_class.size());
  return e;
}

struct LabeledImage {
  std::vector<double> embedding;
  std::string label;
};

inline std::vector<LabeledImage> labeled_images_from(const EmbeddingSet& set) {
  std::vector<LabeledImage> out;
  for (const auto& r : set.vectors) {
    if (!r.label) throw ValidationError("image '" + r.id + "' has no label");
    out.push_back({r.values, *r.label});
  }
  return out;
}

/// Classifies every image against `prompts`; label set = prompt names.
inline Evaluation evaluate_prompts(std::span<const LabeledImage> images,
                                   std::span<const PromptEmbedding> prompts) {
  std::vector<PredictionPair> pairs;
  pairs.reserve(images.size());
  for (const auto& img : images) pairs.emplace_back(classify(img.embedding, prompts), img.label);
  std::vector<std::string> labels;
  for (const auto& p : prompts) labels.push_back(p.name);
  return evaluate(pairs, std::span<const std::string>(labels));
}

/// {0, 0.02, ..., 0.5}
inline std::vector<double> default_lambda_grid() {
  std::vector<double> g;
  for (int k = 0; k <= 25; ++k) g.push_back(k / 50.0);
  return g;
}

struct LambdaFit {
  double lambda = 0.0;
  double macro_f1 = 0.0;
  std::vector<std::pair<double, double>> scores;  // (lambda, few-shot macro F1) per grid point
};

/// Grid search for the lambda maximizing few-shot macro-F1; ties go to the
/// smallest lambda.
inline LambdaFit fit_lambda_detailed(const std::string& class_name,
                                     std::span<const LabeledImage> few_shot,
                                     std::span<const PromptEmbedding> class_prompts,
                                     std::span<const PromptEmbedding> concept_prompts,
                                     std::span<const double> grid, const EditOptions& opt = {}) {
  if (few_shot.empty()) throw ValidationError("fit_lambda: empty few-shot set");
  if (grid.empty()) throw ValidationError("fit_lambda: empty lambda grid");
  std::vector<std::string> names;
  for (const auto& c : concept_prompts) names.push_back(c.name);
  LambdaFit fit;
  bool have = false;
  for (double lambda : grid) {
    const EditPlan plan{class_name, names, lambda};
    const auto prompts = apply_edit_plan(class_prompts, concept_prompts, plan, opt);
    const double f1 = evaluate_prompts(few_shot, prompts).macro_f1;
    fit.scores.emplace_back(lambda, f1);
    if (!have || f1 > fit.macro_f1 || (f1 == fit.macro_f1 && lambda < fit.lambda)) {
      fit.lambda = lambda;
      fit.macro_f1 = f1;
      have = true;
    }
  }
  return fit;
}

inline double fit_lambda(const std::string& class_name, std::span<const LabeledImage> few_shot,
                         std::span<const PromptEmbedding> class_prompts,
                         std::span<const PromptEmbedding> concept_prompts,
                         std::span<const double> grid, const EditOptions& opt = {}) {
  return fit_lambda_detailed(class_name, few_shot, class_prompts, concept_prompts, grid, opt).lambda;
}

}  // namespace conceptx
