#pragma once

// Synthetic prompt-contamination family. Class prompts are clean orthonormal
// class directions except for one class whose prompt leaks an irrelevant concept:
// normalize(u_0 + contamination * w). Images sit near the clean directions and
// carry the concept with probability concept_rate, which drags them towards
// the contaminated class.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "conceptx/error.hpp"
#include "conceptx/numeric.hpp"
#include "conceptx/prompt_editing.hpp"
#include "conceptx/rng.hpp"

namespace conceptx::synth {

struct ContaminationSpec {
  std::size_t dim = 32;
  std::size_t n_classes = 5;
  std::size_t n_images = 500;
  std::size_t shots_per_class = 16;
  double contamination = 0.5;
  double concept_rate = 0.5;      // fraction of images showing the concept
  double concept_strength = 2.0;  // weight of the concept direction in an image
  double noise = 1.5;             // scale of isotropic noise (norm ~ noise)
  std::uint64_t seed = 0;
};

struct ContaminationInstance {
  std::vector<PromptEmbedding> class_prompts;   // class_0 is contaminated
  std::vector<PromptEmbedding> concept_prompts;  // the single leaked concept
  std::vector<LabeledImage> test_images;
  std::vector<LabeledImage> few_shot;
  std::string contaminated_class;
};

inline ContaminationInstance generate_contamination(const ContaminationSpec& spec) {
  if (spec.dim < 2 || spec.n_classes < 2 || spec.n_images == 0) {
    throw InfeasibleError("contamination family needs dim >= 2, >= 2 classes and images");
  }
  Rng rng(spec.seed, 0x636f6eULL);
  if (spec.n_classes + 1 > spec.dim) {
    throw InfeasibleError("contamination family needs dim > n_classes");
  }
  // Concept first, then class directions, Gram-Schmidt orthonormalized so the
  // clean prompts are orthogonal to the concept and to each other.
  std::vector<std::vector<double>> basis;
  while (basis.size() < spec.n_classes + 1) {
    auto v = rng.unit_vector(spec.dim);
    for (const auto& b : basis) {
      const double along = dot(v, b);
      for (std::size_t i = 0; i < spec.dim; ++i) v[i] -= along * b[i];
    }
    if (norm(v) > 1e-6) basis.push_back(normalized(v));
  }
  const auto concept_dir = basis[0];
  const std::vector<std::vector<double>> clean(basis.begin() + 1, basis.end());

  ContaminationInstance inst;
  for (std::size_t z = 0; z < spec.n_classes; ++z) {
    std::vector<double> p = clean[z];
    if (z == 0) {
      for (std::size_t i = 0; i < spec.dim; ++i) p[i] += spec.contamination * concept_dir[i];
      p = normalized(p);
    }
    inst.class_prompts.push_back({"class_" + std::to_string(z), p, PromptKind::class_prompt});
  }
  inst.contaminated_class = inst.class_prompts[0].name;
  inst.concept_prompts.push_back({"concept", concept_dir, PromptKind::concept_prompt});

  const double noise_sd = spec.noise / std::sqrt(static_cast<double>(spec.dim));
  const auto image = [&](std::size_t label) {
    std::vector<double> x = clean[label];
    const bool shows = rng.bernoulli(spec.concept_rate);
    for (std::size_t i = 0; i < spec.dim; ++i) {
      if (shows) x[i] += spec.concept_strength * concept_dir[i];
      x[i] += noise_sd * rng.normal();
    }
    return LabeledImage{normalized(x), inst.class_prompts[label].name};
  };
  for (std::size_t i = 0; i < spec.n_images; ++i) {
    inst.test_images.push_back(image(static_cast<std::size_t>(rng.index(spec.n_classes))));
  }
  for (std::size_t z = 0; z < spec.n_classes; ++z) {
    for (std::size_t k = 0; k < spec.shots_per_class; ++k) inst.few_shot.push_back(image(z));
  }
  return inst;
}

}  // namespace conceptx::synth
