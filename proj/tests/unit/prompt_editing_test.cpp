#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "conceptx/contamination.hpp"
#include "conceptx/error.hpp"
#include "conceptx/prompt_editing.hpp"

using namespace conceptx;

namespace {

PromptEmbedding prompt(const std::string& name, std::vector<double> v,
                       PromptKind kind = PromptKind::class_prompt) {
  return {name, normalized(v), kind};
}

}  // namespace

TEST(Classify, SelfSimilarityWins) {
  const std::vector<PromptEmbedding> ps{prompt("a", {1, 0, 0}), prompt("b", {0, 1, 0}),
                                        prompt("c", {0, 0.6, 0.8})};
  EXPECT_EQ(classify(ps[2].vector, ps), "c");
  EXPECT_EQ(classify(ps[1].vector, ps), "b");
}

TEST(Classify, TiesGoToFirstIndex) {
  const std::vector<PromptEmbedding> ps{prompt("a", {1, 0}), prompt("b", {1, 0})};
  EXPECT_EQ(classify_index(std::vector<double>{1, 0}, ps), 0u);
  EXPECT_EQ(classify_index(std::vector<double>{0, 1}, ps), 0u);
}

TEST(Classify, HandBuiltScores) {
  // image e0 against prompts with first components 0.9, 0.2, -0.1
  const std::vector<PromptEmbedding> ps{
      prompt("p0", {0.9, std::sqrt(1 - 0.81)}), prompt("p1", {0.2, -std::sqrt(1 - 0.04)}),
      prompt("p2", {-0.1, std::sqrt(1 - 0.01)})};
  const std::vector<double> img{1.0, 0.0};
  EXPECT_NEAR(dot(img, ps[0].vector), 0.9, 1e-15);
  EXPECT_NEAR(dot(img, ps[1].vector), 0.2, 1e-15);
  EXPECT_NEAR(dot(img, ps[2].vector), -0.1, 1e-15);
  EXPECT_EQ(classify(img, ps), "p0");
  EXPECT_THROW(classify(img, std::vector<PromptEmbedding>{}), ValidationError);
}

TEST(EditPrompt, LambdaZeroIsIdentity) {
  const auto z = prompt("z", {0.6, 0.8});
  const std::vector<PromptEmbedding> cs{prompt("c", {1, 0}, PromptKind::concept_prompt)};
  EXPECT_EQ(edit_prompt(z, cs, 0.0).vector, z.vector);
}

TEST(EditPrompt, DefaultLambdaComponentwise) {
  const auto z = prompt("z", {0.6, 0.8, 0.0});
  const auto c = prompt("c", {0.0, 0.6, 0.8}, PromptKind::concept_prompt);
  const auto e = edit_prompt(z, std::vector<PromptEmbedding>{c}, EditPlan{}.lambda);
  EXPECT_EQ(EditPlan{}.lambda, 0.1);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(e.vector[i], z.vector[i] - 0.1 * c.vector[i], 1e-15);
  EXPECT_EQ(e.kind, PromptKind::edited);
  EXPECT_FALSE(is_unit(e.vector));
  EXPECT_TRUE(is_unit(edit_prompt(z, std::vector<PromptEmbedding>{c}, 0.1, {true}).vector));
}

TEST(EditPrompt, SubtractsTheMeanOfSeveralConcepts) {
  const auto z = prompt("z", {1, 0, 0});
  const std::vector<PromptEmbedding> cs{prompt("a", {0, 1, 0}), prompt("b", {0, 0, 1})};
  const auto e = edit_prompt(z, cs, 0.4);
  EXPECT_NEAR(e.vector[0], 1.0, 1e-15);
  EXPECT_NEAR(e.vector[1], -0.2, 1e-15);
  EXPECT_NEAR(e.vector[2], -0.2, 1e-15);
}

TEST(EditPrompt, LinearInLambda) {
  const auto z = prompt("z", {0.3, -0.2, 0.9});
  const std::vector<PromptEmbedding> cs{prompt("a", {0.1, 0.7, 0.2}), prompt("b", {-0.5, 0.5, 0.5})};
  const auto e1 = edit_prompt(z, cs, 0.13);
  const auto e2 = edit_prompt(z, cs, 0.37);
  const auto e3 = edit_prompt(z, cs, 0.5);
  for (std::size_t i = 0; i < 3; ++i) {
    // e(l) - z is proportional to l
    EXPECT_NEAR((e1.vector[i] - z.vector[i]) / 0.13, (e2.vector[i] - z.vector[i]) / 0.37, 1e-12);
    EXPECT_NEAR((e3.vector[i] - z.vector[i]) / 0.5, (e2.vector[i] - z.vector[i]) / 0.37, 1e-12);
  }
}

TEST(EditPrompt, FullCancellationStillClassifies) {
  const auto z = prompt("z", {1, 0});
  const std::vector<PromptEmbedding> cs{prompt("z_concept", {1, 0}, PromptKind::concept_prompt)};
  const auto e = edit_prompt(z, cs, 1.0);
  EXPECT_EQ(e.vector, (std::vector<double>{0.0, 0.0}));
  const std::vector<PromptEmbedding> ps{e, prompt("other", {0, 1})};
  EXPECT_EQ(classify(std::vector<double>{1, 0}, ps), "z");  // 0 vs 0 tie -> first
  EXPECT_EQ(classify(std::vector<double>{0, 1}, ps), "other");
  EXPECT_EQ(edit_prompt(z, cs, 1.0, {true}).vector, (std::vector<double>{0.0, 0.0}));
}

TEST(ApplyEditPlan, ReplacesOnlyThePlannedClass) {
  const std::vector<PromptEmbedding> classes{prompt("a", {1, 0}), prompt("b", {0, 1})};
  const std::vector<PromptEmbedding> concepts{prompt("k", {0.6, 0.8}, PromptKind::concept_prompt)};
  const auto out = apply_edit_plan(classes, concepts, {"b", {"k"}, 0.5});
  EXPECT_EQ(out[0].vector, classes[0].vector);
  EXPECT_NEAR(out[1].vector[1], 1.0 - 0.4, 1e-15);
  EXPECT_THROW(apply_edit_plan(classes, concepts, {"c", {"k"}, 0.5}), ValidationError);
  EXPECT_THROW(apply_edit_plan(classes, concepts, {"a", {"q"}, 0.5}), ValidationError);
  EXPECT_THROW(apply_edit_plan(classes, concepts, {"a", {}, 0.5}), ValidationError);
  EXPECT_THROW(apply_edit_plan(classes, concepts, {"a", {"k"}, -0.1}), ValidationError);
}

TEST(Evaluate, AllCorrect) {
  const std::vector<PredictionPair> p{{"a", "a"}, {"b", "b"}};
  const auto e = evaluate(p);
  EXPECT_EQ(e.accuracy, 1.0);
  EXPECT_EQ(e.macro_f1, 1.0);
}

TEST(Evaluate, AllPredictedOneClass) {
  const std::vector<PredictionPair> p{{"A", "A"}, {"A", "A"}, {"A", "B"}, {"A", "B"}};
  const auto e = evaluate(p);
  EXPECT_EQ(e.accuracy, 0.5);
  EXPECT_NEAR(e.per_class.at("A").f1, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(e.per_class.at("B").f1, 0.0);
  EXPECT_NEAR(e.macro_f1, 1.0 / 3.0, 1e-15);
}

TEST(Evaluate, SingleWrongAndExplicitLabels) {
  const std::vector<PredictionPair> p{{"a", "b"}};
  EXPECT_EQ(evaluate(p).accuracy, 0.0);
  const std::vector<std::string> labels{"a", "b", "c"};
  const std::vector<PredictionPair> q{{"a", "a"}};
  EXPECT_NEAR(evaluate(q, std::span<const std::string>(labels)).macro_f1, 1.0 / 3.0, 1e-15);
  const std::vector<PredictionPair> bad{{"z", "a"}};
  EXPECT_THROW(evaluate(bad, std::span<const std::string>(labels)), ValidationError);
  EXPECT_THROW(evaluate(std::vector<PredictionPair>{}), ValidationError);
}

TEST(FitLambda, OrthogonalConceptKeepsZero) {
  const std::vector<PromptEmbedding> classes{prompt("a", {1, 0, 0}), prompt("b", {0, 1, 0})};
  const std::vector<PromptEmbedding> concepts{prompt("k", {0, 0, 1}, PromptKind::concept_prompt)};
  // Images carry no concept component, so subtracting it changes no score.
  const std::vector<LabeledImage> shots{{normalized(std::vector<double>{1, 0.2, 0}), "a"},
                                        {normalized(std::vector<double>{0.1, 1, 0}), "b"},
                                        {normalized(std::vector<double>{0.6, 0.5, 0}), "b"}};
  const auto grid = default_lambda_grid();
  EXPECT_EQ(fit_lambda("a", shots, classes, concepts, grid), 0.0);
}

TEST(FitLambda, SingletonGrid) {
  const std::vector<PromptEmbedding> classes{prompt("a", {1, 0}), prompt("b", {0, 1})};
  const std::vector<PromptEmbedding> concepts{prompt("k", {1, 1}, PromptKind::concept_prompt)};
  const std::vector<LabeledImage> shots{{{1, 0}, "a"}};
  const std::vector<double> grid{0.1};
  EXPECT_EQ(fit_lambda("a", shots, classes, concepts, grid), 0.1);
}

TEST(FitLambda, DefaultGrid) {
  const auto g = default_lambda_grid();
  ASSERT_EQ(g.size(), 26u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_NEAR(g.back(), 0.5, 1e-15);
  EXPECT_NEAR(g[1], 0.02, 1e-15);
}

TEST(FitLambda, ContaminatedInstanceSelectsPositiveLambda) {
  synth::ContaminationSpec spec;
  spec.seed = 3;
  const auto inst = synth::generate_contamination(spec);
  const auto grid = default_lambda_grid();
  const auto fit = fit_lambda_detailed(inst.contaminated_class, inst.few_shot, inst.class_prompts,
                                       inst.concept_prompts, grid);
  EXPECT_GT(fit.lambda, 0.0);
  EXPECT_GT(fit.macro_f1, fit.scores.front().second);
  EXPECT_EQ(fit.scores.size(), grid.size());
}

TEST(Contamination, GeometryOfTheFamily) {
  const auto inst = synth::generate_contamination({});
  ASSERT_EQ(inst.class_prompts.size(), 5u);
  EXPECT_EQ(inst.test_images.size(), 500u);
  EXPECT_EQ(inst.few_shot.size(), 5u * 16u);
  const auto& w = inst.concept_prompts[0].vector;
  EXPECT_EQ(w.size(), 32u);
  // contaminated prompt = normalize(u0 + 0.5 w) with u0 orthogonal to w
  EXPECT_NEAR(dot(inst.class_prompts[0].vector, w), 0.5 / std::sqrt(1.25), 1e-12);
  for (std::size_t z = 1; z < 5; ++z) EXPECT_NEAR(dot(inst.class_prompts[z].vector, w), 0.0, 1e-12);
  EXPECT_THROW(synth::generate_contamination({4, 5}), InfeasibleError);
}
