#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "conceptx/embedding_file.hpp"
#include "conceptx/error.hpp"
#include "conceptx/tcav.hpp"

using namespace conceptx;

namespace {

std::vector<EmbeddedExample> copies(const std::vector<double>& g, int n) {
  std::vector<EmbeddedExample> xs;
  for (int i = 0; i < n; ++i) xs.push_back({"x" + std::to_string(i), g});
  return xs;
}

}  // namespace

TEST(LinearConceptModel, ValidatesUnitNormAndDims) {
  EXPECT_THROW(LinearConceptModel({1.0, 1.0}, 0.0, {1.0, 0.0}), ValidationError);
  EXPECT_THROW(LinearConceptModel({1.0, 0.0}, 0.0, {1.0}), ValidationError);
  EXPECT_THROW(LinearConceptModel({}, 0.0, {}), ValidationError);
  const LinearConceptModel m({1.0, 0.0}, 0.5, {0.0, 1.0});
  EXPECT_EQ(m.predict(std::vector<double>{1.0, 0.0}), 1);
  EXPECT_EQ(m.predict(std::vector<double>{0.5, std::sqrt(0.75)}), -1);  // zero margin
}

TEST(TcavDiscrete, SignOfSensitivity) {
  const std::vector<double> w{1.0, 0.0};
  const auto xs = copies(w, 3);
  EXPECT_EQ(tcav_discrete(LinearConceptModel(w, 0.5, {0.6, 0.8}), xs), 1.0);
  EXPECT_EQ(tcav_discrete(LinearConceptModel(w, 0.5, {0.0, 1.0}), xs), 0.0);
  EXPECT_EQ(tcav_discrete(LinearConceptModel(w, 0.5, {-0.6, 0.8}), xs), 0.0);
}

TEST(TcavContinuous, AlignedAntiAlignedAndDotProduct) {
  const std::vector<double> w{1.0, 0.0, 0.0, 0.0};
  const auto xs = copies(w, 2);
  EXPECT_DOUBLE_EQ(tcav_continuous(LinearConceptModel(w, 0.0, w), xs), 1.0);
  EXPECT_DOUBLE_EQ(tcav_continuous(LinearConceptModel(w, 0.0, {-1.0, 0.0, 0.0, 0.0}), xs), -1.0);
  EXPECT_DOUBLE_EQ(tcav_continuous(LinearConceptModel(w, 0.0, {0.6, 0.8, 0.0, 0.0}), xs), 0.6);
}

TEST(Tcav, RequiresNonemptyMemberSet) {
  const std::vector<double> w{1.0, 0.0};
  const LinearConceptModel m(w, 0.5, w);
  EXPECT_THROW(tcav_discrete(m, std::vector<EmbeddedExample>{}), DomainError);
  EXPECT_THROW(tcav_continuous(m, copies({0.0, 1.0}, 1)), ValidationError);
}

TEST(ClassConditionedFromEmbeddings, ZeroSpreadEqualsTcavCon) {
  const std::vector<double> w{0.6, 0.8};
  const LinearConceptModel m(w, 0.5, {0.0, 1.0});
  const auto xs = copies(w, 4);
  EXPECT_NEAR(class_conditioned_from_embeddings(m, xs), tcav_continuous(m, xs), 1e-15);
  EXPECT_NEAR(class_conditioned_from_embeddings(m, xs), 0.8, 1e-15);
}

TEST(ClassConditionedFromEmbeddings, SingleExampleAtVIsOne) {
  const std::vector<double> v{0.6, 0.8};
  const LinearConceptModel m({1.0, 0.0}, 0.5, v);
  EXPECT_NEAR(class_conditioned_from_embeddings(m, copies(v, 1)), 1.0, 1e-15);
}

TEST(ClassConditionedFromEmbeddings, IgnoresNonMembersAndMatchesLoop) {
  const std::vector<double> w{1.0, 0.0};
  const LinearConceptModel m(w, 0.0, {0.6, 0.8});
  const std::vector<EmbeddedExample> xs{{"a", {1.0, 0.0}}, {"b", {0.8, 0.6}}, {"c", {-1.0, 0.0}}};
  EXPECT_NEAR(class_conditioned_from_embeddings(m, xs), (0.6 + (0.48 + 0.48)) / 2.0, 1e-15);
  EXPECT_THROW(class_conditioned_from_embeddings(m, std::vector<EmbeddedExample>{{"c", {-1.0, 0.0}}}),
               UndefinedMeasureError);
}

TEST(LoadLinearModel, RescalesNearUnitAndRejectsOthers) {
  std::istringstream ok(R"({"w_h": [1.0000001, 0], "theta_h": 0.9, "v": [0, 1]})");
  const auto m = load_linear_model(ok);
  EXPECT_DOUBLE_EQ(m.w_h()[0], 1.0);
  EXPECT_DOUBLE_EQ(m.theta_h(), 0.9);
  std::istringstream bad(R"({"w_h": [2, 0], "theta_h": 0.9, "v": [0, 1]})");
  EXPECT_THROW(load_linear_model(bad), ValidationError);
  std::istringstream missing(R"({"w_h": [1, 0], "v": [0, 1]})");
  EXPECT_THROW(load_linear_model(missing), ValidationError);
  std::istringstream garbage("{");
  EXPECT_THROW(load_linear_model(garbage), ParseError);
}

TEST(LoadEmbeddings, NormalizesAndValidates) {
  std::istringstream in(R"({"dim": 2, "vectors": [{"id": "a", "values": [3, 4], "label": "x"},
                             {"id": "b", "values": [0, 2]}]})");
  const auto set = load_embeddings(in);
  ASSERT_EQ(set.vectors.size(), 2u);
  EXPECT_DOUBLE_EQ(set.find("a").values[0], 0.6);
  EXPECT_EQ(*set.find("a").label, "x");
  EXPECT_FALSE(set.find("b").label.has_value());
  std::istringstream zero(R"({"dim": 2, "vectors": [{"id": "a", "values": [0, 0]}]})");
  EXPECT_THROW(load_embeddings(zero), ValidationError);
  std::istringstream mismatch(R"({"dim": 3, "vectors": [{"id": "a", "values": [1, 0]}]})");
  EXPECT_THROW(load_embeddings(mismatch), ValidationError);
  std::istringstream dup(R"({"dim": 1, "vectors": [{"id": "a", "values": [1]}, {"id": "a", "values": [1]}]})");
  EXPECT_THROW(load_embeddings(dup), ValidationError);

  std::ostringstream out;
  write_embeddings(set, out);
  std::istringstream back(out.str());
  const auto again = load_embeddings(back);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_NEAR(again.vectors[1].values[k], set.vectors[1].values[k], 1e-15);
  EXPECT_EQ(again.vectors[0].label, set.vectors[0].label);
}
