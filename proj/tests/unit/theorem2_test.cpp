#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "conceptx/error.hpp"
#include "conceptx/numeric.hpp"
#include "conceptx/rng.hpp"
#include "conceptx/theorem2.hpp"

using namespace conceptx;

TEST(SampleCap, PointsAreUnitAndInsideTheCap) {
  for (auto mode : {CapSampling::rejection, CapSampling::tangent, CapSampling::automatic}) {
    Rng rng(31);
    const auto axis = rng.unit_vector(5);
    const auto s = sample_cap(axis, 0.3, 200, rng, mode);
    ASSERT_EQ(s.points.size(), 200u);
    for (const auto& g : s.points) {
      EXPECT_TRUE(is_unit(g, 1e-12));
      EXPECT_GT(dot(axis, g), 0.3);
    }
  }
}

TEST(SampleCap, AutomaticSwitchesToTangentForNarrowCaps) {
  Rng rng(32);
  const auto axis = rng.unit_vector(64);
  const auto s = sample_cap(axis, 0.995, 10, rng);
  EXPECT_EQ(s.method_used, CapSampling::tangent);
  EXPECT_LT(s.acceptance_rate, 0.01);
  Rng rng2(33);
  const auto wide = sample_cap(rng2.unit_vector(2), 0.0, 10, rng2);
  EXPECT_EQ(wide.method_used, CapSampling::rejection);
  EXPECT_NEAR(wide.acceptance_rate, 0.5, 0.05);
}

TEST(SampleCap, ForcedRejectionOnNarrowCapReportsAcceptanceRate) {
  Rng rng(34);
  const auto axis = rng.unit_vector(64);
  try {
    sample_cap(axis, 0.995, 5, rng, CapSampling::rejection);
    FAIL();
  } catch (const SamplingError& e) {
    EXPECT_LT(e.acceptance_rate(), 1e-3);
  }
}

TEST(PointwiseStep, HoldsOnCapSamples) {
  Rng rng(35);
  const double eps = 0.2;
  for (std::size_t dim : {2u, 8u, 64u}) {
    const auto w = rng.unit_vector(dim);
    const auto v = rng.unit_vector(dim);
    const auto s = sample_cap(w, 1.0 - eps * eps / 8.0, 2000, rng);
    for (const auto& g : s.points) EXPECT_TRUE(pointwise_step_holds(w, v, g, eps));
  }
}

TEST(PointwiseStep, FailsOutsideTheCap) {
  const std::vector<double> w{1.0, 0.0};
  const std::vector<double> v{0.0, 1.0};
  const std::vector<double> g{0.0, 1.0};
  EXPECT_FALSE(pointwise_step_holds(w, v, g, 0.2));
}

TEST(Theorem2Trial, AlignedConceptGapWithinHalfEpsilon) {
  Theorem2Options opt;
  opt.align_concept_with_classifier = true;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto r = theorem2_trial(0.2, 0.1, 8, s, opt);
    EXPECT_LE(r.lhs_gap, 0.1);
    EXPECT_DOUBLE_EQ(r.tcav_con, 1.0);
    EXPECT_EQ(r.tcav, 1.0);
  }
}

TEST(Theorem2Trial, RecordFields) {
  const auto r = theorem2_trial(0.2, 0.1, 8, 7);
  EXPECT_EQ(r.n_used, 116);
  EXPECT_DOUBLE_EQ(r.theta_h, 1.0 - 0.04 / 8.0);
  EXPECT_NEAR(r.lhs_gap, std::fabs(r.class_conditioned - r.tcav_con), 0.0);
  EXPECT_EQ(r.bound_holds, r.lhs_gap < 0.2);
  EXPECT_THROW(theorem2_trial(0.2, 0.1, 1, 0), DomainError);
}

TEST(Theorem2Batch, SmallDimLargeEpsilon) {
  const auto batch = theorem2_batch(0.5, 0.1, 2, 500, 1);
  std::size_t holds = 0;
  for (const auto& r : batch) holds += r.bound_holds;
  EXPECT_GE(holds, 450u);
}

TEST(Theorem2Batch, EpsilonNearOneEdge) {
  // eps close to 1 gives theta_h = 0.875: a wide cap and a loose bound.
  const auto batch = theorem2_batch(0.999999, 0.1, 4, 50, 2);
  for (const auto& r : batch) {
    EXPECT_NEAR(r.theta_h, 0.875, 1e-6);
    EXPECT_TRUE(r.bound_holds);
  }
}

TEST(Theorem2Batch, IndependentOfThreadCount) {
  std::ostringstream a, b;
  write_trials_jsonl(theorem2_batch(0.2, 0.1, 8, 64, 3, 1), a);
  write_trials_jsonl(theorem2_batch(0.2, 0.1, 8, 64, 3, 8), b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Theorem2Allowance, DeltaPlusThreeSigma) {
  EXPECT_NEAR(theorem2_failure_allowance(0.1, 500), 0.1 + 3.0 * std::sqrt(0.09 / 500.0), 1e-15);
}
