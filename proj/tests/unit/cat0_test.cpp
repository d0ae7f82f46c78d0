#include <gtest/gtest.h>

#include <cmath>

#include "metgeo/verification/cat0.hpp"
#include "test_util.hpp"

using namespace metgeo;

namespace {
FiberPoint scaled_identity(double c) { return FiberPoint::spd(SpdTensor::identity(2).scaled(c)); }
}  // namespace

TEST(ComparisonTriangle, EuclideanDistances) {
  // right triangle with legs 3 and 4
  EXPECT_NEAR(detail::comparison_distance(3, 4, 5, 1, 1), 5.0, 1e-12);
  EXPECT_NEAR(detail::comparison_distance(3, 4, 5, 0.5, 0.5), 2.5, 1e-12);
  EXPECT_NEAR(detail::comparison_distance(3, 4, 5, 0, 0), 0.0, 1e-12);
  EXPECT_GT(detail::side_violation(1, 1, 3), 0.0);
  EXPECT_LE(detail::side_violation(3, 4, 5), 0.0);
}

TEST(Cat0Check, ConformalAndConeTriangleIsFlat) {
  // I, 4I and the cone point lie on one ray: the triangle is degenerate
  EXPECT_NEAR(cat0_check(scaled_identity(1), scaled_identity(4), FiberPoint::cone(2), 0.5, 0.5), 0.0, 1e-12);
}

TEST(TriangleShape, Classification) {
  const FiberPoint a = scaled_identity(1), b = scaled_identity(2), c = scaled_identity(3);
  const FiberPoint far = FiberPoint::spd(SpdTensor::make(SymTensor::diagonal({std::exp(10.0), std::exp(-10.0)})));
  EXPECT_EQ(triangle_shape(a, b, c), TriangleShape::Riemannian);
  EXPECT_EQ(triangle_shape(a, b, far), TriangleShape::TwoConeEdges);
  EXPECT_EQ(triangle_shape(a, b, FiberPoint::cone(2)), TriangleShape::ConeVertexRiemannian);
}

TEST(Cat0Sweep, SmallSweepHoldsAndCoversShapes) {
  Cat0SweepConfig cfg;
  cfg.trials = 400;
  cfg.seed = 5;
  const Cat0Report r = cat0_sweep(cfg);
  EXPECT_TRUE(r.passed(1e-9)) << r.max_violation;
  for (TriangleShape s : {TriangleShape::Riemannian, TriangleShape::ThreeConeEdges, TriangleShape::TwoConeEdges,
                          TriangleShape::OneConeEdge, TriangleShape::ConeVertexConeEdge})
    EXPECT_GT(r.count(s), 0u) << to_string(s);
  ASSERT_TRUE(r.worst_case.has_value());
}

TEST(Cat0Sweep, ThreadCountDoesNotChangeResults) {
  Cat0SweepConfig cfg;
  cfg.trials = 100;
  const Cat0Report one = cat0_sweep(cfg);
  cfg.threads = 4;
  const Cat0Report four = cat0_sweep(cfg);
  EXPECT_EQ(one.max_violation, four.max_violation);
  EXPECT_EQ(one.shape_counts, four.shape_counts);
}

TEST(FieldCat0Sweep, SmallSweepHolds) {
  FieldCat0SweepConfig cfg;
  cfg.trials = 20;
  const Cat0Report r = field_cat0_sweep(cfg);
  EXPECT_TRUE(r.passed(1e-9)) << r.max_violation;
  EXPECT_LT(r.max_planar_per_sample_gap, 1e-9);
}
