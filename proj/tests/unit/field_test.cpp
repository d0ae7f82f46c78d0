#include <gtest/gtest.h>

#include <cmath>

#include "metgeo/field_space.hpp"
#include "metgeo/random.hpp"
#include "test_util.hpp"

using namespace metgeo;

namespace {

FiberPoint scaled_identity(double c) { return FiberPoint::spd(SpdTensor::identity(2).scaled(c)); }

MetricField field(const GridPtr& grid, std::vector<FiberPoint> v) { return MetricField(grid, std::move(v)); }

MetricField random_field(random::Engine& g, const GridPtr& grid) {
  std::vector<FiberPoint> v;
  for (std::size_t i = 0; i < grid->size(); ++i)
    v.push_back(random::uniform(g) < 0.1 ? FiberPoint::cone(grid->dim())
                                         : FiberPoint::spd(random::spd(g, grid->dim(), 1.5)));
  return field(grid, std::move(v));
}

}  // namespace

TEST(FieldDistance, QuadratureExamples) {
  const GridPtr halves = SampleGrid::make({{"x0", 0.5}, {"x1", 0.5}}, 2);
  const MetricField a = MetricField::constant(halves, scaled_identity(1));
  const MetricField b = MetricField::constant(halves, scaled_identity(4));
  EXPECT_NEAR(field_distance(a, b), 2 * std::sqrt(2.0), 1e-12);
  EXPECT_EQ(field_distance(a, a), 0.0);

  const GridPtr uneven = SampleGrid::make({{"x0", 0.75}, {"x1", 0.25}}, 2);
  const MetricField f0 = MetricField::constant(uneven, scaled_identity(1));
  const MetricField f1 = field(uneven, {scaled_identity(1), scaled_identity(9)});
  EXPECT_NEAR(field_distance(f0, f1), 2 * std::sqrt(2.0), 1e-12);
}

TEST(SampleGrid, WeightsMustSumToOneUnlessNormalized) {
  EXPECT_THROW(SampleGrid::make({{"x0", 0.5}, {"x1", 0.6}}, 2), Error);
  const GridPtr g = SampleGrid::make({{"x0", 1.0}, {"x1", 3.0}}, 2, true);
  EXPECT_DOUBLE_EQ((*g)[1].weight, 0.75);
  EXPECT_THROW(SampleGrid::make({{"x0", 0.5}, {"x0", 0.5}}, 2), Error);
  EXPECT_THROW(SampleGrid::make({{"x0", 1.0}, {"x1", 0.0}}, 2, true), Error);
}

TEST(FieldDistance, RejectsMismatchedGrids) {
  const GridPtr g1 = SampleGrid::uniform(2, 2);
  const GridPtr g2 = SampleGrid::uniform(3, 2);
  EXPECT_THROW(field_distance(MetricField::constant(g1, scaled_identity(1)),
                              MetricField::constant(g2, scaled_identity(1))),
               Error);
}

TEST(Equivalence, ConeAtSameSamplesIsDistanceZero) {
  const GridPtr g = SampleGrid::uniform(3, 2);
  const MetricField a = field(g, {FiberPoint::cone(2), scaled_identity(2), scaled_identity(3)});
  const MetricField b = field(g, {FiberPoint::cone(2), scaled_identity(2), scaled_identity(3)});
  EXPECT_TRUE(equivalent(a, b));
  EXPECT_EQ(field_distance(a, b), 0.0);
  EXPECT_FALSE(equivalent(a, MetricField::constant(g, scaled_identity(2))));
}

TEST(FieldGeodesic, PointwiseAndExactAtEnds) {
  random::Engine g = random::trial_engine(31, 0);
  const GridPtr grid = SampleGrid::uniform(5, 2);
  const MetricField f0 = random_field(g, grid);
  const MetricField f1 = random_field(g, grid);
  EXPECT_TRUE(equivalent(field_geodesic(f0, f1, 0.0), f0));
  EXPECT_TRUE(equivalent(field_geodesic(f0, f1, 1.0), f1));
  const MetricField mid = field_geodesic(f0, f1, 0.3);
  for (std::size_t i = 0; i < grid->size(); ++i)
    EXPECT_NEAR(fiber_distance(mid[i], fiber_geodesic(f0[i], f1[i], 0.3)), 0.0, 1e-12);
  EXPECT_NEAR(field_distance(f0, mid), 0.3 * field_distance(f0, f1), 1e-7);
}

TEST(FieldProperties, MetricAxiomsAndRefinement) {
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    random::Engine g = random::trial_engine(32, trial);
    const GridPtr grid = SampleGrid::uniform(6, 2 + trial % 2);
    const MetricField a = random_field(g, grid), b = random_field(g, grid), c = random_field(g, grid);
    const double ab = field_distance(a, b), bc = field_distance(b, c), ac = field_distance(a, c);
    EXPECT_NEAR(ab, field_distance(b, a), 1e-10 * std::max(1.0, ab));
    EXPECT_GE(ab + bc - ac, -1e-9);

    // split sample 0 into two halves
    std::vector<Sample> split{{"x0a", 0.5 * (*grid)[0].weight}, {"x0b", 0.5 * (*grid)[0].weight}};
    for (std::size_t i = 1; i < grid->size(); ++i) split.push_back((*grid)[i]);
    const GridPtr fine = SampleGrid::make(split, grid->dim());
    auto refine = [&](const MetricField& f) {
      std::vector<FiberPoint> v{f[0], f[0]};
      for (std::size_t i = 1; i < f.size(); ++i) v.push_back(f[i]);
      return MetricField(fine, std::move(v));
    };
    EXPECT_NEAR(field_distance(refine(a), refine(b)), ab, 1e-12 * std::max(1.0, ab));
  }
}

TEST(FieldPathLength, GeodesicLengthIsDistanceAndDominatesSamples) {
  for (std::uint64_t trial = 0; trial < 10; ++trial) {
    random::Engine g = random::trial_engine(33, trial);
    const GridPtr grid = SampleGrid::uniform(8, 2);
    const MetricField f0 = random_field(g, grid), f1 = random_field(g, grid);
    const FieldPath path = sample_field_geodesic(f0, f1, 65);
    const double d = field_distance(f0, f1);
    EXPECT_LT(std::abs(field_path_length(path) - d) / d, 1e-3);
    const std::vector<double> per = per_sample_path_lengths(path);
    double sq = 0.0;
    for (std::size_t i = 0; i < per.size(); ++i) sq += (*grid)[i].weight * per[i] * per[i];
    EXPECT_GE(field_path_length(path) - std::sqrt(sq), -1e-9);
  }
}

TEST(ClassifyFields, Masks) {
  const GridPtr grid = SampleGrid::uniform(3, 2);
  const MetricField f0 = MetricField::constant(grid, scaled_identity(1));
  const MetricField f1 = field(grid, {scaled_identity(2), FiberPoint::cone(2),
                                      FiberPoint::spd(SpdTensor::make(SymTensor::diagonal({std::exp(10.0), std::exp(-10.0)})))});
  const FieldClassification c = classify_fields(f0, f1);
  EXPECT_EQ(c.mask_P, std::vector<std::string>{"x0"});
  EXPECT_EQ(c.mask_N, (std::vector<std::string>{"x0", "x2"}));
  EXPECT_EQ(c.cases[1].tag, CaseTag::ToCone);
}
