#include <gtest/gtest.h>

#include "metgeo/verification/sweeps.hpp"

using namespace metgeo;

TEST(Sweeps, BoundsHold) {
  const BoundsReport r = bounds_sweep(1000, 3, 2);
  EXPECT_TRUE(r.passed());
  EXPECT_GT(r.conformal_pairs, 0u);
  EXPECT_GT(r.cone_pairs, 0u);
}

TEST(Sweeps, GeodesicContract) {
  const GeodesicReport r = geodesic_sweep(100, 3, 65, 2);
  EXPECT_TRUE(r.passed()) << r.max_endpoint_error << " " << r.max_speed_variation << " "
                          << r.max_length_error_riemannian << " " << r.max_length_error_cone;
}

TEST(Sweeps, ExpLogAndVolume) {
  EXPECT_TRUE(explog_sweep(100, 3).passed());
  EXPECT_TRUE(volume_sweep(20, 3).passed());
}

TEST(Sweeps, ThresholdContinuity) {
  const ThresholdReport r = threshold_sweep(100, 3);
  EXPECT_TRUE(r.passed()) << r.max_jump;
}

TEST(Sweeps, EndpointContinuity) {
  const ContinuityReport r = continuity_sweep(10, 3);
  EXPECT_TRUE(r.passed());
}

TEST(Sweeps, FieldLength) {
  const FieldLengthReport r = field_length_sweep(10, 3);
  EXPECT_TRUE(r.passed());
}

TEST(Sweeps, DeterministicAcrossThreadCounts) {
  const BoundsReport a = bounds_sweep(300, 9, 1);
  const BoundsReport b = bounds_sweep(300, 9, 3);
  EXPECT_EQ(a.min_lower_slack, b.min_lower_slack);
  EXPECT_EQ(a.max_cone_gap, b.max_cone_gap);
}

TEST(OracleCorpus, KindsAndDims) {
  const auto pairs = oracle_corpus(7, 12);
  ASSERT_EQ(pairs.size(), 12u);
  EXPECT_EQ(pairs[0].p0.dim(), 2u);
  EXPECT_EQ(pairs[1].p0.dim(), 3u);
  std::size_t cone_endpoint = 0;
  for (const auto& p : pairs) cone_endpoint += p.p0.is_cone() || p.p1.is_cone();
  EXPECT_EQ(cone_endpoint, 2u);
}
