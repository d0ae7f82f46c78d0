#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "metgeo/fiber_geodesics.hpp"
#include "metgeo/random.hpp"
#include "test_util.hpp"

using namespace metgeo;
using metgeo::testing::max_entry_diff;
using metgeo::testing::rel;

namespace {

FiberPoint diag_point(std::initializer_list<double> d) {
  return FiberPoint::spd(SpdTensor::make(SymTensor::diagonal(d)));
}

double entry_error(const FiberPoint& a, const FiberPoint& b) {
  if (a.is_cone() != b.is_cone()) return 1.0;
  if (a.is_cone()) return 0.0;
  return max_entry_diff(a.tensor().tensor(), b.tensor().tensor()) /
         std::max(1.0, a.tensor().tensor().matrix().max_abs());
}

/// Rounding an input tensor's entries moves its determinant by up to
/// cond * eps relative, so equalities between transformed inputs hold to
/// 1e-10 only up to that floor.
double tolerance_for(const FiberPoint& a, const FiberPoint& b) {
  double cond = 1.0;
  for (const FiberPoint* p : {&a, &b}) {
    if (p->is_cone()) continue;
    const EigenSystem es = sym_eigen(p->tensor().tensor());
    cond = std::max(cond, es.eigenvalues.front() / es.eigenvalues.back());
  }
  return 1e-10 + 64.0 * std::numeric_limits<double>::epsilon() * cond;
}

}  // namespace

// Frozen reference values.

TEST(FiberDistance, ConformalIdentityToFourIdentity) {
  EXPECT_NEAR(fiber_distance(diag_point({1, 1}), diag_point({4, 4})), 2.828427125, 1e-9);
  EXPECT_NEAR(fiber_distance(diag_point({1, 1}), diag_point({9, 9})), 4.0 * std::sqrt(2.0), 1e-12);
}

TEST(FiberDistance, FarPairUsesTheConePath) {
  const FiberPoint a = diag_point({1, 1});
  const FiberPoint b = diag_point({std::exp(10.0), std::exp(-10.0)});
  EXPECT_EQ(classify(a, b).tag, CaseTag::ConeConcatenation);
  EXPECT_NEAR(fiber_distance(a, b), 5.656854249, 1e-9);
}

TEST(FiberDistance, ToConeIsScaledFourthRootOfDet) {
  const FiberPoint a = diag_point({4, 9});
  EXPECT_NEAR(fiber_distance(a, FiberPoint::cone(2)), 4.0 / std::sqrt(2.0) * std::sqrt(6.0), 1e-12);
  EXPECT_EQ(fiber_distance(FiberPoint::cone(3), FiberPoint::cone(3)), 0.0);
}

TEST(InvExp, PureTraceBranch) {
  const SymTensor psi = inv_exp(SpdTensor::identity(2), SpdTensor::identity(2).scaled(std::numbers::e));
  EXPECT_NEAR(psi(0, 0), 1.297442541, 1e-9);
  EXPECT_NEAR(psi(1, 1), 1.297442541, 1e-9);
  EXPECT_NEAR(psi(0, 1), 0.0, 1e-15);
}

TEST(InvExp, IdenticalPointsGiveZero) {
  random::Engine g = random::trial_engine(1, 0);
  const SpdTensor a = random::spd(g, 3);
  EXPECT_LT(inv_exp(a, a).frobenius_sq(), 1e-24);
}

TEST(Classify, ThresholdIsStrict) {
  const std::size_t n = 2;
  const double thr = exp_image_threshold(n);
  const SymTensor dir = SymTensor::diagonal({1 / std::sqrt(2.0), -1 / std::sqrt(2.0)});
  const SpdTensor a0 = SpdTensor::identity(n);
  const auto below = FiberPoint::spd(random::along(a0, 0.0, thr * (1 - 1e-9), dir));
  const auto above = FiberPoint::spd(random::along(a0, 0.0, thr * (1 + 1e-9), dir));
  EXPECT_EQ(classify(FiberPoint::spd(a0), below).tag, CaseTag::Riemannian);
  EXPECT_EQ(classify(FiberPoint::spd(a0), above).tag, CaseTag::ConeConcatenation);
  EXPECT_LT(std::abs(fiber_distance(FiberPoint::spd(a0), below) - fiber_distance(FiberPoint::spd(a0), above)), 1e-6);
  EXPECT_THROW(inv_exp(a0, above.tensor()), Error);
}

TEST(Ingest, ClassifiesRawTensors) {
  EXPECT_FALSE(ingest(SymTensor::diagonal({1, 2})).point.is_cone());
  const IngestedPoint zero = ingest(SymTensor(2));
  EXPECT_TRUE(zero.point.is_cone());
  EXPECT_FALSE(zero.collapsed);
  const IngestedPoint psd = ingest(SymTensor::diagonal({1, 0}));
  EXPECT_TRUE(psd.point.is_cone());
  EXPECT_TRUE(psd.collapsed);
  EXPECT_THROW(ingest(SymTensor::diagonal({1, -0.5})), Error);
}

TEST(FiberGeodesic, EndpointsAndConeSwitch) {
  const FiberPoint a = diag_point({1, 1});
  const FiberPoint b = diag_point({std::exp(10.0), std::exp(-10.0)});
  EXPECT_EQ(entry_error(fiber_geodesic(a, b, 0.0), a), 0.0);
  EXPECT_EQ(entry_error(fiber_geodesic(a, b, 1.0), b), 0.0);
  EXPECT_TRUE(fiber_geodesic(a, b, 0.5).is_cone());  // equal determinants: t* = 1/2
  EXPECT_NEAR(fourth_root_det(fiber_geodesic(a, b, 0.25).tensor()), 0.5, 1e-12);
}

// Properties over random pairs of every kind.

class FiberProperties : public ::testing::TestWithParam<random::PairKind> {};

TEST_P(FiberProperties, MetricAndGeodesicLaws) {
  const random::PairKind kind = GetParam();
  for (std::uint64_t trial = 0; trial < 60; ++trial) {
    random::Engine g = random::trial_engine(21, trial, static_cast<std::uint64_t>(kind));
    const std::size_t n = 2 + trial % 2;
    const random::Pair p = random::pair(g, n, kind);
    const double d = fiber_distance(p.p0, p.p1);
    const double tol = tolerance_for(p.p0, p.p1);

    EXPECT_NEAR(fiber_distance(p.p1, p.p0), d, tol * std::max(1.0, d)) << "symmetry";

    const double c = std::exp(random::normal(g));
    auto scale = [c](const FiberPoint& q) { return q.is_cone() ? q : FiberPoint::spd(q.tensor().scaled(c)); };
    EXPECT_LT(rel(fiber_distance(scale(p.p0), scale(p.p1)), std::pow(c, n / 4.0) * d), tol) << "scaling";

    const Matrix o = random::orthogonal(g, n);
    auto rotate = [&o](const FiberPoint& q) {
      return q.is_cone() ? q : FiberPoint::spd(SpdTensor::trusted(congruence(o.transpose(), q.tensor().tensor())));
    };
    EXPECT_LT(rel(fiber_distance(rotate(p.p0), rotate(p.p1)), d), tol) << "orthogonal invariance";

    for (double t : {0.2, 0.5, 0.9}) {
      const FiberPoint m = fiber_geodesic(p.p0, p.p1, t);
      EXPECT_LT(std::abs(fiber_distance(p.p0, m) - t * d), 1e-7 * std::max(1.0, d)) << "arc length";
      EXPECT_LT(std::abs(fiber_distance(m, p.p1) - (1 - t) * d), 1e-7 * std::max(1.0, d)) << "arc length";
      const FiberPoint mr = fiber_geodesic(rotate(p.p0), rotate(p.p1), t);
      EXPECT_LT(entry_error(mr, rotate(m)), tol) << "geodesics commute with rotation";
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllKinds, FiberProperties,
                         ::testing::Values(random::PairKind::Riemannian, random::PairKind::Cone,
                                           random::PairKind::Conformal, random::PairKind::NearDegenerate,
                                           random::PairKind::ConeEndpoint));

TEST(ExpMap, VolumeLawAndRoundTrip) {
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    random::Engine g = random::trial_engine(22, trial);
    const std::size_t n = 2 + trial % 3;
    const random::Pair p = random::pair(g, n, random::PairKind::Riemannian);
    const SpdTensor& a0 = p.p0.tensor();
    const SymTensor b = inv_exp(a0, p.p1.tensor());
    EXPECT_LT(entry_error(exp_map(a0, b, 1.0), p.p1), 1e-8);
    EXPECT_LT(rel(std::sqrt(fiber_inner(a0, b, b)), fiber_distance(p.p0, p.p1)), 1e-10);
    for (double t : {0.1, 0.5, 1.0, 1.7}) {
      const FiberPoint at = exp_map(a0, b, t);
      if (at.is_cone()) continue;
      const double expected = std::sqrt(exp_volume_factor(a0, b, t)) * fourth_root_det(a0);
      EXPECT_LT(std::abs(fourth_root_det(at.tensor()) - expected) / expected, 1e-10);
    }
  }
}

TEST(ExpMap, PureTraceReachesConeAtT0) {
  const SpdTensor a0 = SpdTensor::identity(2);
  const SymTensor b = SymTensor::diagonal({-1, -1});  // tr = -2, t0 = 2
  EXPECT_NEAR(fourth_root_det(exp_map(a0, b, 1.0).tensor()), 0.5, 1e-12);
  EXPECT_TRUE(exp_map(a0, b, 2.0).is_cone());
}

TEST(PathLength, MatchesDistanceOnGeodesics) {
  for (std::uint64_t trial = 0; trial < 40; ++trial) {
    random::Engine g = random::trial_engine(23, trial);
    const auto kind = trial % 2 ? random::PairKind::Cone : random::PairKind::Riemannian;
    const random::Pair p = random::pair(g, 2 + trial % 2, kind);
    const double d = fiber_distance(p.p0, p.p1);
    const SampledPath path = SampledPath::uniform(65, [&](double t) { return fiber_geodesic(p.p0, p.p1, t); });
    EXPECT_LT(std::abs(path_length(path) - d) / d, kind == random::PairKind::Cone ? 1e-3 : 1e-6);
    EXPECT_LE(path_length_lower_bound(path), d * (1 + 1e-12));
  }
}

TEST(PathLength, DetourIsLonger) {
  const FiberPoint a = diag_point({1, 1});
  const FiberPoint b = diag_point({4, 1});
  const FiberPoint via = diag_point({1, 4});
  std::vector<double> times;
  std::vector<FiberPoint> pts;
  for (int i = 0; i <= 64; ++i) {
    const double t = i / 64.0;
    times.push_back(t);
    pts.push_back(t <= 0.5 ? fiber_geodesic(a, via, 2 * t) : fiber_geodesic(via, b, 2 * t - 1));
  }
  EXPECT_GT(path_length(SampledPath(times, pts)), fiber_distance(a, b));
}
