#include <gtest/gtest.h>

#include "metgeo/random.hpp"
#include "metgeo/spd_core.hpp"
#include "test_util.hpp"

using namespace metgeo;
using metgeo::testing::max_entry_diff;

TEST(SymTensor, SymmetrizeAveragesOffDiagonal) {
  const Matrix m = Matrix::from_row_major(2, std::vector<double>{1, 2, 4, 3});
  const SymTensor s = SymTensor::symmetrize(m);
  EXPECT_EQ(s(0, 1), 3.0);
  EXPECT_EQ(s(1, 0), 3.0);
  EXPECT_EQ(SymTensor::asymmetry(m) > 0.0, true);
}

TEST(SymEigen, ReconstructsAndOrthonormal) {
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    random::Engine g = random::trial_engine(3, trial);
    const std::size_t n = 1 + trial % 4;
    const SymTensor s = random::symmetric(g, n, 2.0);
    const EigenSystem es = sym_eigen(s);
    for (std::size_t i = 1; i < n; ++i) EXPECT_GE(es.eigenvalues[i - 1], es.eigenvalues[i]);
    SymTensor d = SymTensor::diagonal(es.eigenvalues);
    EXPECT_LT(max_entry_diff(congruence(es.frame, d), s), 1e-12);
    const SymTensor gram = SymTensor::symmetrize(es.frame.transpose() * es.frame);
    EXPECT_LT(max_entry_diff(gram, SymTensor::identity(n)), 1e-13);
  }
}

TEST(SpdFunctions, LogInvertsExpAndSqrtSquares) {
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    random::Engine g = random::trial_engine(4, trial);
    const std::size_t n = 2 + trial % 3;
    const SymTensor s = random::symmetric(g, n);
    EXPECT_LT(max_entry_diff(spd_log(sym_exp(s)), s), 1e-11);
    const SpdTensor a = random::spd(g, n);
    const SpdTensor r = spd_sqrt(a);
    EXPECT_LT(max_entry_diff(SymTensor::symmetrize(r.tensor().matrix() * r.tensor().matrix()), a.tensor()), 1e-12);
    EXPECT_NEAR(std::pow(det(a), 0.25), fourth_root_det(a), 1e-12 * fourth_root_det(a));
  }
}

TEST(SpdTensor, RejectsIndefiniteAndSemidefinite) {
  EXPECT_THROW(SpdTensor::make(SymTensor::diagonal({1.0, -1.0})), Error);
  EXPECT_THROW(SpdTensor::make(SymTensor::diagonal({1.0, 0.0})), Error);
  EXPECT_NO_THROW(SpdTensor::make(SymTensor::diagonal({1.0, 1e-6})));
  try {
    SpdTensor::make(SymTensor::diagonal({1.0, -1.0}));
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotPositiveDefinite);
  }
}

TEST(FiberInner, IdentityIsFrobenius) {
  const SymTensor b = SymTensor::from_rows({{1, 2}, {2, 3}});
  EXPECT_NEAR(fiber_inner(SpdTensor::identity(2), b, b), 1 + 4 + 4 + 9, 1e-13);
  // scaling a by c scales tr_a(bb) by c^-2 and sqrt(det a) by c^{n/2}
  EXPECT_NEAR(fiber_inner(SpdTensor::identity(2).scaled(4.0), b, b), 18.0 / 16.0 * 4.0, 1e-13);
}

TEST(TracelessSplit, RemovesTheA0Trace) {
  random::Engine g = random::trial_engine(5, 0);
  const SpdTensor a0 = random::spd(g, 3);
  const SymTensor b = random::symmetric(g, 3);
  const TracelessSplit sp = traceless_split(a0, b);
  EXPECT_NEAR(traceless_split(a0, sp.traceless).trace, 0.0, 1e-12);
  EXPECT_NEAR(sp.trace, frobenius_dot(spd_inverse(a0).tensor(), b), 1e-12);
}
