#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace aiedet;
using testing_support::random_hpd;
using testing_support::random_matrix;
using testing_support::rel_err;
using testing_support::to_oracle;

TEST(HermitianSolve, IdentityReturnsRightHandSide) {
  std::mt19937_64 rng(1);
  const CMatrix b = random_matrix(3, 2, rng);
  const HermitianPD a(CMatrix::Identity(3, 3));
  EXPECT_LE((hermitian_solve(a, b) - b).norm(), 1e-15);
}

TEST(HermitianSolve, DiagonalCase) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 2.0;
  a(1, 1) = 4.0;
  CMatrix b(2, 1);
  b << 2.0, 4.0;
  const CMatrix x = hermitian_solve(HermitianPD(a), b);
  EXPECT_NEAR(std::abs(x(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(x(1, 0) - 1.0), 0.0, 1e-15);
}

TEST(HermitianSolve, ResidualAndInverseOracle) {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const CMatrix a = random_hpd(5, rng);
    const CMatrix b = random_matrix(5, 3, rng);
    const CMatrix x = hermitian_solve(HermitianPD(a), b);
    EXPECT_LE((a * x - b).norm() / b.norm(), 1e-8);
    const oracle::Mat xo = oracle::inverse(to_oracle(a)) * to_oracle(b);
    for (Index i = 0; i < 5; ++i) {
      for (Index j = 0; j < 3; ++j) {
        EXPECT_LE(std::abs(x(i, j) - xo(i, j)), 1e-9 * (1.0 + std::abs(xo(i, j))));
      }
    }
  }
}

TEST(Logdet, IdentityAndDiagonal) {
  EXPECT_DOUBLE_EQ(logdet(HermitianPD(CMatrix::Identity(4, 4))), 0.0);
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = std::exp(1.0);
  d(1, 1) = std::exp(2.0);
  EXPECT_NEAR(logdet(HermitianPD(d)), 3.0, 1e-14);
}

TEST(Logdet, MatchesCofactorExpansion) {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const CMatrix a = random_hpd(4, rng);
    const double expect = std::log(oracle::det_cofactor(to_oracle(a)).real());
    EXPECT_LE(rel_err(logdet(HermitianPD(a)), expect), 1e-8);
  }
}

TEST(Logdet, ScalingProperty) {
  std::mt19937_64 rng(4);
  for (double c : {1e-3, 0.5, 7.0, 1e3}) {
    const CMatrix a = random_hpd(6, rng);
    EXPECT_NEAR(logdet(HermitianPD(c * a)), logdet(HermitianPD(a)) + 6.0 * std::log(c), 1e-9);
  }
}

TEST(Logdet, NoOverflowForHugeEntries) {
  const CMatrix a = 1e200 * CMatrix::Identity(8, 8);
  const double v = logdet(HermitianPD(a));
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, 8.0 * 200.0 * std::log(10.0), 1e-9);
}

TEST(HermitianPDCheck, RejectsNonHermitian) {
  CMatrix a = CMatrix::Identity(2, 2);
  a(0, 1) = Complex(0.5, 0.0);
  EXPECT_THROW(HermitianPD{a}, InvalidParameter);
}

TEST(HermitianPDCheck, RejectsNonFinite) {
  CMatrix a = CMatrix::Identity(2, 2);
  a(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(HermitianPD{a}, InvalidParameter);
}

TEST(HermitianPDCheck, JitterRescuesSingularPsd) {
  std::mt19937_64 rng(5);
  const CMatrix z = random_matrix(4, 2, rng);
  const HermitianPD a(hermitian_part(z * z.adjoint()));
  EXPECT_GT(a.jitter(), 0.0);
  EXPECT_TRUE(std::isfinite(a.logdet()));
}

TEST(HermitianPDCheck, IndefiniteFails) {
  CMatrix a = CMatrix::Identity(3, 3);
  a(2, 2) = -1.0;
  EXPECT_THROW(HermitianPD{a}, FactorizationFailure);
}

TEST(PseudoQuadratic, RankOneSelfQuery) {
  CMatrix z(3, 1);
  z << Complex(0.6, 0.0), Complex(0.0, 0.8), Complex(0.0, 0.0);
  EXPECT_NEAR(pseudo_quadratic(z * z.adjoint(), z), 1.0, 1e-12);
}

TEST(PseudoQuadratic, OrthogonalQueryIsZero) {
  CMatrix g = CMatrix::Zero(3, 3);
  g(0, 0) = 2.0;
  CMatrix z(3, 1);
  z << 0.0, 1.0, Complex(0.0, -3.0);
  EXPECT_NEAR(pseudo_quadratic(g, z), 0.0, 1e-15);
}

TEST(PseudoQuadratic, RankTwoMatchesExplicitPseudoInverse) {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const CMatrix zc = random_matrix(4, 2, rng);
    const CMatrix q = random_matrix(4, 1, rng);
    const double got = pseudo_quadratic(zc * zc.adjoint(), q);
    const double expect = oracle::pinv_quadratic(to_oracle(zc), to_oracle(q));
    EXPECT_LE(rel_err(got, expect), 1e-9);
  }
}

TEST(PseudoQuadratic, ScaleCancellation) {
  std::mt19937_64 rng(7);
  const CMatrix zc = random_matrix(5, 3, rng);
  const CMatrix g = zc * zc.adjoint();
  const CMatrix q = random_matrix(5, 1, rng);
  for (double c : {1e-4, 3.0, 1e4}) {
    EXPECT_LE(rel_err(pseudo_quadratic(c * g, std::sqrt(c) * q), pseudo_quadratic(g, q)),
              1e-9);
  }
}

TEST(DetectionInputCheck, AcceptsValidShapes) {
  std::mt19937_64 rng(8);
  const DetectionInput in(random_matrix(8, 3, rng), random_matrix(8, 16, rng),
                          random_matrix(8, 2, rng));
  EXPECT_EQ(in.n(), 8);
  EXPECT_EQ(in.k(), 3);
  EXPECT_EQ(in.l(), 16);
  EXPECT_EQ(in.p(), 2);
}

TEST(DetectionInputCheck, RejectsBadShapes) {
  std::mt19937_64 rng(9);
  // L < N
  EXPECT_THROW(DetectionInput(random_matrix(4, 2, rng), random_matrix(4, 3, rng),
                              random_matrix(4, 1, rng)),
               InvalidParameter);
  // p > N
  EXPECT_THROW(DetectionInput(random_matrix(2, 1, rng), random_matrix(2, 3, rng),
                              random_matrix(2, 3, rng)),
               InvalidParameter);
  // row mismatch between Z and H
  EXPECT_THROW(DetectionInput(random_matrix(4, 2, rng), random_matrix(4, 5, rng),
                              random_matrix(3, 1, rng)),
               InvalidParameter);
}

TEST(DetectionInputCheck, RejectsRankDeficientSubspace) {
  std::mt19937_64 rng(10);
  CMatrix h = random_matrix(4, 2, rng);
  h.col(1) = h.col(0) * Complex(2.0, -1.0);
  EXPECT_THROW(DetectionInput(random_matrix(4, 2, rng), random_matrix(4, 5, rng), h),
               InvalidParameter);
}

TEST(DetectionInputCheck, RejectsNonFinite) {
  std::mt19937_64 rng(11);
  CMatrix zl = random_matrix(4, 5, rng);
  zl(2, 3) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(DetectionInput(random_matrix(4, 2, rng), zl, random_matrix(4, 1, rng)),
               InvalidParameter);
}
