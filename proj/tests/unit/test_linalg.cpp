#include <gtest/gtest.h>

#include "support/fixtures.hpp"

using namespace strongmoment;
using fixtures::random_hermitian;
using fixtures::random_psd;

namespace {

double reconstruction(const CMatrix& a, const EigDecomp& e) {
  const CMatrix back = e.vectors * e.values.cast<cdouble>().asDiagonal() * e.vectors.adjoint();
  return (back - a).norm() / std::max(1.0, a.norm());
}

double orthogonality(const EigDecomp& e) {
  const Index n = e.vectors.cols();
  return (e.vectors.adjoint() * e.vectors - CMatrix::Identity(n, n)).norm();
}

}  // namespace

TEST(HermEig, IdentityHasUnitEigenvalues) {
  const EigDecomp e = herm_eig(CMatrix::Identity(2, 2));
  EXPECT_DOUBLE_EQ(e.values(0), 1.0);
  EXPECT_DOUBLE_EQ(e.values(1), 1.0);
  EXPECT_LT(orthogonality(e), 1e-14);
}

TEST(HermEig, ExampleMomentMatrix) {
  const double c = 3.0 / std::sqrt(10.0);
  const EigDecomp e = herm_eig(fixtures::example_s());
  EXPECT_NEAR(e.values(0), 1.0 - c, 1e-14);
  EXPECT_NEAR(e.values(1), 1.0 + c, 1e-14);
}

TEST(HermEig, RandomSixBySixReconstruction) {
  std::mt19937_64 rng(11);
  const CMatrix a = random_hermitian(6, rng);
  const EigDecomp e = herm_eig(a);
  EXPECT_LE(reconstruction(a, e), 1e-12);
  EXPECT_LE(orthogonality(e), 1e-12);
}

TEST(HermEig, AgreesWithEigenSolverOnRandomMatrices) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 1 + trial % 9;
    const CMatrix a = random_hermitian(n, rng);
    const EigDecomp e = herm_eig(a);
    Eigen::SelfAdjointEigenSolver<CMatrix> oracle(a);
    EXPECT_LE((e.values - oracle.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + a.norm())) << "n=" << n;
    EXPECT_LE(reconstruction(a, e), 1e-12);
    for (Index i = 1; i < n; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
  }
}

TEST(HermEig, DeterministicAcrossCalls) {
  std::mt19937_64 rng(13);
  const CMatrix a = random_hermitian(7, rng);
  const EigDecomp e1 = herm_eig(a), e2 = herm_eig(a);
  EXPECT_EQ(e1.values, e2.values);
  EXPECT_EQ(e1.vectors, e2.vectors);
}

TEST(HermEig, RepeatedEigenvaluesAndZero) {
  std::mt19937_64 rng(14);
  const CMatrix p = random_psd(5, 2, rng);
  const EigDecomp e = herm_eig(p);
  EXPECT_NEAR(e.values(0), 0.0, 1e-12 * p.norm());
  EXPECT_NEAR(e.values(2), 0.0, 1e-12 * p.norm());
  EXPECT_LE(reconstruction(p, e), 1e-12);
  EXPECT_EQ(herm_eig(CMatrix::Zero(3, 3)).values, RVector::Zero(3));
  EXPECT_EQ(herm_eig(CMatrix(0, 0)).values.size(), 0);
}

TEST(HermEig, RejectsNonHermitianAndNonFinite) {
  CMatrix a = CMatrix::Identity(2, 2);
  a(0, 1) = 1.0;
  try {
    herm_eig(a);
    FAIL() << "expected NonHermitianInput";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonHermitianInput);
  }
  a(0, 1) = std::nan("");
  a(1, 0) = std::nan("");
  EXPECT_THROW(herm_eig(a), Error);
  EXPECT_THROW(herm_eig(CMatrix::Zero(2, 3)), Error);
}

TEST(HermEig, ToleratesRoundoffAsymmetry) {
  CMatrix a = fixtures::example_s();
  a(0, 1) += 1e-14;
  EXPECT_NO_THROW(herm_eig(a));
}

TEST(PsdCheck, Examples) {
  const PsdVerdict zero = psd_check(CMatrix::Zero(3, 3));
  EXPECT_TRUE(zero.is_psd);
  EXPECT_EQ(zero.min_eig, 0.0);
  EXPECT_TRUE(psd_check(fixtures::example_s()).is_psd);
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = -0.5;
  const PsdVerdict v = psd_check(d);
  EXPECT_FALSE(v.is_psd);
  EXPECT_NEAR(v.min_eig, -0.5, 1e-15);
}

TEST(PsdCheck, ToleranceIsRelativeToNorm) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1e6;
  a(1, 1) = -1e-6;  // -1e-12 relative
  EXPECT_TRUE(psd_check(a).is_psd);
  a(1, 1) = -1e-2;
  EXPECT_FALSE(psd_check(a).is_psd);
}

TEST(PsdCheck, MonotoneUnderPsdPerturbation) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 50; ++trial) {
    const CMatrix b = random_psd(4, 1 + trial % 4, rng);
    const CMatrix extra = random_psd(4, 1 + trial % 3, rng);
    ASSERT_TRUE(psd_check(b).is_psd);
    EXPECT_TRUE(psd_check(b + extra).is_psd);
  }
}

TEST(HermSqrt, Examples) {
  EXPECT_LT((herm_sqrt(CMatrix::Identity(3, 3)) - CMatrix::Identity(3, 3)).norm(), 1e-15);
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const CMatrix r = herm_sqrt(d);
  EXPECT_NEAR(r(0, 0).real(), 2.0, 1e-14);
  EXPECT_NEAR(r(1, 1).real(), 3.0, 1e-14);
  EXPECT_NEAR(std::abs(r(0, 1)), 0.0, 1e-14);
}

TEST(HermSqrt, SquaringReproducesRandomPsd) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = random_psd(5, 1 + trial % 5, rng);
    const CMatrix r = herm_sqrt(a);
    EXPECT_LE((r * r - a).norm(), 1e-10 * a.norm());
    EXPECT_TRUE(psd_check(r).is_psd);
  }
}

TEST(HermSqrt, RejectsIndefinite) {
  CMatrix d = CMatrix::Identity(2, 2);
  d(1, 1) = -0.5;
  try {
    herm_sqrt(d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotPSD);
  }
}

TEST(PinvPsd, Examples) {
  EXPECT_LT((pinv_psd(CMatrix::Identity(2, 2)) - CMatrix::Identity(2, 2)).norm(), 1e-15);
  CMatrix d = CMatrix::Zero(2, 2);
  d(0, 0) = 2.0;
  const CMatrix p = pinv_psd(d);
  EXPECT_NEAR(p(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(std::abs(p(1, 1)), 0.0, 1e-15);
}

TEST(PinvPsd, PenroseIdentities) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = random_psd(6, 1 + trial % 6, rng);
    const CMatrix p = pinv_psd(a);
    const double s = a.norm();
    EXPECT_LE((a * p * a - a).norm(), 1e-9 * s);
    EXPECT_LE((p * a * p - p).norm(), 1e-9 * p.norm());
    EXPECT_LE(((a * p).adjoint() - a * p).norm(), 1e-9);
    EXPECT_LE(((p * a).adjoint() - p * a).norm(), 1e-9);
  }
}

TEST(OrthonormalBasis, DuplicateColumnCollapses) {
  CMatrix c = CMatrix::Zero(2, 2);
  c(0, 0) = c(0, 1) = 1.0;
  const CMatrix q = orthonormal_basis(c);
  ASSERT_EQ(q.cols(), 1);
  EXPECT_NEAR(std::abs(q(0, 0)), 1.0, 1e-15);
}

TEST(OrthonormalBasis, ExampleVectorsSpanPlane) {
  CMatrix c(2, 2);
  c << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(5.0), 1.0 / std::sqrt(2.0), 2.0 / std::sqrt(5.0);
  const CMatrix q = orthonormal_basis(c);
  ASSERT_EQ(q.cols(), 2);
  EXPECT_LT((q.adjoint() * q - CMatrix::Identity(2, 2)).norm(), 1e-14);
}

TEST(OrthonormalBasis, RankMatchesGramEigenvalueCount) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 30; ++trial) {
    const Index r = 1 + trial % 5;
    const CMatrix c = fixtures::random_complex(7, r, rng) * fixtures::random_complex(r, 9, rng);
    const CMatrix q = orthonormal_basis(c);
    Eigen::SelfAdjointEigenSolver<CMatrix> oracle(c.adjoint() * c);
    const double top = oracle.eigenvalues().maxCoeff();
    Index rank = 0;
    for (Index i = 0; i < oracle.eigenvalues().size(); ++i) rank += oracle.eigenvalues()(i) > 1e-12 * top;
    EXPECT_EQ(q.cols(), rank);
    EXPECT_EQ(q.cols(), r);
    EXPECT_LT((q.adjoint() * q - CMatrix::Identity(r, r)).norm(), 1e-12);
    EXPECT_LT((q * (q.adjoint() * c) - c).norm(), 1e-10 * c.norm());
  }
}

TEST(OrthonormalBasis, EmptyAndZeroInputs) {
  EXPECT_EQ(orthonormal_basis(CMatrix::Zero(3, 2)).cols(), 0);
  EXPECT_EQ(orthonormal_basis(CMatrix(3, 0)).cols(), 0);
}

TEST(OrthogonalComplement, CompletesBasis) {
  std::mt19937_64 rng(19);
  const CMatrix q = orthonormal_basis(fixtures::random_complex(5, 2, rng));
  const CMatrix w = orthogonal_complement(q, 5);
  ASSERT_EQ(w.cols(), 3);
  EXPECT_LT((q.adjoint() * w).norm(), 1e-12);
  EXPECT_LT((w.adjoint() * w - CMatrix::Identity(3, 3)).norm(), 1e-12);
  EXPECT_EQ(orthogonal_complement(CMatrix(4, 0), 4).cols(), 4);
}

TEST(OperatorNorm, MatchesLargestSingularValue) {
  std::mt19937_64 rng(20);
  const CMatrix a = fixtures::random_complex(4, 3, rng);
  Eigen::JacobiSVD<CMatrix> svd(a);
  EXPECT_NEAR(operator_norm(a), svd.singularValues()(0), 1e-12 * svd.singularValues()(0));
}
