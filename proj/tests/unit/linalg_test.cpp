#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lowrank/errors.hpp"
#include "lowrank/linalg.hpp"
#include "test_util.hpp"

namespace la = lowrank::linalg;
using lowrank::Matrix;
using lowrank::testing::max_abs_diff;
using lowrank::testing::random_matrix;

TEST(FrobeniusNorm, ZeroIdentityAndSmallMatrix) {
  EXPECT_EQ(la::frobenius_norm(Matrix::Zero(2, 2)), 0.0);
  EXPECT_NEAR(la::frobenius_norm(Matrix::Identity(3, 3)), std::sqrt(3.0), 1e-15);
  Matrix m(2, 2);
  m << 1, 2, 3, 4;
  EXPECT_NEAR(la::frobenius_norm(m), std::sqrt(30.0), 1e-14);
}

TEST(SingularValues, IdentityAndSignedDiagonal) {
  auto s = la::singular_values(Matrix::Identity(3, 3));
  ASSERT_EQ(s.size(), 3u);
  for (double v : s) EXPECT_NEAR(v, 1.0, 1e-15);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3;
  d(1, 1) = -4;
  s = la::singular_values(d);
  EXPECT_NEAR(s[0], 4.0, 1e-15);
  EXPECT_NEAR(s[1], 3.0, 1e-15);
}

TEST(SingularValues, MatchesCharacteristicPolynomialOf2x2Gram) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix m = random_matrix(3, 2, rng);
    Matrix g = m.transpose() * m;
    // eigenvalues of [[a, b], [b, c]] from the quadratic formula
    double a = g(0, 0), b = g(0, 1), c = g(1, 1);
    double mean = 0.5 * (a + c);
    double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    auto s = la::singular_values(m);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_NEAR(s[0], std::sqrt(mean + rad), 1e-9);
    EXPECT_NEAR(s[1], std::sqrt(std::max(0.0, mean - rad)), 1e-9);
  }
}

TEST(SingularValues, TransposeInvariantAndDescending) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    Matrix m = random_matrix(2 + trial % 7, 1 + trial % 4, rng);
    auto a = la::singular_values(m);
    auto b = la::singular_values(m.transpose());
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(a[i], b[i], 1e-10 * std::max(1.0, a[0]));
      if (i > 0) EXPECT_GE(a[i - 1], a[i]);
    }
  }
}

TEST(SingularValues, AgreeWithEigenJacobiSvd) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    Matrix m = random_matrix(9, 4, rng) * 5.0;
    Eigen::JacobiSVD<Matrix> ref(m);
    auto s = la::singular_values(m);
    for (Eigen::Index i = 0; i < ref.singularValues().size(); ++i)
      EXPECT_NEAR(s[i], ref.singularValues()(i), 1e-10 * ref.singularValues()(0));
  }
}

TEST(SymEig, DiagonalInput) {
  Matrix d = Eigen::Vector3d(5, 2, 1).asDiagonal();
  auto e = la::sym_eig(d);
  EXPECT_NEAR(e.values[0], 5.0, 1e-15);
  EXPECT_NEAR(e.values[1], 2.0, 1e-15);
  EXPECT_NEAR(e.values[2], 1.0, 1e-15);
  EXPECT_NEAR(max_abs_diff(e.vectors.cwiseAbs(), Matrix::Identity(3, 3)), 0.0, 1e-15);
}

TEST(SymEig, SwapMatrixClosedForm) {
  Matrix s(2, 2);
  s << 0, 1, 1, 0;
  auto e = la::sym_eig(s);
  EXPECT_NEAR(e.values[0], 1.0, 1e-14);
  EXPECT_NEAR(e.values[1], -1.0, 1e-14);
}

TEST(SymEig, IdentityHasUnitSpectrum) {
  auto e = la::sym_eig(Matrix::Identity(4, 4));
  for (double v : e.values) EXPECT_NEAR(v, 1.0, 1e-15);
}

TEST(SymEig, RejectsAsymmetricInput) {
  Matrix s(2, 2);
  s << 1, 2, 0, 1;
  EXPECT_THROW(la::sym_eig(s), lowrank::PreconditionError);
  EXPECT_THROW(la::sym_eig(Matrix::Zero(2, 3)), lowrank::PreconditionError);
}

TEST(SymEig, ResidualOrthogonalityAndEigenCrossCheck) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 2 + trial % 9;
    Matrix a = random_matrix(n, n, rng);
    Matrix s = a + a.transpose();
    auto e = la::sym_eig(s);
    Matrix lam = Eigen::Map<const Eigen::VectorXd>(e.values.data(), n).asDiagonal();
    EXPECT_LE(max_abs_diff(s * e.vectors, e.vectors * lam), 1e-9);
    EXPECT_LE(max_abs_diff(e.vectors.transpose() * e.vectors, Matrix::Identity(n, n)), 1e-10);
    for (int i = 1; i < n; ++i) EXPECT_GE(e.values[i - 1], e.values[i]);

    Eigen::SelfAdjointEigenSolver<Matrix> ref(s);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(e.values[i], ref.eigenvalues()(n - 1 - i), 1e-10);
  }
}

TEST(SymEig, PsdSpectrumMatchesSingularValues) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = random_matrix(6, 6, rng);
    Matrix s = a.transpose() * a;
    auto e = la::sym_eig(s);
    auto sv = la::singular_values(s);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(e.values[i], sv[i], 1e-10 * std::max(1.0, sv[0]));
  }
}

TEST(Svd, DiagonalAndZero) {
  Matrix d = Eigen::Vector2d(3, 1).asDiagonal();
  auto f = la::svd(d);
  EXPECT_NEAR(f.values[0], 3.0, 1e-15);
  EXPECT_NEAR(f.values[1], 1.0, 1e-15);

  auto z = la::svd(Matrix::Zero(3, 2));
  for (double v : z.values) EXPECT_EQ(v, 0.0);
  EXPECT_LE(max_abs_diff(z.left.transpose() * z.left, Matrix::Identity(2, 2)), 1e-12);
  EXPECT_LE(max_abs_diff(z.right.transpose() * z.right, Matrix::Identity(2, 2)), 1e-12);
}

TEST(Svd, ReconstructsAndAgreesWithSingularValues) {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 40; ++trial) {
    int rows = 1 + trial % 6, cols = 1 + (trial / 6) % 5;
    Matrix m = random_matrix(rows, cols, rng);
    if (trial % 5 == 0 && cols > 1) m.col(cols - 1) = m.col(0);  // rank deficient
    auto f = la::svd(m);
    auto s = la::singular_values(m);
    int k = std::min(rows, cols);
    ASSERT_EQ(static_cast<int>(f.values.size()), k);
    for (int i = 0; i < k; ++i) EXPECT_NEAR(f.values[i], s[i], 1e-10);
    Matrix sig = Eigen::Map<const Eigen::VectorXd>(f.values.data(), k).asDiagonal();
    Matrix rebuilt = f.left * sig * f.right.transpose();
    EXPECT_LE(la::frobenius_norm(rebuilt - m), 1e-9 * std::max(1.0, la::frobenius_norm(m)));
    EXPECT_LE(max_abs_diff(f.left.transpose() * f.left, Matrix::Identity(k, k)), 1e-10);
    EXPECT_LE(max_abs_diff(f.right.transpose() * f.right, Matrix::Identity(k, k)), 1e-10);
  }
}

TEST(SpdInvSqrt, IdentityAndDiagonal) {
  EXPECT_LE(max_abs_diff(la::spd_inv_sqrt(Matrix::Identity(2, 2)), Matrix::Identity(2, 2)), 1e-15);
  Matrix d = Eigen::Vector2d(4, 9).asDiagonal();
  Matrix r = la::spd_inv_sqrt(d);
  EXPECT_NEAR(r(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(r(1, 1), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(r(0, 1), 0.0, 1e-15);
}

TEST(SpdInvSqrt, ResidualOnRandomSpd) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    int n = 1 + trial % 8;
    Matrix a = random_matrix(n, n, rng);
    Matrix s = a.transpose() * a + Matrix::Identity(n, n);
    Matrix r = la::spd_inv_sqrt(s);
    EXPECT_LE(max_abs_diff(r * s * r, Matrix::Identity(n, n)), 1e-9);
    EXPECT_LE(max_abs_diff(r, r.transpose()), 1e-10);
  }
}

TEST(SpdInvSqrt, RejectsSingular) {
  Matrix s = Eigen::Vector2d(1, 0).asDiagonal();
  EXPECT_THROW(la::spd_inv_sqrt(s), lowrank::NumericalError);
}

TEST(RequireValid, RejectsNonFiniteAndEmpty) {
  Matrix m = Matrix::Ones(2, 2);
  m(1, 0) = std::nan("");
  EXPECT_THROW(la::require_valid(m, "m"), lowrank::PreconditionError);
  EXPECT_THROW(la::require_valid(Matrix(0, 3), "m"), lowrank::PreconditionError);
  EXPECT_NO_THROW(la::require_valid(Matrix::Ones(1, 1), "m"));
}
