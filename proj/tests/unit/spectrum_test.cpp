#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "lowrank/errors.hpp"
#include "lowrank/linalg.hpp"
#include "lowrank/spectrum.hpp"
#include "test_util.hpp"

using namespace lowrank;
using lowrank::testing::max_abs_diff;
using lowrank::testing::random_orthogonal;

namespace {

Matrix givens(double theta) {
  Matrix g(2, 2);
  g << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return g;
}

}  // namespace

TEST(ExperimentSpectrum, PaperSettingFirstValuesAndTail) {
  auto v = experiment_spectrum(7.0, 2.0, 10, 1000);
  ASSERT_EQ(v.size(), 1000u);
  const double step = 5.0 / 9.0;
  EXPECT_NEAR(v[0], 7.0, 1e-15);
  EXPECT_NEAR(v[1], 7.0 - step, 1e-14);
  EXPECT_NEAR(v[2], 7.0 - 2 * step, 1e-14);
  EXPECT_NEAR(v[9], 2.0, 1e-14);
  for (std::size_t i = 10; i < v.size(); ++i) EXPECT_EQ(v[i], 1.0);
}

TEST(ExperimentSpectrum, TwoPointInterpolation) {
  auto v = experiment_spectrum(7.0, 2.0, 2, 4);
  EXPECT_EQ(v, (std::vector<double>{7.0, 2.0, 1.0, 1.0}));
}

TEST(ExperimentSpectrum, RejectsDegenerateInputs) {
  EXPECT_THROW(experiment_spectrum(3.0, 3.0, 10, 500), PreconditionError);
  EXPECT_THROW(experiment_spectrum(7.0, 1.0, 10, 500), PreconditionError);
  EXPECT_THROW(experiment_spectrum(7.0, 2.0, 1, 500), PreconditionError);
}

TEST(MakeDiagonalTarget, PaperTarget) {
  Target t = make_diagonal_target(experiment_spectrum(7.0, 2.0, 10, 1000), 1000, 10);
  EXPECT_EQ(t.dim(), 1000u);
  EXPECT_EQ(t.rank(), 10u);
  EXPECT_TRUE(t.is_diagonal());
  EXPECT_NEAR(t.eigengap(), 1.0, 1e-14);
  EXPECT_NEAR(t.top_eigenvalue(), 7.0, 1e-15);
  EXPECT_NEAR(t.matrix()(9, 9), 2.0, 1e-14);
  EXPECT_EQ(t.matrix()(0, 1), 0.0);

  auto oracle = best_rank_r(t);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(oracle.sigma_r_matrix(i, i), t.eigenvalues()[i], 1e-15);
  EXPECT_EQ(oracle.sigma_r_matrix(10, 10), 0.0);
  EXPECT_EQ(oracle.sigma_r_matrix(999, 999), 0.0);
}

TEST(MakeDiagonalTarget, EqualTopSettingB) {
  Target t = make_diagonal_target(equal_top_spectrum(3.0, 10, 500), 500, 10);
  EXPECT_NEAR(t.eigengap(), 2.0, 1e-15);
  EXPECT_EQ(t.cut_eigenvalue(), 3.0);
  EXPECT_EQ(t.tail_eigenvalue(), 1.0);
}

TEST(MakeDiagonalTarget, TwoPointGap) {
  Target t = make_diagonal_target({2.0, 1.0}, 2, 1);
  EXPECT_EQ(t.eigengap(), 1.0);
}

TEST(MakeDiagonalTarget, RejectsBadSpectra) {
  EXPECT_THROW(make_diagonal_target({1.0, 2.0}, 2, 1), PreconditionError);
  EXPECT_THROW(make_diagonal_target({2.0, 2.0, 1.0}, 3, 1), PreconditionError);
  EXPECT_THROW(make_diagonal_target({2.0, 1.0}, 3, 1), PreconditionError);
  EXPECT_THROW(make_diagonal_target({2.0, 1.0}, 2, 2), PreconditionError);
  EXPECT_THROW(make_diagonal_target({2.0, std::nan("")}, 2, 1), PreconditionError);
}

TEST(BestRankR, DiagonalTruncation) {
  Target t = make_diagonal_target({3.0, 2.0, 1.0}, 3, 2);
  auto o = best_rank_r(t);
  Matrix expect_sigma = Eigen::Vector3d(3, 2, 0).asDiagonal();
  Matrix expect_pi = Eigen::Vector3d(1, 1, 0).asDiagonal();
  EXPECT_LE(max_abs_diff(o.sigma_r_matrix, expect_sigma), 1e-15);
  EXPECT_LE(max_abs_diff(o.projector, expect_pi), 1e-15);
  EXPECT_EQ(o.gap, 1.0);
}

TEST(BestRankR, RotatedTwoPointResidualIsDroppedEigenvalue) {
  const double theta = 0.37;
  Target t({2.0, 1.0}, 1, givens(theta));
  auto o = best_rank_r(t);
  auto sv = linalg::singular_values(o.sigma_r_matrix);
  EXPECT_NEAR(sv[0], 2.0, 1e-12);
  EXPECT_LE(sv[1], 1e-10);
  EXPECT_NEAR(linalg::frobenius_norm(t.matrix() - o.sigma_r_matrix), 1.0, 1e-12);
  Eigen::Vector2d v(std::cos(theta), std::sin(theta));
  EXPECT_LE(max_abs_diff(o.sigma_r_matrix, 2.0 * v * v.transpose()), 1e-12);
}

TEST(BestRankR, OracleInvariantsOnRotatedTargets) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    int d = 3 + trial % 6;
    int r = 1 + trial % (d - 1);
    std::vector<double> values(d);
    for (int i = 0; i < d; ++i) values[i] = d - i + (i >= r ? 0.0 : 0.5);
    Target t(values, r, random_orthogonal(d, rng));
    auto o = best_rank_r(t);

    double tail_sq = 0.0;
    for (int i = r; i < d; ++i) tail_sq += values[i] * values[i];
    double resid = linalg::frobenius_norm(t.matrix() - o.sigma_r_matrix);
    EXPECT_NEAR(resid * resid, tail_sq, 1e-8 * tail_sq);

    EXPECT_LE(max_abs_diff(o.projector * o.sigma_r_matrix, o.sigma_r_matrix), 1e-9);
    EXPECT_LE(max_abs_diff(o.projector * o.projector, o.projector), 1e-10);
    EXPECT_LE(max_abs_diff(o.projector, o.projector.transpose()), 1e-10);
    EXPECT_NEAR(o.projector.trace(), r, 1e-8);
    auto sv = linalg::singular_values(o.sigma_r_matrix);
    for (int i = r; i < d; ++i) EXPECT_LE(sv[i], 1e-10);

    Matrix basis = *t.basis();
    Matrix rebuilt = basis * Eigen::Map<const Eigen::VectorXd>(values.data(), d).asDiagonal() *
                     basis.transpose();
    EXPECT_LE(max_abs_diff(rebuilt, t.matrix()), 1e-10);
  }
}

TEST(Target, FromMatrixRecoversSpectrum) {
  std::mt19937_64 rng(22);
  Matrix q = random_orthogonal(5, rng);
  Matrix s = q * Eigen::VectorXd::LinSpaced(5, 5.0, 1.0).asDiagonal() * q.transpose();
  s = 0.5 * (s + s.transpose());
  Target t = make_target_from_matrix(s, 2);
  EXPECT_NEAR(t.eigengap(), 1.0, 1e-10);
  EXPECT_LE(max_abs_diff(t.matrix(), s), 1e-10);
}

TEST(Target, ApplyAndSqrtMatchDenseProducts) {
  std::mt19937_64 rng(23);
  Target diag = make_diagonal_target({4.0, 2.0, 1.0, 0.25}, 4, 2);
  Target rot({4.0, 2.0, 1.0, 0.25}, 2, random_orthogonal(4, rng));
  Matrix m = lowrank::testing::random_matrix(4, 3, rng);
  for (const Target* t : {&diag, &rot}) {
    EXPECT_LE(max_abs_diff(t->apply(m), t->matrix() * m), 1e-13);
    Matrix root = t->apply_sqrt(Matrix::Identity(4, 4));
    EXPECT_LE(max_abs_diff(root * root, t->matrix()), 1e-12);
  }
}

TEST(Target, RejectsNonOrthonormalBasis) {
  Matrix b = Matrix::Identity(2, 2);
  b(0, 1) = 0.1;
  EXPECT_THROW(Target({2.0, 1.0}, 1, b), PreconditionError);
}

TEST(SplitDistance, MatchesDenseError) {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    Target t({5.0, 3.0, 1.0, 0.5, 0.1}, 2, random_orthogonal(5, rng));
    auto o = best_rank_r(t);
    Matrix x = lowrank::testing::random_matrix(5, 2, rng);
    double dense = linalg::frobenius_norm(o.sigma_r_matrix - x * x.transpose());
    double split = std::sqrt(split_distance(t.split(x), o.leading_values));
    EXPECT_NEAR(split, dense, 1e-12 * std::max(1.0, dense));
  }
}
