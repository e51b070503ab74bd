#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "lowrank/eigenspace.hpp"
#include "lowrank/errors.hpp"
#include "lowrank/init.hpp"
#include "lowrank/linalg.hpp"
#include "lowrank/spectrum.hpp"
#include "lowrank/sym_gd.hpp"
#include "test_util.hpp"

using namespace lowrank;
using lowrank::testing::max_abs_diff;
using lowrank::testing::random_matrix;
using lowrank::testing::random_orthogonal;

namespace {

const Target& toy() {
  static const Target t = make_diagonal_target({2.0, 1.0}, 2, 1);
  return t;
}

EigState col2(double a, double b) { return EigState(Eigen::Vector2d(a, b)); }

}  // namespace

TEST(RfStep, InvariantSubspaceFramesAreFixed) {
  for (auto l : {col2(1.0, 0.0), col2(0.0, 1.0)}) {
    EigState next = rf_step(l, toy(), 0.3);
    EXPECT_EQ(max_abs_diff(next.l(), l.l()), 0.0);
  }
}

TEST(RfStep, DiagonalExampleAgainstDirectFormula) {
  const double h = 1.0 / std::sqrt(2.0);
  EigState next = rf_step(col2(h, h), toy(), 0.1);
  // Sigma L = (2h, h); L^T Sigma L = 1.5; (I - L L^T) Sigma L = (0.5h, -0.5h)
  EXPECT_NEAR(next.l()(0, 0), h + 0.1 * 0.5 * h, 1e-15);
  EXPECT_NEAR(next.l()(1, 0), h - 0.1 * 0.5 * h, 1e-15);
}

TEST(RfStep, RandomInstancesMatchProjectorForm) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 6, r = 2;
    Target t({4.0, 3.0, 1.0, 0.7, 0.3, 0.0}, r, random_orthogonal(d, rng));
    Matrix l = random_matrix(d, r, rng);
    Matrix expect = l + 0.05 * (Matrix::Identity(d, d) - l * l.transpose()) * t.matrix() * l;
    EXPECT_LE(max_abs_diff(rf_step(EigState(l), t, 0.05).l(), expect), 1e-12);
    EXPECT_LE(max_abs_diff(rf_step(EigState(l), t.matrix(), 0.05).l(), expect), 1e-12);
  }
}

TEST(RfStep, DimensionMismatch) {
  EXPECT_THROW(rf_step(EigState(Matrix::Ones(3, 1)), toy(), 0.1), DimensionError);
  EXPECT_THROW(rf_step(col2(1.0, 0.0), Matrix::Ones(2, 3), 0.1), DimensionError);
}

TEST(Retract, Examples) {
  Matrix r = retract(Eigen::Vector2d(2.0, 0.0));
  EXPECT_NEAR(r(0, 0), 1.0, 1e-15);
  EXPECT_EQ(r(1, 0), 0.0);

  std::mt19937_64 rng(62);
  Matrix q = random_orthogonal(5, rng).leftCols(2);
  EXPECT_LE(max_abs_diff(retract(q), q), 1e-12);

  for (int trial = 0; trial < 30; ++trial) {
    Matrix l = random_matrix(5, 2, rng);
    Matrix out = retract(l);
    EXPECT_LE(max_abs_diff(out.transpose() * out, Matrix::Identity(2, 2)), 1e-9);
    // same span: projecting l onto span(out) reproduces l
    EXPECT_LE(max_abs_diff(out * (out.transpose() * l), l), 1e-12);
  }
}

TEST(Retract, RankDeficientInput) {
  Matrix l(3, 2);
  l << 1, 2, 1, 2, 1, 2;
  EXPECT_THROW(retract(l), NumericalError);
}

TEST(RgdStep, FixedPointsAndDirectFormula) {
  EXPECT_EQ(max_abs_diff(rgd_step(col2(1.0, 0.0), toy(), 0.2).l(), col2(1.0, 0.0).l()), 0.0);
  EXPECT_LE(max_abs_diff(rgd_step(col2(0.0, 1.0), toy(), 0.2).l(), col2(0.0, 1.0).l()), 1e-15);

  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 30; ++trial) {
    Target t({3.0, 2.0, 1.0, 0.5}, 2, random_orthogonal(4, rng));
    Matrix l = random_matrix(4, 2, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> es(l.transpose() * l);
    Matrix q = l * es.operatorInverseSqrt();
    Matrix expect = q + 0.05 * (Matrix::Identity(4, 4) - q * q.transpose()) * t.matrix() * q;
    EXPECT_LE(max_abs_diff(rgd_step(EigState(l), t, 0.05).l(), expect), 1e-12);
  }
}

TEST(ProjError, Examples) {
  Target t = make_diagonal_target({3.0, 2.0, 1.0, 0.5}, 4, 2);
  auto o = best_rank_r(t);
  EXPECT_NEAR(proj_error(EigState(Matrix::Identity(4, 2)), o), 0.0, 1e-15);
  EXPECT_NEAR(proj_error(EigState(Matrix::Zero(4, 2)), o), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(proj_error(col2(0.0, 1.0), best_rank_r(toy())), std::sqrt(2.0), 1e-15);
}

TEST(ProjError, MatchesDenseProjector) {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 30; ++trial) {
    Target t({5.0, 4.0, 3.0, 1.0, 0.5, 0.2, 0.1}, 3, random_orthogonal(7, rng));
    auto o = best_rank_r(t);
    Matrix l = random_matrix(7, 3, rng);
    double dense = (o.projector - l * l.transpose()).norm();
    EXPECT_NEAR(proj_error(EigState(l), o), dense, 1e-12 * std::max(1.0, dense));
  }
}

TEST(LiftToSym, Examples) {
  std::mt19937_64 rng(65);
  Matrix l = random_matrix(3, 2, rng);
  Target id = make_diagonal_target({1.0 + 1e-9, 1.0, 1.0}, 3, 1);
  EXPECT_LE(max_abs_diff(lift_to_sym(EigState(l.leftCols(1)), id).x(), l.leftCols(1)), 1e-9);

  Target t = make_diagonal_target({4.0, 1.0}, 2, 1);
  Matrix x = lift_to_sym(col2(1.0, 0.0), t).x();
  EXPECT_EQ(x(0, 0), 2.0);
  EXPECT_EQ(x(1, 0), 0.0);
}

TEST(LiftToSym, CommutesWithGdStep) {
  std::mt19937_64 rng(66);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 3 + trial % 6, r = 1 + trial % 3;
    if (r >= d) continue;
    std::vector<double> v(d);
    for (int i = 0; i < d; ++i) v[i] = (d - i) * 0.7;
    Target t = trial % 2 ? make_diagonal_target(v, d, r) : Target(v, r, random_orthogonal(d, rng));
    EigState l(random_matrix(d, r, rng));
    const double eta = 0.04;
    Matrix lhs = lift_to_sym(rf_step(l, t, eta), t).x();
    Matrix rhs = gd_step(lift_to_sym(l, t), t, eta).x();
    EXPECT_LE(max_abs_diff(lhs, rhs), 1e-10);
  }
}

TEST(RunEig, TopFrameStopsImmediately) {
  Target t = make_diagonal_target({3.0, 2.0, 1.0, 0.5}, 4, 2);
  for (auto m : {EigMethod::retraction_free, EigMethod::rgd}) {
    auto trace = run_eig(EigState(Matrix::Identity(4, 2)), t, SolverConfig{}, m);
    EXPECT_TRUE(trace.converged());
    EXPECT_EQ(trace.iterations, 0u);
    EXPECT_GE(trace.wall_seconds, 0.0);
  }
}

TEST(RunEig, BothMethodsConvergeAndAlign) {
  const std::size_t d = 60, r = 4;
  Target t = make_diagonal_target(experiment_spectrum(5.0, 2.0, r, d), d, r);
  auto o = best_rank_r(t);
  SolverConfig cfg;
  cfg.eta = 0.05;
  cfg.epsilon = 1e-6;
  cfg.max_iters = 10000;
  for (auto m : {EigMethod::retraction_free, EigMethod::rgd}) {
    auto trace = run_eig(EigState(gaussian_factor(d, r, 9)), t, cfg, m);
    ASSERT_TRUE(trace.converged()) << to_string(m);
    const Matrix& l = trace.final_state->l();
    EXPECT_LE(proj_error(*trace.final_state, o), cfg.epsilon);
    EXPECT_LE((o.projector * l - l).norm(), cfg.epsilon);
    EXPECT_EQ(trace.errors.size(), trace.iterations + 1);
  }
}

TEST(RunEig, BottomBlockContraction) {
  // H_{t+1} = H_t + eta Lambda_res H_t - eta H_t X_t^T X_t with X = Sigma^{1/2} L
  std::mt19937_64 rng(67);
  const std::size_t d = 8, r = 2;
  Target t = make_diagonal_target({4.0, 3.0, 1.5, 1.0, 0.8, 0.5, 0.2, 0.0}, d, r);
  const double eta = 0.05, gap = t.eigengap();
  const double floor = 0.5 * (t.cut_eigenvalue() + t.tail_eigenvalue());
  int checked = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    Matrix l = random_matrix(d, r, rng);
    l.topRows(r) *= 3.0;
    EigState s(l);
    Matrix x = lift_to_sym(s, t).x();
    auto sx = linalg::singular_values(x);
    if (sx.back() * sx.back() < floor || eta * sx.front() * sx.front() > 1.0) continue;
    ++checked;
    double h0 = linalg::singular_values(l.bottomRows(d - r)).front();
    double h1 = linalg::singular_values(rf_step(s, t, eta).l().bottomRows(d - r)).front();
    EXPECT_LE(h1, (1.0 - eta * gap / 2.0) * h0 + 1e-10);
  }
  EXPECT_GT(checked, 100);
}
