#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lowrank/linalg.hpp"
#include "lowrank/sym_gd.hpp"
#include "lowrank/trace.hpp"

namespace lowrank {

/// The factor pair (X, Y), X in R^{d1 x r}, Y in R^{d2 x r}.
class AsymState {
 public:
  AsymState(Matrix x, Matrix y);

  const Matrix& x() const noexcept { return x_; }
  const Matrix& y() const noexcept { return y_; }
  std::size_t rank() const noexcept { return static_cast<std::size_t>(x_.cols()); }

 private:
  Matrix x_;
  Matrix y_;
};

/// W = [(X+Y)/sqrt2 ; (X-Y)/sqrt2] and the 2d x 2d matrix it is driven by.
/// For symmetric Sigma, lifted_target = diag(2 Sigma, -2 Sigma); in general it
/// is the rotated dilation [[S+S^T, S^T-S], [S-S^T, -(S+S^T)]].
struct LiftedState {
  Matrix w;
  Matrix lifted_target;
};

/// A general d1 x d2 target with its rank-r truncation. Diagonal inputs skip
/// the Jacobi SVD.
class AsymTarget {
 public:
  AsymTarget(Matrix sigma, std::size_t rank);

  std::size_t rows() const noexcept { return static_cast<std::size_t>(sigma_.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(sigma_.cols()); }
  std::size_t rank() const noexcept { return rank_; }
  const Matrix& sigma() const noexcept { return sigma_; }
  /// All min(d1, d2) singular values, descending.
  const std::vector<double>& singular_values() const noexcept { return singular_values_; }
  /// sigma_r - sigma_{r+1} (sigma_{r+1} = 0 past the last singular value).
  double gap() const noexcept;
  const Matrix& sigma_r() const noexcept { return sigma_r_; }

  Matrix apply(const Matrix& y) const;            // Sigma y
  Matrix apply_transpose(const Matrix& x) const;  // Sigma^T x

  /// ||Sigma_r - X Y^T||_F evaluated on r x r blocks.
  double error(const Matrix& x, const Matrix& y) const;

 private:
  Matrix sigma_;
  std::size_t rank_;
  bool diagonal_ = false;
  std::vector<double> singular_values_;
  std::vector<double> leading_;
  std::optional<Matrix> left_frame_;
  std::optional<Matrix> right_frame_;
  Matrix sigma_r_;
};

struct AsymRecord {
  std::size_t iter = 0;
  double error = 0.0;
  double balance = 0.0;
};

using AsymTrace = Trace<AsymRecord, AsymState>;

/// Regularized: X' = X + eta (S - X Y^T) Y - (eta/2) X (X^T X - Y^T Y),
///              Y' = Y + eta (S - X Y^T)^T X + (eta/2) Y (X^T X - Y^T Y).
/// Unregularized drops the (eta/2) terms.
AsymState asym_step(const AsymState& state, const Matrix& sigma, double eta, bool regularized);
AsymState asym_step(const AsymState& state, const AsymTarget& target, double eta, bool regularized);

/// Lifts (X, Y) against Sigma. Rectangular inputs are padded with zero rows
/// (and Sigma with zero rows/columns) to d = max(d1, d2).
LiftedState lift(const AsymState& state, const Matrix& sigma);

/// ||X^T X - Y^T Y||_F.
double balance_gap(const AsymState& state);

double asym_error(const AsymState& state, const AsymTarget& target);
double asym_error(const AsymState& state, const Matrix& sigma, std::size_t rank);

/// Iterates asym_step until the error (and, when regularized, the balance
/// gap) falls to epsilon. Throws DivergedRun<AsymTrace> past the guard.
AsymTrace run_asym(const AsymState& state0, const AsymTarget& target, const SolverConfig& config,
                   bool regularized);

}  // namespace lowrank
