#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lowrank/linalg.hpp"

namespace lowrank {

/// A factor expressed against a rank-r frame B (orthonormal d x r):
/// `top` = B^T X and `perp_gram` = X_perp^T X_perp with X_perp = X - B B^T X.
/// The singular values of `perp_gram` are those of the off-subspace block,
/// independent of how the orthogonal complement is parameterised.
struct SubspaceSplit {
  Matrix top;
  Matrix perp_gram;
};

/// Splits `x` against `frame`; an empty frame stands for the first r
/// coordinate axes and takes the row-block fast path.
SubspaceSplit split_against(const Matrix& x, const std::optional<Matrix>& frame,
                            std::size_t rank);

/// Symmetric PSD target Sigma = B diag(lambda) B^T with a positive eigengap at
/// the rank cut. B is absent (identity) for diagonal targets.
class Target {
 public:
  /// Throws PreconditionError on non-descending or non-finite eigenvalues,
  /// rank outside [1, dim), a non-orthonormal basis, or a non-positive gap.
  Target(std::vector<double> eigenvalues, std::size_t rank,
         std::optional<Matrix> basis = std::nullopt);

  std::size_t dim() const noexcept { return eigenvalues_.size(); }
  std::size_t rank() const noexcept { return rank_; }
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }

  /// lambda_1^*
  double top_eigenvalue() const noexcept { return eigenvalues_.front(); }
  /// lambda_r^*
  double cut_eigenvalue() const noexcept { return eigenvalues_[rank_ - 1]; }
  /// lambda_{r+1}^*
  double tail_eigenvalue() const noexcept { return eigenvalues_[rank_]; }
  /// Delta = lambda_r^* - lambda_{r+1}^*
  double eigengap() const noexcept { return cut_eigenvalue() - tail_eigenvalue(); }

  bool is_diagonal() const noexcept { return !basis_.has_value(); }
  bool is_psd() const noexcept { return eigenvalues_.back() >= 0.0; }
  const std::optional<Matrix>& basis() const noexcept { return basis_; }

  /// The leading r eigenvectors, or nullopt for a diagonal target.
  const std::optional<Matrix>& top_frame() const noexcept { return top_frame_; }

  /// Lambda_r = diag(lambda_1^*, ..., lambda_r^*).
  Matrix leading_block() const;

  const Matrix& matrix() const noexcept { return dense_; }

  /// Sigma * m without forming Sigma for diagonal targets.
  Matrix apply(const Matrix& m) const;

  /// Sigma^{1/2} * m; requires a PSD target.
  Matrix apply_sqrt(const Matrix& m) const;

  SubspaceSplit split(const Matrix& x) const { return split_against(x, top_frame_, rank_); }

 private:
  std::vector<double> eigenvalues_;
  std::size_t rank_;
  std::optional<Matrix> basis_;
  std::optional<Matrix> top_frame_;
  Matrix dense_;
};

/// Ground truth for error measurement: Sigma_r, Pi_r and the gap. `frame`
/// holds the top-r eigenvectors (nullopt for axis-aligned targets) so that
/// errors can be evaluated without d x d products.
struct RankROracle {
  Matrix sigma_r_matrix;
  Matrix projector;
  double gap = 0.0;
  std::size_t rank = 0;
  std::vector<double> leading_values;
  std::optional<Matrix> frame;
};

Target make_diagonal_target(std::vector<double> values, std::size_t dim, std::size_t rank);

/// Diagonalises a symmetric matrix with sym_eig and wraps it as a Target.
Target make_target_from_matrix(const Matrix& sigma, std::size_t rank);

/// r values equally spaced from hi down to lo, then d - r ones.
std::vector<double> experiment_spectrum(double hi, double lo, std::size_t rank, std::size_t dim);

/// r copies of `value` followed by d - r ones.
std::vector<double> equal_top_spectrum(double value, std::size_t rank, std::size_t dim);

RankROracle best_rank_r(const Target& target);

/// ||Lambda_r - T T^T||_F^2 + 2 tr(G T^T T) + ||G||_F^2 for a split (T, G):
/// the squared Frobenius distance between diag(Lambda_r, 0) and X X^T in the
/// frame's coordinates. Free of the cancellation in ||A||^2 - 2<A,B> + ||B||^2.
double split_distance(const SubspaceSplit& split, const std::vector<double>& leading_values);

}  // namespace lowrank
