#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace lowrank {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

namespace linalg {

/// Jacobi sweeps are capped; exceeding the cap raises NumericalError.
inline constexpr int kMaxSweeps = 100;
/// Off-diagonal convergence threshold, relative to the diagonal scale.
inline constexpr double kJacobiTolerance = 1e-14;
/// Symmetry tolerance for sym_eig, scaled by max(1, max|S_ij|).
inline constexpr double kSymmetryTolerance = 1e-12;
/// spd_inv_sqrt rejects inputs whose smallest eigenvalue is at or below this.
inline constexpr double kSpdFloor = 1e-12;

struct SymEig {
  std::vector<double> values;  // descending
  Matrix vectors;              // orthonormal columns, vectors.col(i) <-> values[i]
};

struct Svd {
  Matrix left;                 // rows x k, orthonormal columns
  std::vector<double> values;  // descending, k = min(rows, cols)
  Matrix right;                // cols x k, orthonormal columns
};

/// Throws PreconditionError when `m` is empty or holds a non-finite entry.
void require_valid(const Matrix& m, const char* what);

bool is_symmetric(const Matrix& s, double tol = kSymmetryTolerance);

/// True when every off-diagonal entry is exactly zero.
bool is_diagonal(const Matrix& m);

double frobenius_norm(const Matrix& m);

/// One-sided Jacobi. Returns min(rows, cols) values in descending order.
std::vector<double> singular_values(const Matrix& m);

/// Cyclic Jacobi on (S + S^T)/2. Throws PreconditionError if `s` is not
/// square or not symmetric within kSymmetryTolerance.
SymEig sym_eig(const Matrix& s);

/// Thin SVD via one-sided Jacobi; left/right are completed to orthonormal
/// columns when `m` is rank deficient.
Svd svd(const Matrix& m);

/// R = S^{-1/2} for symmetric positive definite S. Throws NumericalError when
/// the smallest eigenvalue is <= kSpdFloor.
Matrix spd_inv_sqrt(const Matrix& s);

/// Largest eigenvalue of a small symmetric PSD Gram matrix, i.e. sigma_1^2 of
/// the factor it was formed from. Clamped at zero.
double top_gram_eigenvalue(const Matrix& gram);

}  // namespace linalg
}  // namespace lowrank
