#include "lowrank/spectrum.hpp"

#include <cmath>
#include <string>

#include "lowrank/errors.hpp"

namespace lowrank {
namespace {

constexpr double kOrthonormalTolerance = 1e-10;

Vector as_vector(const std::vector<double>& values) {
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

SubspaceSplit split_against(const Matrix& x, const std::optional<Matrix>& frame,
                            std::size_t rank) {
  const auto r = static_cast<Eigen::Index>(rank);
  if (r < 1 || r >= x.rows()) {
    throw DimensionError("split_against: rank must lie in [1, rows)");
  }
  if (!frame) {
    const auto tail = x.bottomRows(x.rows() - r);
    return {x.topRows(r), tail.transpose() * tail};
  }
  if (frame->rows() != x.rows() || frame->cols() != r) {
    throw DimensionError("split_against: frame shape does not match factor");
  }
  Matrix top = frame->transpose() * x;
  const Matrix perp = x - (*frame) * top;
  return {std::move(top), perp.transpose() * perp};
}

double split_distance(const SubspaceSplit& split, const std::vector<double>& leading_values) {
  Matrix head = -split.top * split.top.transpose();
  head.diagonal() += as_vector(leading_values);
  const Matrix top_gram = split.top.transpose() * split.top;
  const double cross = (split.perp_gram.cwiseProduct(top_gram)).sum();
  return head.squaredNorm() + 2.0 * std::max(0.0, cross) + split.perp_gram.squaredNorm();
}

Target::Target(std::vector<double> eigenvalues, std::size_t rank, std::optional<Matrix> basis)
    : eigenvalues_(std::move(eigenvalues)), rank_(rank), basis_(std::move(basis)) {
  const std::size_t d = eigenvalues_.size();
  if (d < 2) throw PreconditionError("Target: dimension must be at least 2");
  if (rank_ < 1 || rank_ >= d) {
    throw PreconditionError("Target: rank must satisfy 1 <= r < d");
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(eigenvalues_[i])) {
      throw PreconditionError("Target: eigenvalues must be finite");
    }
    if (i > 0 && eigenvalues_[i] > eigenvalues_[i - 1]) {
      throw PreconditionError("Target: eigenvalues must be in descending order");
    }
  }
  if (!(eigengap() > 0.0)) {
    throw PreconditionError("Target: eigengap lambda_r - lambda_{r+1} must be positive (got " +
                            std::to_string(eigengap()) + ")");
  }
  const auto n = static_cast<Eigen::Index>(d);
  if (basis_) {
    linalg::require_valid(*basis_, "Target basis");
    if (basis_->rows() != n || basis_->cols() != n) {
      throw DimensionError("Target: basis must be d x d");
    }
    const double drift = (basis_->transpose() * (*basis_) - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (drift > kOrthonormalTolerance) {
      throw PreconditionError("Target: basis is not orthonormal");
    }
    top_frame_ = basis_->leftCols(static_cast<Eigen::Index>(rank_));
    dense_ = (*basis_) * as_vector(eigenvalues_).asDiagonal() * basis_->transpose();
    dense_ = 0.5 * (dense_ + dense_.transpose());
  } else {
    dense_ = as_vector(eigenvalues_).asDiagonal();
  }
}

Matrix Target::leading_block() const {
  return as_vector(eigenvalues_).head(static_cast<Eigen::Index>(rank_)).asDiagonal();
}

Matrix Target::apply(const Matrix& m) const {
  if (m.rows() != static_cast<Eigen::Index>(dim())) {
    throw DimensionError("Target::apply: row count does not match dimension");
  }
  if (!basis_) return as_vector(eigenvalues_).asDiagonal() * m;
  return dense_ * m;
}

Matrix Target::apply_sqrt(const Matrix& m) const {
  if (!is_psd()) throw PreconditionError("Target::apply_sqrt: target is not PSD");
  if (m.rows() != static_cast<Eigen::Index>(dim())) {
    throw DimensionError("Target::apply_sqrt: row count does not match dimension");
  }
  const Vector roots = as_vector(eigenvalues_).cwiseSqrt();
  if (!basis_) return roots.asDiagonal() * m;
  return (*basis_) * (roots.asDiagonal() * (basis_->transpose() * m));
}

Target make_diagonal_target(std::vector<double> values, std::size_t dim, std::size_t rank) {
  if (values.size() != dim) {
    throw PreconditionError("make_diagonal_target: expected " + std::to_string(dim) +
                            " values, got " + std::to_string(values.size()));
  }
  return Target(std::move(values), rank);
}

Target make_target_from_matrix(const Matrix& sigma, std::size_t rank) {
  linalg::SymEig eig = linalg::sym_eig(sigma);
  return Target(std::move(eig.values), rank, std::move(eig.vectors));
}

std::vector<double> experiment_spectrum(double hi, double lo, std::size_t rank, std::size_t dim) {
  if (rank < 2) throw PreconditionError("experiment_spectrum: rank must be at least 2");
  if (rank >= dim) throw PreconditionError("experiment_spectrum: rank must be below dim");
  if (!(lo > 1.0)) {
    throw PreconditionError("experiment_spectrum: lo must exceed the unit tail eigenvalue");
  }
  if (!(hi > lo)) throw PreconditionError("experiment_spectrum: hi must exceed lo");
  std::vector<double> values(dim, 1.0);
  const double step = (hi - lo) / static_cast<double>(rank - 1);
  for (std::size_t i = 0; i < rank; ++i) values[i] = hi - step * static_cast<double>(i);
  values[rank - 1] = lo;
  return values;
}

std::vector<double> equal_top_spectrum(double value, std::size_t rank, std::size_t dim) {
  if (rank < 1 || rank >= dim) throw PreconditionError("equal_top_spectrum: need 1 <= r < d");
  if (!(value > 1.0)) {
    throw PreconditionError("equal_top_spectrum: value must exceed the unit tail eigenvalue");
  }
  std::vector<double> values(dim, 1.0);
  for (std::size_t i = 0; i < rank; ++i) values[i] = value;
  return values;
}

RankROracle best_rank_r(const Target& target) {
  const auto d = static_cast<Eigen::Index>(target.dim());
  const auto r = static_cast<Eigen::Index>(target.rank());
  RankROracle oracle;
  oracle.gap = target.eigengap();
  oracle.rank = target.rank();
  oracle.leading_values.assign(target.eigenvalues().begin(),
                               target.eigenvalues().begin() + r);
  oracle.frame = target.top_frame();
  const Vector lead = as_vector(oracle.leading_values);
  if (!oracle.frame) {
    oracle.sigma_r_matrix = Matrix::Zero(d, d);
    oracle.sigma_r_matrix.diagonal().head(r) = lead;
    oracle.projector = Matrix::Zero(d, d);
    oracle.projector.diagonal().head(r).setOnes();
  } else {
    const Matrix& b = *oracle.frame;
    oracle.sigma_r_matrix = b * lead.asDiagonal() * b.transpose();
    oracle.sigma_r_matrix = 0.5 * (oracle.sigma_r_matrix + oracle.sigma_r_matrix.transpose());
    oracle.projector = b * b.transpose();
    oracle.projector = 0.5 * (oracle.projector + oracle.projector.transpose());
  }
  return oracle;
}

}  // namespace lowrank
