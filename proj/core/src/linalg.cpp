#include "lowrank/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lowrank/errors.hpp"

namespace lowrank::linalg {
namespace {

struct JacobiColumns {
  Matrix a;  // rotated copy of the input; column norms are the singular values
  Matrix v;  // accumulated right rotations
};

// One-sided (Hestenes) Jacobi on a tall matrix (rows >= cols). Rotates column
// pairs until every pair is orthogonal to kJacobiTolerance.
JacobiColumns one_sided_jacobi(Matrix a, bool accumulate) {
  const Eigen::Index n = a.cols();
  Matrix v = accumulate ? Matrix::Identity(n, n) : Matrix();

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = a.col(p).squaredNorm();
        const double beta = a.col(q).squaredNorm();
        const double gamma = a.col(p).dot(a.col(q));
        if (gamma == 0.0 ||
            std::abs(gamma) <= kJacobiTolerance * std::sqrt(alpha * beta)) {
          continue;
        }
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
          const double ap = a(i, p);
          const double aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        if (accumulate) {
          for (Eigen::Index i = 0; i < n; ++i) {
            const double vp = v(i, p);
            const double vq = v(i, q);
            v(i, p) = c * vp - s * vq;
            v(i, q) = s * vp + c * vq;
          }
        }
      }
    }
    if (!rotated) return {std::move(a), std::move(v)};
  }
  throw NumericalError("one-sided Jacobi did not converge within " +
                       std::to_string(kMaxSweeps) + " sweeps");
}

std::vector<Eigen::Index> descending_order(const std::vector<double>& values) {
  std::vector<Eigen::Index> order(values.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(j)];
  });
  return order;
}

// Fill columns flagged in `missing` with unit vectors orthogonal to the rest.
void complete_orthonormal(Matrix& q, const std::vector<bool>& missing) {
  const Eigen::Index m = q.rows();
  Eigen::Index candidate = 0;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (!missing[static_cast<std::size_t>(j)]) continue;
    for (; candidate < m; ++candidate) {
      Vector e = Vector::Unit(m, candidate);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index k = 0; k < q.cols(); ++k) {
          if (k == j || (missing[static_cast<std::size_t>(k)] && k > j)) continue;
          e -= q.col(k).dot(e) * q.col(k);
        }
      }
      const double norm = e.norm();
      if (norm > 0.5) {
        q.col(j) = e / norm;
        ++candidate;
        break;
      }
    }
  }
}

Svd tall_svd(const Matrix& m) {
  auto [a, v] = one_sided_jacobi(m, true);
  const Eigen::Index n = a.cols();
  std::vector<double> norms(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) norms[static_cast<std::size_t>(j)] = a.col(j).norm();
  const auto order = descending_order(norms);

  const double scale = norms.empty() ? 0.0 : norms[static_cast<std::size_t>(order.front())];
  Svd out{Matrix::Zero(m.rows(), n), std::vector<double>(static_cast<std::size_t>(n)),
          Matrix::Zero(n, n)};
  std::vector<bool> missing(static_cast<std::size_t>(n), false);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index j = order[static_cast<std::size_t>(k)];
    const double sigma = norms[static_cast<std::size_t>(j)];
    out.values[static_cast<std::size_t>(k)] = sigma;
    out.right.col(k) = v.col(j);
    if (sigma > 0.0 && sigma > 1e-300 + 1e-15 * scale) {
      out.left.col(k) = a.col(j) / sigma;
    } else {
      missing[static_cast<std::size_t>(k)] = true;
    }
  }
  complete_orthonormal(out.left, missing);
  return out;
}

}  // namespace

void require_valid(const Matrix& m, const char* what) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw PreconditionError(std::string(what) + ": matrix must be non-empty");
  }
  if (!m.allFinite()) {
    throw PreconditionError(std::string(what) + ": matrix has non-finite entries");
  }
}

bool is_symmetric(const Matrix& s, double tol) {
  if (s.rows() != s.cols()) return false;
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  return (s - s.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

bool is_diagonal(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (i != j && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

double frobenius_norm(const Matrix& m) {
  // Scaled accumulation; Eigen's stableNorm avoids overflow for large entries.
  return m.size() == 0 ? 0.0 : m.reshaped().stableNorm();
}

std::vector<double> singular_values(const Matrix& m) {
  require_valid(m, "singular_values");
  const Matrix tall = m.rows() >= m.cols() ? m : Matrix(m.transpose());
  const auto jac = one_sided_jacobi(tall, false);
  std::vector<double> values(static_cast<std::size_t>(tall.cols()));
  for (Eigen::Index j = 0; j < tall.cols(); ++j) {
    values[static_cast<std::size_t>(j)] = jac.a.col(j).norm();
  }
  std::sort(values.begin(), values.end(), std::greater<>());
  return values;
}

SymEig sym_eig(const Matrix& s) {
  require_valid(s, "sym_eig");
  if (s.rows() != s.cols()) {
    throw PreconditionError("sym_eig: matrix must be square");
  }
  if (!is_symmetric(s)) {
    throw PreconditionError("sym_eig: matrix is not symmetric");
  }
  const Eigen::Index n = s.rows();
  Matrix a = 0.5 * (s + s.transpose());
  Matrix v = Matrix::Identity(n, n);

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    double off = 0.0;
    for (Eigen::Index q = 1; q < n; ++q) {
      for (Eigen::Index p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    }
    const double diag = a.diagonal().squaredNorm();
    if (off == 0.0 || std::sqrt(off) <= kJacobiTolerance * std::sqrt(diag)) {
      converged = true;
      break;
    }
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    throw NumericalError("sym_eig: Jacobi did not converge within " +
                         std::to_string(kMaxSweeps) + " sweeps");
  }

  std::vector<double> diag(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) diag[static_cast<std::size_t>(i)] = a(i, i);
  const auto order = descending_order(diag);
  SymEig out{std::vector<double>(static_cast<std::size_t>(n)), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index j = order[static_cast<std::size_t>(k)];
    out.values[static_cast<std::size_t>(k)] = diag[static_cast<std::size_t>(j)];
    out.vectors.col(k) = v.col(j);
  }
  return out;
}

Svd svd(const Matrix& m) {
  require_valid(m, "svd");
  if (m.rows() >= m.cols()) return tall_svd(m);
  Svd t = tall_svd(m.transpose());
  return {std::move(t.right), std::move(t.values), std::move(t.left)};
}

Matrix spd_inv_sqrt(const Matrix& s) {
  const SymEig eig = sym_eig(s);
  const double smallest = eig.values.back();
  if (!(smallest > kSpdFloor)) {
    throw NumericalError("spd_inv_sqrt: matrix is not positive definite (smallest eigenvalue " +
                         std::to_string(smallest) + ")");
  }
  Vector scale(static_cast<Eigen::Index>(eig.values.size()));
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    scale(static_cast<Eigen::Index>(i)) = 1.0 / std::sqrt(eig.values[i]);
  }
  Matrix r = eig.vectors * scale.asDiagonal() * eig.vectors.transpose();
  return 0.5 * (r + r.transpose());
}

double top_gram_eigenvalue(const Matrix& gram) {
  if (gram.size() == 0) return 0.0;
  if (gram.rows() == 1) return std::max(0.0, gram(0, 0));
  return std::max(0.0, sym_eig(gram).values.front());
}

}  // namespace lowrank::linalg
