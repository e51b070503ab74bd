#include "lowrank/asym_gd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "lowrank/errors.hpp"
#include "lowrank/spectrum.hpp"

namespace lowrank {
namespace {

void check_pair(const AsymState& state, Eigen::Index d1, Eigen::Index d2, const char* where) {
  if (state.x().rows() != d1 || state.y().rows() != d2) {
    throw DimensionError(std::string(where) + ": factor rows do not match Sigma");
  }
}

Matrix pad_rows(const Matrix& m, Eigen::Index rows) {
  Matrix out = Matrix::Zero(rows, m.cols());
  out.topRows(m.rows()) = m;
  return out;
}

}  // namespace

AsymState::AsymState(Matrix x, Matrix y) : x_(std::move(x)), y_(std::move(y)) {
  linalg::require_valid(x_, "AsymState X");
  linalg::require_valid(y_, "AsymState Y");
  if (x_.cols() != y_.cols()) throw DimensionError("AsymState: X and Y must share r columns");
  if (std::hypot(linalg::frobenius_norm(x_), linalg::frobenius_norm(y_)) >= kDivergenceGuard) {
    throw PreconditionError("AsymState: factor norm exceeds the divergence guard");
  }
}

AsymTarget::AsymTarget(Matrix sigma, std::size_t rank) : sigma_(std::move(sigma)), rank_(rank) {
  linalg::require_valid(sigma_, "AsymTarget");
  const auto d1 = sigma_.rows();
  const auto d2 = sigma_.cols();
  const auto k = std::min(d1, d2);
  const auto r = static_cast<Eigen::Index>(rank_);
  if (r < 1 || r > k) throw PreconditionError("AsymTarget: rank must lie in [1, min(d1, d2)]");

  diagonal_ = linalg::is_diagonal(sigma_);
  if (diagonal_) {
    std::vector<double> mags(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) mags[static_cast<std::size_t>(i)] = std::abs(sigma_(i, i));
    std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return mags[static_cast<std::size_t>(a)] > mags[static_cast<std::size_t>(b)];
    });
    singular_values_.resize(static_cast<std::size_t>(k));
    bool aligned = true;
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto j = order[static_cast<std::size_t>(i)];
      singular_values_[static_cast<std::size_t>(i)] = mags[static_cast<std::size_t>(j)];
      if (i < r && (j != i || sigma_(j, j) < 0.0)) aligned = false;
    }
    if (!aligned) {
      left_frame_ = Matrix::Zero(d1, r);
      right_frame_ = Matrix::Zero(d2, r);
      for (Eigen::Index i = 0; i < r; ++i) {
        const auto j = order[static_cast<std::size_t>(i)];
        (*left_frame_)(j, i) = sigma_(j, j) < 0.0 ? -1.0 : 1.0;
        (*right_frame_)(j, i) = 1.0;
      }
    }
  } else {
    linalg::Svd s = linalg::svd(sigma_);
    singular_values_ = s.values;
    left_frame_ = s.left.leftCols(r);
    right_frame_ = s.right.leftCols(r);
  }
  leading_.assign(singular_values_.begin(), singular_values_.begin() + r);

  const Vector lead = Eigen::Map<const Vector>(leading_.data(), r);
  if (left_frame_) {
    sigma_r_ = (*left_frame_) * lead.asDiagonal() * right_frame_->transpose();
  } else {
    sigma_r_ = Matrix::Zero(d1, d2);
    sigma_r_.diagonal().head(r) = lead;
  }
}

double AsymTarget::gap() const noexcept {
  const double next = rank_ < singular_values_.size() ? singular_values_[rank_] : 0.0;
  return singular_values_[rank_ - 1] - next;
}

Matrix AsymTarget::apply(const Matrix& y) const {
  if (!diagonal_) return sigma_ * y;
  const auto k = std::min(sigma_.rows(), sigma_.cols());
  Matrix out = Matrix::Zero(sigma_.rows(), y.cols());
  out.topRows(k) = sigma_.diagonal().asDiagonal() * y.topRows(k);
  return out;
}

Matrix AsymTarget::apply_transpose(const Matrix& x) const {
  if (!diagonal_) return sigma_.transpose() * x;
  const auto k = std::min(sigma_.rows(), sigma_.cols());
  Matrix out = Matrix::Zero(sigma_.cols(), x.cols());
  out.topRows(k) = sigma_.diagonal().asDiagonal() * x.topRows(k);
  return out;
}

double AsymTarget::error(const Matrix& x, const Matrix& y) const {
  if (x.rows() != sigma_.rows() || y.rows() != sigma_.cols() || x.cols() != y.cols()) {
    throw DimensionError("AsymTarget::error: factor shapes do not match Sigma");
  }
  if (x.cols() != static_cast<Eigen::Index>(rank_)) {
    throw DimensionError("AsymTarget::error: factor rank does not match target rank");
  }
  const auto r = static_cast<Eigen::Index>(rank_);
  // Blocks of X Y^T in the (left, right) singular bases; rank == min(d1, d2)
  // leaves an empty complement on the short side.
  const auto split = [r](const Matrix& m, const std::optional<Matrix>& frame) -> SubspaceSplit {
    if (m.rows() == r) {
      Matrix top = frame ? Matrix(frame->transpose() * m) : m;
      return {std::move(top), Matrix::Zero(r, r)};
    }
    return split_against(m, frame, static_cast<std::size_t>(r));
  };
  const SubspaceSplit sx = split(x, left_frame_);
  const SubspaceSplit sy = split(y, right_frame_);

  Matrix head = -sx.top * sy.top.transpose();
  head.diagonal() += Eigen::Map<const Vector>(leading_.data(), r);
  const Matrix ax = sx.top.transpose() * sx.top;
  const Matrix by = sy.top.transpose() * sy.top;
  const double total = head.squaredNorm() + std::max(0.0, sy.perp_gram.cwiseProduct(ax).sum()) +
                       std::max(0.0, sx.perp_gram.cwiseProduct(by).sum()) +
                       std::max(0.0, sx.perp_gram.cwiseProduct(sy.perp_gram).sum());
  return std::sqrt(total);
}

AsymState asym_step(const AsymState& state, const Matrix& sigma, double eta, bool regularized) {
  check_pair(state, sigma.rows(), sigma.cols(), "asym_step");
  if (!(eta > 0.0)) throw PreconditionError("asym_step: eta must be positive");
  const Matrix& x = state.x();
  const Matrix& y = state.y();
  const Matrix residual = sigma - x * y.transpose();
  Matrix nx = x + eta * residual * y;
  Matrix ny = y + eta * residual.transpose() * x;
  if (regularized) {
    const Matrix imbalance = x.transpose() * x - y.transpose() * y;
    nx -= 0.5 * eta * x * imbalance;
    ny += 0.5 * eta * y * imbalance;
  }
  return AsymState(std::move(nx), std::move(ny));
}

AsymState asym_step(const AsymState& state, const AsymTarget& target, double eta,
                    bool regularized) {
  check_pair(state, target.sigma().rows(), target.sigma().cols(), "asym_step");
  if (!(eta > 0.0)) throw PreconditionError("asym_step: eta must be positive");
  const Matrix& x = state.x();
  const Matrix& y = state.y();
  // (S - X Y^T) Y = S Y - X (Y^T Y); (S - X Y^T)^T X = S^T X - Y (X^T X).
  const Matrix gx = x.transpose() * x;
  const Matrix gy = y.transpose() * y;
  Matrix nx = x + eta * (target.apply(y) - x * gy);
  Matrix ny = y + eta * (target.apply_transpose(x) - y * gx);
  if (regularized) {
    const Matrix imbalance = gx - gy;
    nx -= 0.5 * eta * x * imbalance;
    ny += 0.5 * eta * y * imbalance;
  }
  return AsymState(std::move(nx), std::move(ny));
}

LiftedState lift(const AsymState& state, const Matrix& sigma) {
  check_pair(state, sigma.rows(), sigma.cols(), "lift");
  const Eigen::Index d = std::max(sigma.rows(), sigma.cols());
  Matrix s = Matrix::Zero(d, d);
  s.topLeftCorner(sigma.rows(), sigma.cols()) = sigma;
  const Matrix x = pad_rows(state.x(), d);
  const Matrix y = pad_rows(state.y(), d);

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  LiftedState out;
  out.w.resize(2 * d, x.cols());
  out.w.topRows(d) = inv_sqrt2 * (x + y);
  out.w.bottomRows(d) = inv_sqrt2 * (x - y);

  const Matrix sym = s + s.transpose();
  const Matrix skew = s.transpose() - s;
  out.lifted_target.resize(2 * d, 2 * d);
  out.lifted_target.topLeftCorner(d, d) = sym;
  out.lifted_target.topRightCorner(d, d) = skew;
  out.lifted_target.bottomLeftCorner(d, d) = -skew;
  out.lifted_target.bottomRightCorner(d, d) = -sym;
  return out;
}

double balance_gap(const AsymState& state) {
  return linalg::frobenius_norm(state.x().transpose() * state.x() -
                                state.y().transpose() * state.y());
}

double asym_error(const AsymState& state, const AsymTarget& target) {
  return target.error(state.x(), state.y());
}

double asym_error(const AsymState& state, const Matrix& sigma, std::size_t rank) {
  return AsymTarget(sigma, rank).error(state.x(), state.y());
}

AsymTrace run_asym(const AsymState& state0, const AsymTarget& target, const SolverConfig& config,
                   bool regularized) {
  config.validate();
  check_pair(state0, target.sigma().rows(), target.sigma().cols(), "run_asym");
  if (state0.rank() != target.rank()) throw DimensionError("run_asym: rank mismatch");

  AsymTrace trace;
  const auto started = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  AsymState current = state0;
  for (std::size_t t = 0;; ++t) {
    const double err = target.error(current.x(), current.y());
    const double bal = balance_gap(current);
    trace.errors.push_back(err);
    const bool done = err <= config.epsilon && (!regularized || bal <= config.epsilon);
    const bool last = t == config.max_iters;
    if (t == 0 || done || last || should_record(t, config.record_every)) {
      trace.records.push_back({t, err, bal});
    }
    if (done || last) {
      trace.iterations = t;
      trace.status = done ? RunStatus::converged : RunStatus::budget_exhausted;
      trace.final_state = current;
      break;
    }
    const Matrix& x = current.x();
    const Matrix& y = current.y();
    const Matrix gx = x.transpose() * x;
    const Matrix gy = y.transpose() * y;
    Matrix nx = x + config.eta * (target.apply(y) - x * gy);
    Matrix ny = y + config.eta * (target.apply_transpose(x) - y * gx);
    if (regularized) {
      const Matrix imbalance = gx - gy;
      nx -= 0.5 * config.eta * x * imbalance;
      ny += 0.5 * config.eta * y * imbalance;
    }
    const double norm = std::hypot(nx.norm(), ny.norm());
    if (!std::isfinite(norm) || norm >= kDivergenceGuard) {
      trace.iterations = t + 1;
      trace.wall_seconds = elapsed();
      throw DivergedRun<AsymTrace>(
          "run_asym: factor norm exceeded the divergence guard at iteration " + std::to_string(t + 1),
          t + 1, std::move(trace));
    }
    current = AsymState(std::move(nx), std::move(ny));
  }
  trace.wall_seconds = elapsed();
  return trace;
}

}  // namespace lowrank
