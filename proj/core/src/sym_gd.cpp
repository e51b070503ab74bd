#include "lowrank/sym_gd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "lowrank/errors.hpp"

namespace lowrank {
namespace {

double smallest_singular_value(const Matrix& m) {
  return linalg::singular_values(m).back();
}

double spectral_radius_sym(const Matrix& s) {
  const auto eig = linalg::sym_eig(s);
  return std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
}

void check_target_dims(const FactorState& state, const Target& target, const char* where) {
  if (state.dim() != target.dim() || state.rank() != target.rank()) {
    throw DimensionError(std::string(where) + ": state is " + std::to_string(state.dim()) + "x" +
                         std::to_string(state.rank()) + " but target has d=" +
                         std::to_string(target.dim()) + ", r=" + std::to_string(target.rank()));
  }
}

double signal_residual_of(const Matrix& top, const Target& target) {
  Matrix p = -top * top.transpose();
  p.diagonal() += Eigen::Map<const Vector>(target.eigenvalues().data(),
                                           static_cast<Eigen::Index>(target.rank()));
  return spectral_radius_sym(0.5 * (p + p.transpose()));
}

}  // namespace

void SolverConfig::validate() const {
  if (!(eta > 0.0) || eta > 1.0) {
    throw PreconditionError("SolverConfig: eta must lie in (0, 1]");
  }
  if (!(epsilon > 0.0)) throw PreconditionError("SolverConfig: epsilon must be positive");
  if (max_iters < 1) throw PreconditionError("SolverConfig: max_iters must be at least 1");
  if (record_every < 1) throw PreconditionError("SolverConfig: record_every must be at least 1");
}

FactorState::FactorState(Matrix x) : x_(std::move(x)) {
  linalg::require_valid(x_, "FactorState");
  if (linalg::frobenius_norm(x_) >= kDivergenceGuard) {
    throw PreconditionError("FactorState: ||X||_F exceeds the divergence guard");
  }
}

FactorState gd_step(const FactorState& state, const Target& target, double eta) {
  check_target_dims(state, target, "gd_step");
  if (!(eta > 0.0)) throw PreconditionError("gd_step: eta must be positive");
  const Matrix& x = state.x();
  const Matrix gram = x.transpose() * x;
  return FactorState(x + eta * (target.apply(x) - x * gram));
}

FactorState gd_step(const FactorState& state, const Matrix& sigma, double eta) {
  if (sigma.rows() != sigma.cols() || sigma.rows() != state.x().rows()) {
    throw DimensionError("gd_step: Sigma must be d x d");
  }
  if (!(eta > 0.0)) throw PreconditionError("gd_step: eta must be positive");
  const Matrix& x = state.x();
  const Matrix gram = x.transpose() * x;
  return FactorState(x + eta * (sigma * x - x * gram));
}

Blocks split_blocks(const FactorState& state) {
  const auto d = state.x().rows();
  const auto r = state.x().cols();
  if (d <= r) throw DimensionError("split_blocks: requires d > r");
  return {state.x().topRows(r), state.x().bottomRows(d - r)};
}

BlockSpectrum block_spectrum(const FactorState& state, const Target& target) {
  check_target_dims(state, target, "block_spectrum");
  const SubspaceSplit split = target.split(state.x());
  BlockSpectrum out;
  out.sigma1_x_sq = linalg::top_gram_eigenvalue(state.x().transpose() * state.x());
  out.sigma1_j_sq = linalg::top_gram_eigenvalue(split.perp_gram);
  out.sigmar_u = smallest_singular_value(split.top);
  out.sigma1_p = signal_residual_of(split.top, target);
  return out;
}

bool in_region_r2(const BlockSpectrum& s, const Target& target, double slack) {
  const double gap = target.eigengap();
  return s.sigma1_x_sq <= 2.0 * target.top_eigenvalue() + slack &&
         s.sigma1_j_sq <= target.cut_eigenvalue() - gap / 2.0 + slack;
}

bool in_region_r(const BlockSpectrum& s, const Target& target, double slack) {
  return in_region_r2(s, target, slack) &&
         s.sigmar_u * s.sigmar_u >= target.eigengap() / 4.0 - slack;
}

bool in_region_r(const FactorState& state, const Target& target, double slack) {
  return in_region_r(block_spectrum(state, target), target, slack);
}

bool in_region_r2(const FactorState& state, const Target& target, double slack) {
  return in_region_r2(block_spectrum(state, target), target, slack);
}

double max_step_size(const Target& target) {
  const double gap = target.eigengap();
  const double top = target.top_eigenvalue();
  if (!(top > 0.0)) throw PreconditionError("max_step_size: lambda_1 must be positive");
  return gap * gap / (36.0 * top * top * top);
}

double noise_signal_ratio(const FactorState& state) {
  const Blocks b = split_blocks(state);
  const double sigmar_u = smallest_singular_value(b.u);
  const double noise = linalg::top_gram_eigenvalue(b.j.transpose() * b.j);
  if (sigmar_u <= kSignalFloor) return std::numeric_limits<double>::infinity();
  return noise / (sigmar_u * sigmar_u);
}

double noise_signal_ratio(const FactorState& state, const Target& target) {
  const BlockSpectrum s = block_spectrum(state, target);
  if (s.sigmar_u <= kSignalFloor) return std::numeric_limits<double>::infinity();
  return s.sigma1_j_sq / (s.sigmar_u * s.sigmar_u);
}

double signal_residual(const FactorState& state, const Target& target) {
  check_target_dims(state, target, "signal_residual");
  return signal_residual_of(target.split(state.x()).top, target);
}

std::size_t local_iteration_budget(const Target& target, double eta, double epsilon) {
  if (!(eta > 0.0) || !(epsilon > 0.0)) {
    throw PreconditionError("local_iteration_budget: eta and epsilon must be positive");
  }
  const double gap = target.eigengap();
  const double top = target.top_eigenvalue();
  const double r = static_cast<double>(target.rank());
  const double arg = 200.0 * r * top * top / (eta * gap * gap * epsilon);
  const double budget = (6.0 / (eta * gap)) * std::log(arg);
  if (!(budget > 0.0)) return 0;
  return static_cast<std::size_t>(std::ceil(budget));
}

double approximation_error(const FactorState& state, const Target& target) {
  check_target_dims(state, target, "approximation_error");
  const auto& values = target.eigenvalues();
  const std::vector<double> lead(values.begin(),
                                 values.begin() + static_cast<std::ptrdiff_t>(target.rank()));
  return std::sqrt(split_distance(target.split(state.x()), lead));
}

TraceRecord diagnose(const FactorState& state, const Target& target, std::size_t iter,
                     double slack) {
  const BlockSpectrum s = block_spectrum(state, target);
  TraceRecord rec;
  rec.iter = iter;
  rec.error = approximation_error(state, target);
  rec.sigma1_x = std::sqrt(s.sigma1_x_sq);
  rec.sigma1_j = std::sqrt(s.sigma1_j_sq);
  rec.sigmar_u = s.sigmar_u;
  rec.ratio = s.sigmar_u <= kSignalFloor ? std::numeric_limits<double>::infinity()
                                         : s.sigma1_j_sq / (s.sigmar_u * s.sigmar_u);
  rec.sigma1_p = s.sigma1_p;
  rec.in_r = in_region_r(s, target, slack);
  rec.in_r2 = in_region_r2(s, target, slack);
  return rec;
}

SymTrace run(const FactorState& state0, const Target& target, const SolverConfig& config) {
  config.validate();
  check_target_dims(state0, target, "run");
  if (!target.is_psd()) throw PreconditionError("run: symmetric solver requires a PSD target");

  SymTrace trace;
  trace.errors.reserve(std::min<std::size_t>(config.max_iters + 1, 1u << 20));
  const auto started = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };

  Matrix x = state0.x();
  for (std::size_t t = 0;; ++t) {
    FactorState current(x);
    const double err = approximation_error(current, target);
    trace.errors.push_back(err);
    const bool done = err <= config.epsilon;
    const bool last = t == config.max_iters;
    if (t == 0 || done || last || should_record(t, config.record_every)) {
      TraceRecord rec = diagnose(current, target, t);
      rec.error = err;
      trace.records.push_back(rec);
    }
    if (done || last) {
      trace.iterations = t;
      trace.status = done ? RunStatus::converged : RunStatus::budget_exhausted;
      trace.final_state = std::move(current);
      break;
    }
    const Matrix gram = x.transpose() * x;
    x += config.eta * (target.apply(x) - x * gram);
    const double norm = x.norm();
    if (!std::isfinite(norm) || norm >= kDivergenceGuard) {
      trace.iterations = t + 1;
      trace.wall_seconds = elapsed();
      throw DivergedRun<SymTrace>("run: ||X_t||_F exceeded the divergence guard at iteration " +
                                      std::to_string(t + 1),
                                  t + 1, std::move(trace));
    }
  }
  trace.wall_seconds = elapsed();
  return trace;
}

}  // namespace lowrank
