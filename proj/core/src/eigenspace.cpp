#include "lowrank/eigenspace.hpp"

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

#include "lowrank/errors.hpp"

namespace lowrank {
namespace {

Matrix rf_update(const Matrix& l, const Matrix& sigma_l, double eta) {
  // (I - L L^T) Sigma L = Sigma L - L (L^T Sigma L)
  const Matrix inner = l.transpose() * sigma_l;
  return l + eta * (sigma_l - l * inner);
}

void check_dims(const EigState& state, std::size_t d, const char* where) {
  if (state.dim() != d) {
    throw DimensionError(std::string(where) + ": frame has " + std::to_string(state.dim()) +
                         " rows, Sigma is " + std::to_string(d) + "x" + std::to_string(d));
  }
}

}  // namespace

EigState::EigState(Matrix l) : l_(std::move(l)) {
  linalg::require_valid(l_, "EigState");
  if (linalg::frobenius_norm(l_) >= kDivergenceGuard) {
    throw PreconditionError("EigState: ||L||_F exceeds the divergence guard");
  }
}

EigState rf_step(const EigState& state, const Target& target, double eta) {
  check_dims(state, target.dim(), "rf_step");
  if (!(eta > 0.0)) throw PreconditionError("rf_step: eta must be positive");
  return EigState(rf_update(state.l(), target.apply(state.l()), eta));
}

EigState rf_step(const EigState& state, const Matrix& sigma, double eta) {
  if (sigma.rows() != sigma.cols()) throw DimensionError("rf_step: Sigma must be square");
  check_dims(state, static_cast<std::size_t>(sigma.rows()), "rf_step");
  if (!(eta > 0.0)) throw PreconditionError("rf_step: eta must be positive");
  return EigState(rf_update(state.l(), sigma * state.l(), eta));
}

Matrix retract(const Matrix& l_tilde) {
  linalg::require_valid(l_tilde, "retract");
  const Matrix gram = l_tilde.transpose() * l_tilde;
  try {
    return l_tilde * linalg::spd_inv_sqrt(gram);
  } catch (const NumericalError&) {
    throw NumericalError("retract: frame is rank deficient");
  }
}

EigState rgd_step(const EigState& state, const Target& target, double eta) {
  return rf_step(EigState(retract(state.l())), target, eta);
}

EigState rgd_step(const EigState& state, const Matrix& sigma, double eta) {
  return rf_step(EigState(retract(state.l())), sigma, eta);
}

double proj_error(const EigState& state, const RankROracle& oracle) {
  if (state.rank() != oracle.rank ||
      state.l().rows() != oracle.projector.rows()) {
    throw DimensionError("proj_error: frame shape does not match the oracle");
  }
  const std::vector<double> ones(oracle.rank, 1.0);
  return std::sqrt(split_distance(split_against(state.l(), oracle.frame, oracle.rank), ones));
}

FactorState lift_to_sym(const EigState& state, const Target& target) {
  check_dims(state, target.dim(), "lift_to_sym");
  return FactorState(target.apply_sqrt(state.l()));
}

EigTrace run_eig(const EigState& state0, const Target& target, const SolverConfig& config,
                 EigMethod method) {
  config.validate();
  check_dims(state0, target.dim(), "run_eig");
  if (state0.rank() != target.rank()) throw DimensionError("run_eig: rank mismatch");
  const RankROracle oracle = best_rank_r(target);

  EigTrace trace;
  Matrix l = state0.l();
  const auto started = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };
  for (std::size_t t = 0;; ++t) {
    if (method == EigMethod::rgd) l = retract(l);
    EigState current(l);
    const double err = proj_error(current, oracle);
    trace.errors.push_back(err);
    const bool done = err <= config.epsilon;
    const bool last = t == config.max_iters;
    if (t == 0 || done || last || should_record(t, config.record_every)) {
      trace.records.push_back({t, err});
    }
    if (done || last) {
      trace.iterations = t;
      trace.status = done ? RunStatus::converged : RunStatus::budget_exhausted;
      trace.final_state = std::move(current);
      break;
    }
    l = rf_update(l, target.apply(l), config.eta);
    const double norm = l.norm();
    if (!std::isfinite(norm) || norm >= kDivergenceGuard) {
      trace.iterations = t + 1;
      trace.wall_seconds = elapsed();
      throw DivergedRun<EigTrace>("run_eig: ||L_t||_F exceeded the divergence guard at iteration " +
                                      std::to_string(t + 1),
                                  t + 1, std::move(trace));
    }
  }
  trace.wall_seconds = elapsed();
  return trace;
}

const char* to_string(EigMethod method) noexcept {
  return method == EigMethod::rgd ? "rgd" : "retraction_free";
}

}  // namespace lowrank
