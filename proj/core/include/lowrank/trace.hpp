#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace lowrank {

/// Step size, stopping tolerance and recording cadence shared by all solvers.
struct SolverConfig {
  double eta = 0.05;
  double epsilon = 1e-6;
  std::size_t max_iters = 20000;
  std::size_t record_every = 1;

  /// Throws PreconditionError unless 0 < eta <= 1, epsilon > 0,
  /// max_iters >= 1 and record_every >= 1.
  void validate() const;
};

enum class RunStatus { converged, budget_exhausted };

/// Per-run history. `errors[t]` is the stopping error at iteration t for every
/// t in [0, iterations]; `records` is the sparser diagnostic trail (every
/// `record_every` iterations plus the first and the last).
template <typename Record, typename State>
struct Trace {
  std::vector<Record> records;
  std::vector<double> errors;
  std::size_t iterations = 0;
  RunStatus status = RunStatus::budget_exhausted;
  double wall_seconds = 0.0;
  std::optional<State> final_state;

  bool converged() const noexcept { return status == RunStatus::converged; }

  /// First t with errors[t] <= tol, if any.
  std::optional<std::size_t> first_below(double tol) const {
    for (std::size_t t = 0; t < errors.size(); ++t) {
      if (errors[t] <= tol) return t;
    }
    return std::nullopt;
  }
};

/// Divergence guard on ||X||_F shared by every solver loop.
inline constexpr double kDivergenceGuard = 1e12;

inline bool should_record(std::size_t iter, std::size_t every) noexcept {
  return iter % every == 0;
}

}  // namespace lowrank
