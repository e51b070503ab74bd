#pragma once

#include <cstddef>

#include "lowrank/linalg.hpp"
#include "lowrank/spectrum.hpp"
#include "lowrank/sym_gd.hpp"
#include "lowrank/trace.hpp"

namespace lowrank {

/// The d x r frame L of an eigenspace iteration. Not necessarily orthonormal.
class EigState {
 public:
  explicit EigState(Matrix l);

  const Matrix& l() const noexcept { return l_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(l_.rows()); }
  std::size_t rank() const noexcept { return static_cast<std::size_t>(l_.cols()); }

 private:
  Matrix l_;
};

enum class EigMethod { retraction_free, rgd };

struct EigRecord {
  std::size_t iter = 0;
  double proj_error = 0.0;
};

using EigTrace = Trace<EigRecord, EigState>;

/// L + eta (I - L L^T) Sigma L.
EigState rf_step(const EigState& state, const Target& target, double eta);
EigState rf_step(const EigState& state, const Matrix& sigma, double eta);

/// L (L^T L)^{-1/2}. Throws NumericalError when L^T L is not positive definite.
Matrix retract(const Matrix& l_tilde);

/// Retract, then take the retraction-free step from the retracted frame.
EigState rgd_step(const EigState& state, const Target& target, double eta);
EigState rgd_step(const EigState& state, const Matrix& sigma, double eta);

/// ||Pi_r - L L^T||_F.
double proj_error(const EigState& state, const RankROracle& oracle);

/// X = Sigma^{1/2} L.
FactorState lift_to_sym(const EigState& state, const Target& target);

/// Iterates the chosen step until proj_error <= epsilon or the budget runs
/// out. `wall_seconds` covers the iteration loop only.
EigTrace run_eig(const EigState& state0, const Target& target, const SolverConfig& config,
                 EigMethod method);

const char* to_string(EigMethod method) noexcept;

}  // namespace lowrank
