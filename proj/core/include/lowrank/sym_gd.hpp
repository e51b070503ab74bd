#pragma once

#include <cstddef>
#include <utility>

#include "lowrank/linalg.hpp"
#include "lowrank/spectrum.hpp"
#include "lowrank/trace.hpp"

namespace lowrank {

/// The d x r iterate X of the symmetric factorization Sigma ~ X X^T.
class FactorState {
 public:
  /// Throws PreconditionError on non-finite entries, ||X||_F >= the
  /// divergence guard, or rank != x.cols().
  explicit FactorState(Matrix x);

  const Matrix& x() const noexcept { return x_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(x_.rows()); }
  std::size_t rank() const noexcept { return static_cast<std::size_t>(x_.cols()); }

 private:
  Matrix x_;
};

struct Blocks {
  Matrix u;  // first r rows
  Matrix j;  // remaining d - r rows
};

/// One diagnostic row of a symmetric run.
struct TraceRecord {
  std::size_t iter = 0;
  double error = 0.0;      // ||Sigma_r - X X^T||_F
  double sigma1_x = 0.0;   // sigma_1(X)
  double sigma1_j = 0.0;   // sigma_1(J)
  double sigmar_u = 0.0;   // sigma_r(U)
  double ratio = 0.0;      // sigma_1^2(J) / sigma_r^2(U); +inf when sigma_r(U) vanishes
  double sigma1_p = 0.0;   // sigma_1(Lambda_r - U U^T)
  bool in_r = false;
  bool in_r2 = false;
};

using SymTrace = Trace<TraceRecord, FactorState>;

inline constexpr double kDefaultRegionSlack = 1e-8;
/// sigma_r(U) at or below this makes the noise-to-signal ratio infinite.
inline constexpr double kSignalFloor = 1e-300;

/// X + eta (Sigma - X X^T) X.
FactorState gd_step(const FactorState& state, const Target& target, double eta);
/// Same update against an explicit symmetric Sigma (may be indefinite).
FactorState gd_step(const FactorState& state, const Matrix& sigma, double eta);

/// Row blocks of X. Throws DimensionError unless d > r.
Blocks split_blocks(const FactorState& state);

/// Singular-value summary of X measured in the target's eigenbasis (U is the
/// component along the top-r eigenvectors, J the orthogonal remainder).
struct BlockSpectrum {
  double sigma1_x_sq = 0.0;
  double sigma1_j_sq = 0.0;
  double sigmar_u = 0.0;
  double sigma1_p = 0.0;
};

BlockSpectrum block_spectrum(const FactorState& state, const Target& target);

/// Membership in R: sigma_1^2(X) <= 2 lambda_1, sigma_1^2(J) <= lambda_r - Delta/2,
/// sigma_r^2(U) >= Delta/4, each with additive `slack`.
bool in_region_r(const FactorState& state, const Target& target, double slack = kDefaultRegionSlack);
/// R without the signal condition.
bool in_region_r2(const FactorState& state, const Target& target, double slack = kDefaultRegionSlack);
bool in_region_r(const BlockSpectrum& s, const Target& target, double slack);
bool in_region_r2(const BlockSpectrum& s, const Target& target, double slack);

/// Delta^2 / (36 lambda_1^3).
double max_step_size(const Target& target);

/// sigma_1^2(J) / sigma_r^2(U) in the raw row blocks; +inf when sigma_r(U) <= kSignalFloor.
double noise_signal_ratio(const FactorState& state);
/// Same ratio measured in the target's eigenbasis.
double noise_signal_ratio(const FactorState& state, const Target& target);

/// sigma_1(Lambda_r - U U^T).
double signal_residual(const FactorState& state, const Target& target);

/// ceil((6/(eta Delta)) ln(200 r lambda_1^2 / (eta Delta^2 epsilon))), floored at 0.
std::size_t local_iteration_budget(const Target& target, double eta, double epsilon);

/// ||Sigma_r - X X^T||_F.
double approximation_error(const FactorState& state, const Target& target);

TraceRecord diagnose(const FactorState& state, const Target& target, std::size_t iter,
                     double slack = kDefaultRegionSlack);

/// Iterates gd_step until the error drops to epsilon or the budget runs out.
/// Throws DivergedRun<SymTrace> when ||X_t||_F reaches the divergence guard.
SymTrace run(const FactorState& state0, const Target& target, const SolverConfig& config);

}  // namespace lowrank
