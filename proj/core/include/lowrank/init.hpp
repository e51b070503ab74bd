#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>

#include "lowrank/linalg.hpp"
#include "lowrank/spectrum.hpp"
#include "lowrank/sym_gd.hpp"

namespace lowrank {

/// small: alpha = multiplier * d^{-(1+kappa)/(1-kappa)};
/// moderate: alpha as given; explicit: use `matrix` verbatim.
enum class InitScheme { small, moderate, explicit_matrix };

struct InitPlan {
  InitScheme scheme = InitScheme::moderate;
  double alpha = 1.0;
  std::uint64_t seed = 1;
  double multiplier = 1.0;
  std::optional<Matrix> matrix;

  void validate() const;
};

/// Engine behind every Gaussian draw. Entries are filled column by column.
using Rng = std::mt19937_64;

/// d x r matrix with i.i.d. N(0, 1/d) entries, deterministic in (d, r, seed).
Matrix gaussian_factor(std::size_t d, std::size_t r, std::uint64_t seed);

/// rows x r matrix with i.i.d. N(0, 1/variance_dim) entries drawn from `rng`.
Matrix gaussian_factor(std::size_t rows, std::size_t r, std::size_t variance_dim, Rng& rng);

/// ln(1 + eta max{0, lambda_{r+1}}) / ln(1 + eta (lambda_r - Delta/2)).
double kappa(const Target& target, double eta);

/// multiplier * d^{-(1+kappa)/(1-kappa)}.
double small_alpha_bound(const Target& target, double eta, double multiplier = 1.0);

/// alpha for `plan` (bound for small, alpha for moderate, NaN for explicit).
double resolve_alpha(const InitPlan& plan, const Target& target, double eta);

/// X_0 = alpha N_0, or the explicit matrix.
FactorState initialize(const InitPlan& plan, const Target& target, double eta);

struct ClauseResult {
  bool holds = false;
  double margin = 0.0;  // positive when the clause holds with room to spare
};

struct Condition1Report {
  bool holds = false;
  /// sigma_1^2(X0) <= lambda_1; sigma_1^2(J0) <= lambda_r - Delta/2;
  /// 0 < sigma_r^2(U0) < Delta/4; sigma_1^2(J0) <= c1 sigma_r(U0)^{1+kappa}.
  std::array<ClauseResult, 4> clauses{};
  double kappa = 0.0;
  double c1 = 0.0;
};

Condition1Report check_condition_1(const FactorState& state0, const Target& target, double eta);

/// ceil((2/(eta Delta)) ln(Delta/(4 sigma_r^2(U0)))) while sigma_r^2(U0) < Delta/4, else 0.
std::size_t warmup_budget(const FactorState& state0, const Target& target, double eta);
/// Same formula from sigma_r^2(U0), Delta and eta directly.
std::size_t warmup_budget(double signal_sq, double gap, double eta);

}  // namespace lowrank
