#include "lowrank/init.hpp"

#include <cmath>
#include <limits>

#include "lowrank/errors.hpp"

namespace lowrank {

void InitPlan::validate() const {
  if (scheme == InitScheme::explicit_matrix) {
    if (!matrix) throw PreconditionError("InitPlan: explicit scheme requires a matrix");
    linalg::require_valid(*matrix, "InitPlan matrix");
    return;
  }
  if (scheme == InitScheme::moderate && !(alpha > 0.0)) {
    throw PreconditionError("InitPlan: alpha must be positive");
  }
  if (!(multiplier > 0.0)) throw PreconditionError("InitPlan: multiplier must be positive");
}

Matrix gaussian_factor(std::size_t rows, std::size_t r, std::size_t variance_dim, Rng& rng) {
  if (rows < 1 || r < 1 || variance_dim < 1) {
    throw PreconditionError("gaussian_factor: dimensions must be positive");
  }
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(variance_dim)));
  Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(r));
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, j) = normal(rng);
  }
  return out;
}

Matrix gaussian_factor(std::size_t d, std::size_t r, std::uint64_t seed) {
  Rng rng(seed);
  return gaussian_factor(d, r, d, rng);
}

double kappa(const Target& target, double eta) {
  if (!(eta > 0.0)) throw PreconditionError("kappa: eta must be positive");
  const double lower = target.cut_eigenvalue() - target.eigengap() / 2.0;
  if (!(lower > 0.0)) {
    throw PreconditionError("kappa: lambda_r - Delta/2 must be positive");
  }
  const double num = std::log1p(eta * std::max(0.0, target.tail_eigenvalue()));
  const double den = std::log1p(eta * lower);
  return num / den;
}

double small_alpha_bound(const Target& target, double eta, double multiplier) {
  const double k = kappa(target, eta);
  if (!(k < 1.0)) throw PreconditionError("small_alpha_bound: kappa must be below 1");
  const double d = static_cast<double>(target.dim());
  return multiplier * std::pow(d, -(1.0 + k) / (1.0 - k));
}

double resolve_alpha(const InitPlan& plan, const Target& target, double eta) {
  switch (plan.scheme) {
    case InitScheme::small:
      return small_alpha_bound(target, eta, plan.multiplier);
    case InitScheme::moderate:
      return plan.alpha;
    case InitScheme::explicit_matrix:
      break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

FactorState initialize(const InitPlan& plan, const Target& target, double eta) {
  plan.validate();
  if (plan.scheme == InitScheme::explicit_matrix) {
    if (plan.matrix->rows() != static_cast<Eigen::Index>(target.dim()) ||
        plan.matrix->cols() != static_cast<Eigen::Index>(target.rank())) {
      throw DimensionError("initialize: explicit matrix must be d x r");
    }
    return FactorState(*plan.matrix);
  }
  const double alpha = resolve_alpha(plan, target, eta);
  return FactorState(alpha * gaussian_factor(target.dim(), target.rank(), plan.seed));
}

Condition1Report check_condition_1(const FactorState& state0, const Target& target, double eta) {
  const BlockSpectrum s = block_spectrum(state0, target);
  const double gap = target.eigengap();
  const double top = target.top_eigenvalue();
  const double signal_sq = s.sigmar_u * s.sigmar_u;

  Condition1Report report;
  report.kappa = kappa(target, eta);
  report.c1 = std::pow(gap, 1.0 - report.kappa / 2.0) /
              (std::pow(2.0, 3.0 - report.kappa) * std::sqrt(top));

  const double m0 = top - s.sigma1_x_sq;
  const double m1 = target.cut_eigenvalue() - gap / 2.0 - s.sigma1_j_sq;
  const double m2 = std::min(signal_sq, gap / 4.0 - signal_sq);
  const double m3 = report.c1 * std::pow(s.sigmar_u, 1.0 + report.kappa) - s.sigma1_j_sq;
  report.clauses[0] = {m0 >= 0.0, m0};
  report.clauses[1] = {m1 >= 0.0, m1};
  report.clauses[2] = {m2 > 0.0, m2};
  report.clauses[3] = {m3 >= 0.0, m3};
  report.holds = true;
  for (const auto& c : report.clauses) report.holds = report.holds && c.holds;
  return report;
}

std::size_t warmup_budget(const FactorState& state0, const Target& target, double eta) {
  if (!(eta > 0.0)) throw PreconditionError("warmup_budget: eta must be positive");
  const double gap = target.eigengap();
  const BlockSpectrum s = block_spectrum(state0, target);
  const double signal_sq = s.sigmar_u * s.sigmar_u;
  if (!(signal_sq > 0.0)) {
    throw PreconditionError("warmup_budget: sigma_r(U0) must be positive");
  }
  return warmup_budget(signal_sq, gap, eta);
}

std::size_t warmup_budget(double signal_sq, double gap, double eta) {
  if (!(eta > 0.0) || !(gap > 0.0)) {
    throw PreconditionError("warmup_budget: eta and Delta must be positive");
  }
  if (!(signal_sq > 0.0)) throw PreconditionError("warmup_budget: sigma_r(U0) must be positive");
  if (signal_sq >= gap / 4.0) return 0;
  const double budget = (2.0 / (eta * gap)) * std::log(gap / (4.0 * signal_sq));
  return static_cast<std::size_t>(std::ceil(budget));
}

}  // namespace lowrank
