#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace uavsec::cvx {

struct Term {
  std::size_t var;
  double coef;
};

/// Sparse affine form  sum_i coef_i * z[var_i] + constant.
struct Affine {
  std::vector<Term> terms;
  double constant = 0.0;

  double eval(std::span<const double> z) const {
    double v = constant;
    for (const Term& t : terms) v += t.coef * z[t.var];
    return v;
  }
};

/// expr(z) >= 0
struct LinearConstraint {
  Affine expr;
};

/// sum_i parts_i(z)^2 <= rhs(z)
struct NormBound {
  std::vector<Affine> parts;
  Affine rhs;
};

/// a(z) * d(z) >= sum_i parts_i(z)^2 with a, d >= 0.
struct RotatedCone {
  Affine a;
  Affine d;
  std::vector<Affine> parts;
};

/// Objective contribution  -log2(1 + kappa / z[var]),  kappa >= 0.
struct LogTerm {
  std::size_t var;
  double kappa;
};

/// Maximise  linear . z + constant - sum log2(1 + kappa_j / z[var_j])
/// subject to the listed convex constraints.
struct ConvexProgram {
  std::size_t num_vars = 0;
  std::vector<double> linear;
  double constant = 0.0;
  std::vector<LogTerm> log_terms;
  std::vector<LinearConstraint> linear_cons;
  std::vector<NormBound> norm_cons;
  std::vector<RotatedCone> cones;
  /// Starting point; need not be strictly feasible.
  std::vector<double> initial;

  double objective(std::span<const double> z) const;
  /// Largest constraint violation at z on the constraints' natural scale.
  double max_violation(std::span<const double> z) const;
  std::size_t num_constraints() const {
    return linear_cons.size() + norm_cons.size() + cones.size();
  }
};

enum class SolverStatus { optimal, max_iter, numerical_trouble };

const char* to_string(SolverStatus status);

struct SolverSettings {
  double feas_tol = 1e-8;
  double opt_tol = 1e-8;
  /// Cap on Newton steps within a single centering pass.
  std::size_t max_newton_iters = 200;
  std::size_t max_outer_iters = 60;
  double barrier_growth = 20.0;
  double newton_tol = 1e-10;
};

struct SolverResult {
  std::vector<double> z;
  double objective = 0.0;
  SolverStatus status = SolverStatus::numerical_trouble;
  std::size_t newton_iterations = 0;
  std::size_t phase1_iterations = 0;
  /// Largest constraint violation, checked directly on the returned point.
  double primal_residual = 0.0;
  /// Infinity norm of the Lagrangian gradient using the barrier multiplier
  /// estimates 1 / (tau g_i). Only a diagnostic: along strongly curved
  /// directions near active constraints these estimates lag, so the value can
  /// sit well above the true KKT residual. Termination uses `gap`.
  double stationarity = 0.0;
  /// Duality-gap bound (number of barrier terms / tau).
  double gap = 0.0;
  std::string message;
};

SolverResult solve(const ConvexProgram& program, const SolverSettings& settings = {});

}  // namespace uavsec::cvx
