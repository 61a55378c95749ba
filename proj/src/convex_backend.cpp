#include "uavsec/convex_backend.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace uavsec::cvx {

const char* to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::optimal: return "optimal";
    case SolverStatus::max_iter: return "max_iter";
    case SolverStatus::numerical_trouble: return "numerical_trouble";
  }
  return "unknown";
}

double ConvexProgram::objective(std::span<const double> z) const {
  double v = constant;
  for (std::size_t i = 0; i < linear.size(); ++i) v += linear[i] * z[i];
  for (const LogTerm& l : log_terms) v -= std::log2(1.0 + l.kappa / z[l.var]);
  return v;
}

double ConvexProgram::max_violation(std::span<const double> z) const {
  double worst = 0.0;
  for (const auto& c : linear_cons) worst = std::max(worst, -c.expr.eval(z));
  for (const auto& c : norm_cons) {
    double sq = 0.0;
    for (const auto& p : c.parts) sq += p.eval(z) * p.eval(z);
    worst = std::max(worst, sq - c.rhs.eval(z));
  }
  for (const auto& c : cones) {
    const double a = c.a.eval(z);
    const double d = c.d.eval(z);
    double sq = 0.0;
    for (const auto& p : c.parts) sq += p.eval(z) * p.eval(z);
    worst = std::max({worst, -a, -d, sq - a * d});
  }
  return worst;
}

namespace {

using Triplet = Eigen::Triplet<double>;
using SparseMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

/// Sparse gradient accumulator: (index, value) pairs, duplicates allowed.
using SparseGrad = std::vector<Term>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void append(SparseGrad& g, const Affine& a, double scale) {
  for (const Term& t : a.terms) g.push_back({t.var, scale * t.coef});
}

void add_outer(std::vector<Triplet>& trip, const SparseGrad& u, double scale) {
  for (const Term& i : u)
    for (const Term& j : u) trip.emplace_back(static_cast<int>(i.var), static_cast<int>(j.var),
                                              scale * i.coef * j.coef);
}

void add_outer(std::vector<Triplet>& trip, const Affine& a, double scale) {
  for (const Term& i : a.terms)
    for (const Term& j : a.terms) trip.emplace_back(static_cast<int>(i.var), static_cast<int>(j.var),
                                                    scale * i.coef * j.coef);
}

/// Log-barrier for the program. In phase I an extra variable s (index
/// num_vars) relaxes every constraint and the objective is s itself, plus
/// a small proximal term to the starting point that keeps directions the
/// constraints leave unbounded (e.g. u growing) from running away.
class Barrier {
 public:
  static constexpr double kProximal = 1e-4;

  Barrier(const ConvexProgram& p, bool phase1, std::vector<double> anchor = {})
      : p_(p), phase1_(phase1), anchor_(std::move(anchor)) {
    s_index_ = p.num_vars;
    shift_.terms = phase1 ? std::vector<Term>{{s_index_, 1.0}} : std::vector<Term>{};
  }

  std::size_t dim() const { return p_.num_vars + (phase1_ ? 1 : 0); }

  double num_terms() const {
    return static_cast<double>(p_.linear_cons.size() + p_.norm_cons.size() + 2 * p_.cones.size() +
                               (phase1_ ? 1 : 0));
  }

  double shift(std::span<const double> w) const { return phase1_ ? w[s_index_] : 0.0; }

  double f0(std::span<const double> w) const {
    if (phase1_) return w[s_index_];
    return -p_.objective(w);
  }

  /// tau * f0 + barrier, or +inf outside the domain.
  double value(std::span<const double> w, double tau) const {
    const double s = shift(w);
    double phi = 0.0;
    for (const auto& c : p_.linear_cons) {
      const double g = c.expr.eval(w) + s;
      if (!(g > 0.0)) return kInf;
      phi -= std::log(g);
    }
    for (const auto& c : p_.norm_cons) {
      double g = c.rhs.eval(w) + s;
      for (const auto& part : c.parts) {
        const double v = part.eval(w);
        g -= v * v;
      }
      if (!(g > 0.0)) return kInf;
      phi -= std::log(g);
    }
    for (const auto& c : p_.cones) {
      const double a = c.a.eval(w);
      const double d = c.d.eval(w);
      const double sigma = a + d + s;
      const double delta = a - d;
      double g = sigma * sigma - delta * delta;
      for (const auto& part : c.parts) {
        const double v = part.eval(w);
        g -= 4.0 * v * v;
      }
      if (!(sigma > 0.0) || !(g > 0.0)) return kInf;
      phi -= std::log(g);
    }
    double obj;
    if (phase1_) {
      const double g = s + 1.0;
      if (!(g > 0.0)) return kInf;
      phi -= std::log(g);
      for (std::size_t i = 0; i < p_.num_vars; ++i) {
        const double dz = w[i] - anchor_[i];
        phi += 0.5 * kProximal * dz * dz;
      }
      obj = s;
    } else {
      for (const auto& l : p_.log_terms)
        if (!(w[l.var] > 0.0)) return kInf;
      obj = f0(w);
    }
    if (!std::isfinite(obj) || !std::isfinite(phi)) return kInf;
    return tau * obj + phi;
  }

  /// Gradient and Hessian (as triplets, both triangles) of value(w, tau).
  void derivatives(std::span<const double> w, double tau, Vec& grad,
                   std::vector<Triplet>& trip) const {
    grad.setZero(static_cast<Eigen::Index>(dim()));
    trip.clear();
    const double s = shift(w);
    SparseGrad dg;

    auto add_grad = [&grad](const SparseGrad& u, double scale) {
      for (const Term& t : u) grad[static_cast<Eigen::Index>(t.var)] += scale * t.coef;
    };

    for (const auto& c : p_.linear_cons) {
      const double g = c.expr.eval(w) + s;
      dg.clear();
      append(dg, c.expr, 1.0);
      append(dg, shift_, 1.0);
      add_grad(dg, -1.0 / g);
      add_outer(trip, dg, 1.0 / (g * g));
    }

    for (const auto& c : p_.norm_cons) {
      double g = c.rhs.eval(w) + s;
      dg.clear();
      append(dg, c.rhs, 1.0);
      append(dg, shift_, 1.0);
      for (const auto& part : c.parts) {
        const double v = part.eval(w);
        g -= v * v;
        append(dg, part, -2.0 * v);
      }
      add_grad(dg, -1.0 / g);
      add_outer(trip, dg, 1.0 / (g * g));
      for (const auto& part : c.parts) add_outer(trip, part, 2.0 / g);
    }

    SparseGrad sigma_grad;
    SparseGrad delta_grad;
    for (const auto& c : p_.cones) {
      const double a = c.a.eval(w);
      const double d = c.d.eval(w);
      const double sigma = a + d + s;
      const double delta = a - d;
      double g = sigma * sigma - delta * delta;
      sigma_grad.clear();
      append(sigma_grad, c.a, 1.0);
      append(sigma_grad, c.d, 1.0);
      append(sigma_grad, shift_, 1.0);
      delta_grad.clear();
      append(delta_grad, c.a, 1.0);
      append(delta_grad, c.d, -1.0);
      dg.clear();
      append(dg, c.a, 2.0 * sigma - 2.0 * delta);
      append(dg, c.d, 2.0 * sigma + 2.0 * delta);
      append(dg, shift_, 2.0 * sigma);
      for (const auto& part : c.parts) {
        const double v = part.eval(w);
        g -= 4.0 * v * v;
        append(dg, part, -8.0 * v);
      }
      add_grad(dg, -1.0 / g);
      add_outer(trip, dg, 1.0 / (g * g));
      // -hess(g) / g
      add_outer(trip, sigma_grad, -2.0 / g);
      add_outer(trip, delta_grad, 2.0 / g);
      for (const auto& part : c.parts) add_outer(trip, part, 8.0 / g);
    }

    if (phase1_) {
      const auto si = static_cast<Eigen::Index>(s_index_);
      const double g = s + 1.0;
      grad[si] += tau - 1.0 / g;
      trip.emplace_back(static_cast<int>(si), static_cast<int>(si), 1.0 / (g * g));
      for (std::size_t i = 0; i < p_.num_vars; ++i) {
        grad[static_cast<Eigen::Index>(i)] += kProximal * (w[i] - anchor_[i]);
        trip.emplace_back(static_cast<int>(i), static_cast<int>(i), kProximal);
      }
    } else {
      for (std::size_t i = 0; i < p_.linear.size(); ++i)
        grad[static_cast<Eigen::Index>(i)] -= tau * p_.linear[i];
      const double inv_ln2 = 1.0 / std::numbers::ln2;
      for (const auto& l : p_.log_terms) {
        const double t = w[l.var];
        const double k = l.kappa;
        grad[static_cast<Eigen::Index>(l.var)] += tau * inv_ln2 * (-k / (t * (t + k)));
        const double h = inv_ln2 * k * (2.0 * t + k) / (t * t * (t + k) * (t + k));
        trip.emplace_back(static_cast<int>(l.var), static_cast<int>(l.var), tau * h);
      }
    }
    // Keep the sparsity pattern stable for every variable.
    for (std::size_t i = 0; i < dim(); ++i)
      trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 0.0);
  }

  /// Smallest uniform shift that makes each constraint feasible at z; the
  /// maximum over constraints is < 0 iff z is strictly feasible.
  double required_shift(std::span<const double> z) const {
    double worst = -kInf;
    for (const auto& c : p_.linear_cons) worst = std::max(worst, -c.expr.eval(z));
    for (const auto& c : p_.norm_cons) {
      double sq = 0.0;
      for (const auto& part : c.parts) sq += part.eval(z) * part.eval(z);
      worst = std::max(worst, sq - c.rhs.eval(z));
    }
    for (const auto& c : p_.cones) {
      const double a = c.a.eval(z);
      const double d = c.d.eval(z);
      double sq = (a - d) * (a - d);
      for (const auto& part : c.parts) sq += 4.0 * part.eval(z) * part.eval(z);
      worst = std::max(worst, std::sqrt(sq) - (a + d));
    }
    return worst;
  }

 private:
  const ConvexProgram& p_;
  bool phase1_;
  std::vector<double> anchor_;
  std::size_t s_index_ = 0;
  Affine shift_;
};

enum class CenterOutcome { converged, max_iter, trouble, early_exit };

struct Centering {
  CenterOutcome outcome = CenterOutcome::converged;
  std::size_t iterations = 0;
  Vec grad;
};

/// Solves H dx = -g with a sparse LDLT, adding diagonal regularisation if
/// the factorisation is not positive definite.
bool newton_direction(std::size_t dim, const std::vector<Triplet>& trip, const Vec& grad, Vec& dx) {
  SparseMat h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  h.setFromTriplets(trip.begin(), trip.end());
  double max_diag = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i) max_diag = std::max(max_diag, std::abs(h.coeff(i, i)));
  if (!std::isfinite(max_diag)) return false;

  Eigen::SimplicialLDLT<SparseMat, Eigen::Lower> ldlt;
  ldlt.analyzePattern(h);
  double reg = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    SparseMat hr = h;
    if (reg > 0.0)
      for (Eigen::Index i = 0; i < hr.rows(); ++i) hr.coeffRef(i, i) += reg;
    ldlt.factorize(hr);
    if (ldlt.info() == Eigen::Success && ldlt.vectorD().minCoeff() > 0.0) {
      dx = ldlt.solve(-grad);
      if (ldlt.info() == Eigen::Success && dx.allFinite()) return true;
    }
    reg = reg == 0.0 ? 1e-14 * std::max(1.0, max_diag) : reg * 100.0;
  }
  return false;
}

template <class StopFn>
Centering center(const Barrier& barrier, std::vector<double>& w, double tau,
                 const SolverSettings& settings, StopFn&& early_stop) {
  Centering out;
  std::vector<Triplet> trip;
  Vec grad;
  Vec dx;
  std::vector<double> trial(w.size());
  double current = barrier.value(w, tau);
  if (!std::isfinite(current)) {
    out.outcome = CenterOutcome::trouble;
    return out;
  }

  for (;;) {
    barrier.derivatives(w, tau, grad, trip);
    out.grad = grad;
    if (out.iterations >= settings.max_newton_iters) {
      out.outcome = CenterOutcome::max_iter;
      return out;
    }
    if (!newton_direction(w.size(), trip, grad, dx)) {
      out.outcome = CenterOutcome::trouble;
      return out;
    }
    const double decrement_sq = -grad.dot(dx);
    // Below ~1e-14 |F| the decrement is roundoff in F itself.
    if (decrement_sq / 2.0 <= std::max(settings.newton_tol, 1e-14 * std::abs(current))) {
      out.outcome = CenterOutcome::converged;
      return out;
    }

    // Backtracking line search; points outside the domain evaluate to +inf.
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 80; ++ls) {
      for (std::size_t i = 0; i < w.size(); ++i) trial[i] = w[i] + step * dx[static_cast<Eigen::Index>(i)];
      const double v = barrier.value(trial, tau);
      if (v <= current - 0.01 * step * decrement_sq) {
        w.swap(trial);
        current = v;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++out.iterations;
    if (!accepted) {
      // Floating-point floor: the decrement is already tiny relative to F.
      out.outcome = decrement_sq <= 1e-6 ? CenterOutcome::converged : CenterOutcome::trouble;
      return out;
    }
    if (early_stop(w)) {
      out.outcome = CenterOutcome::early_exit;
      return out;
    }
  }
}

}  // namespace

SolverResult solve(const ConvexProgram& program, const SolverSettings& settings) {
  if (program.initial.size() != program.num_vars)
    throw std::invalid_argument("cvx::solve: initial point has wrong dimension");
  if (!program.linear.empty() && program.linear.size() != program.num_vars)
    throw std::invalid_argument("cvx::solve: linear objective has wrong dimension");

  SolverResult result;
  std::vector<double> z = program.initial;
  result.z = z;
  result.objective = program.objective(z);

  // Phase I: find a strictly feasible point by minimising a uniform shift.
  Barrier phase2(program, false);
  const double required = phase2.required_shift(z);
  constexpr double kPhase1Target = -1e-7;
  constexpr double kPhase1Margin = -0.05;
  if (required >= kPhase1Target && program.num_constraints() > 0) {
    Barrier phase1(program, true, z);
    std::vector<double> w = z;
    w.push_back(required + 1.0);
    double tau = 1.0;
    bool found = false;
    // Leave phase I early only with a comfortable margin; otherwise accept
    // the first centred point with a negative shift.
    auto stop = [&](const std::vector<double>& v) { return v.back() < kPhase1Margin; };
    for (std::size_t outer = 0; outer < settings.max_outer_iters; ++outer) {
      Centering c = center(phase1, w, tau, settings, stop);
      result.phase1_iterations += c.iterations;
      if (c.outcome == CenterOutcome::early_exit || w.back() < kPhase1Target) {
        found = true;
        break;
      }
      if (c.outcome == CenterOutcome::trouble) break;
      if (phase1.num_terms() / tau < 1e-14) {
        found = w.back() < 0.0;
        break;
      }
      tau *= settings.barrier_growth;
    }
    if (!found) {
      result.status = SolverStatus::numerical_trouble;
      result.message = "phase I found no strictly feasible point (min shift " +
                       std::to_string(w.back()) + ")";
      return result;
    }
    w.pop_back();
    z = std::move(w);
  }

  if (!std::isfinite(phase2.value(z, 1.0))) {
    result.status = SolverStatus::numerical_trouble;
    result.message = "starting point outside the objective domain";
    return result;
  }

  const double m = phase2.num_terms();
  double tau = m > 0.0 ? m / std::max(1.0, std::abs(phase2.f0(z))) : 1.0;
  tau = std::max(tau, 1e-3);
  auto never = [](const std::vector<double>&) { return false; };
  Centering last;
  SolverStatus status = SolverStatus::max_iter;
  for (std::size_t outer = 0; outer < settings.max_outer_iters; ++outer) {
    last = center(phase2, z, tau, settings, never);
    result.newton_iterations += last.iterations;
    if (last.outcome == CenterOutcome::trouble) {
      status = SolverStatus::numerical_trouble;
      result.message = "line search failed";
      break;
    }
    const double gap = m / tau;
    if (gap <= settings.opt_tol * std::max(1.0, std::abs(phase2.f0(z)))) {
      status = last.outcome == CenterOutcome::converged ? SolverStatus::optimal : SolverStatus::max_iter;
      break;
    }
    tau *= settings.barrier_growth;
  }

  result.z = z;
  result.objective = program.objective(z);
  result.gap = m > 0.0 ? m / tau : 0.0;
  result.stationarity = last.grad.size() > 0 ? last.grad.lpNorm<Eigen::Infinity>() / tau : 0.0;
  result.primal_residual = std::max(0.0, program.max_violation(z));
  if (status == SolverStatus::optimal && result.primal_residual > settings.feas_tol) {
    status = SolverStatus::numerical_trouble;
    result.message = "returned point violates constraints";
  }
  result.status = status;
  return result;
}

}  // namespace uavsec::cvx
