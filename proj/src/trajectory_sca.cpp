#include "uavsec/trajectory_sca.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uavsec/geometry.hpp"
#include "uavsec/robust_lmi.hpp"

namespace uavsec {

namespace {

/// Multiplier maximising det-margin of the S-procedure block at distance r
/// from the center for a given t (all in consistent units).
double best_xi(double r, double t, double radius, double h2) {
  if (radius <= 0.0) return 0.0;
  const double q2 = radius * radius;
  const double rho = r * r + h2 - t;
  return std::max(0.0, (q2 + rho) / (2.0 * q2) - 1.0);
}

bool inside_any_disk(Vec2 p, const Scenario& s) {
  for (const auto& e : s.eves)
    if (std::hypot(p.x - e.center_x, p.y - e.center_y) <= e.radius) return true;
  return false;
}

}  // namespace

const char* to_string(StepStatus status) {
  switch (status) {
    case StepStatus::optimal: return "optimal";
    case StepStatus::max_iter: return "max_iter";
    case StepStatus::numerical_trouble: return "numerical_trouble";
  }
  return "unknown";
}

ScaSlacks initialize_slacks(const Trajectory& traj, const Scenario& s) {
  const std::size_t N = s.n_slots;
  const std::size_t K = s.eves.size();
  const double h2 = s.altitude * s.altitude;
  ScaSlacks out;
  out.u.resize(N);
  out.t.resize(N);
  out.xi.assign(K, std::vector<double>(N, 0.0));
  for (std::size_t n = 0; n < N; ++n) {
    const Vec2 p = traj.at(n + 1);
    out.u[n] = p.x * p.x + p.y * p.y + h2;
    out.t[n] = min_worst_case_dist_sq(p, s.eves, s.altitude);
    for (std::size_t k = 0; k < K; ++k) {
      const EveRegion& e = s.eves[k];
      const double r = std::hypot(p.x - e.center_x, p.y - e.center_y);
      out.xi[k][n] = best_xi(r, out.t[n], e.radius, h2);
    }
  }
  return out;
}

double taylor_rate_surrogate(double u, double u_fea, double p_scaled) {
  if (p_scaled == 0.0) return 0.0;
  return std::log2(1.0 + p_scaled / u_fea) -
         p_scaled * (u - u_fea) / (std::numbers::ln2 * (u_fea * u_fea + p_scaled * u_fea));
}

ScaProgram assemble(const Trajectory& traj_fea, const std::vector<double>& u_fea,
                    const PowerSchedule& powers, const Scenario& s) {
  const std::size_t N = s.n_slots;
  const std::size_t K = s.eves.size();
  if (!check_trajectory(traj_fea, s).empty())
    throw std::logic_error("assemble: expansion trajectory violates its invariants");
  if (u_fea.size() != N || powers.p.size() != N)
    throw std::logic_error("assemble: u_fea and powers must have N entries");

  ScaProgram out;
  const double L = s.altitude;
  out.length_scale = L;
  const double h = s.altitude / L;
  const double h2 = h * h;
  const double radius_step = s.step_len() / L;
  const double ln2 = std::numbers::ln2;

  cvx::ConvexProgram& prog = out.program;
  std::vector<double>& init = prog.initial;
  auto new_var = [&](double start) {
    init.push_back(start);
    return init.size() - 1;
  };

  // Variables, slot by slot so the Hessian stays banded.
  out.slots.resize(N);
  for (std::size_t n = 0; n < N; ++n) {
    SlotVars& v = out.slots[n];
    const Vec2 pf = traj_fea.at(n + 1);
    v.active = powers.p[n] > 0.0;
    v.pinned = v.active && inside_any_disk(pf, s);
    v.xi.assign(K, kNoVar);
    if (v.pinned) continue;
    v.x = new_var(pf.x / L);
    v.y = new_var(pf.y / L);
    if (!v.active) continue;

    const double xf = pf.x / L;
    const double yf = pf.y / L;
    const double u_tight = xf * xf + yf * yf + h2;
    v.u = new_var(std::max(u_fea[n] / (L * L), u_tight) + 1e-3 * h2);
    const double theta = min_worst_case_dist_sq(pf, s.eves, s.altitude) / (L * L);
    const double t0 = theta - 1e-3 * (theta - h2);
    v.t = new_var(t0);
    for (std::size_t k = 0; k < K; ++k) {
      const EveRegion& e = s.eves[k];
      if (e.radius <= 0.0) continue;
      const double r = std::hypot(pf.x - e.center_x, pf.y - e.center_y) / L;
      v.xi[k] = new_var(best_xi(r, t0, e.radius / L, h2));
    }
  }
  prog.num_vars = init.size();
  prog.linear.assign(prog.num_vars, 0.0);

  // Objective: surrogate rate term in u, exact eavesdropper term in t.
  for (std::size_t n = 0; n < N; ++n) {
    const SlotVars& v = out.slots[n];
    if (!v.active) continue;
    const double p_hat = s.gamma0 * powers.p[n] / (L * L);
    const double uf = u_fea[n] / (L * L);
    if (v.pinned) {
      prog.constant += std::log2(1.0 + p_hat / uf) - std::log2(1.0 + p_hat / h2);
      continue;
    }
    const double w = p_hat / (ln2 * (uf * uf + p_hat * uf));
    prog.linear[v.u] -= w;
    prog.constant += std::log2(1.0 + p_hat / uf) + w * uf;
    prog.log_terms.push_back({v.t, p_hat});
  }

  // Mobility: ||p[n+1] - p[n]|| <= v_max d_t for n = 0..N.
  auto coord = [&](std::size_t slot, bool is_x) -> cvx::Affine {
    if (slot == 0) return {{}, (is_x ? s.start_xy.x : s.start_xy.y) / L};
    if (slot == N + 1) return {{}, (is_x ? s.end_xy.x : s.end_xy.y) / L};
    const SlotVars& v = out.slots[slot - 1];
    const std::size_t var = is_x ? v.x : v.y;
    if (var == kNoVar) return {{}, (is_x ? traj_fea.xs[slot] : traj_fea.ys[slot]) / L};
    return {{{var, 1.0}}, 0.0};
  };
  auto diff = [&](const cvx::Affine& a, const cvx::Affine& b) {
    cvx::Affine d{{}, (a.constant - b.constant) / radius_step};
    for (const auto& t : a.terms) d.terms.push_back({t.var, t.coef / radius_step});
    for (const auto& t : b.terms) d.terms.push_back({t.var, -t.coef / radius_step});
    return d;
  };
  for (std::size_t n = 0; n <= N; ++n) {
    cvx::Affine dx = diff(coord(n + 1, true), coord(n, true));
    cvx::Affine dy = diff(coord(n + 1, false), coord(n, false));
    if (dx.terms.empty() && dy.terms.empty()) continue;
    prog.norm_cons.push_back({{std::move(dx), std::move(dy)}, {{}, 1.0}});
    ++out.mobility_constraints;
  }

  for (std::size_t n = 0; n < N; ++n) {
    const SlotVars& v = out.slots[n];
    if (!v.active || v.pinned) continue;
    const Vec2 pf = traj_fea.at(n + 1);

    // x^2 + y^2 + H^2 <= u
    prog.norm_cons.push_back({{{{{v.x, 1.0}}, 0.0}, {{{v.y, 1.0}}, 0.0}}, {{{v.u, 1.0}}, -h2}});
    ++out.u_constraints;

    // t >= H^2
    prog.linear_cons.push_back({{{{v.t, 1.0}}, -h2}});
    ++out.bound_constraints;

    for (std::size_t k = 0; k < K; ++k) {
      const EveRegion& e = s.eves[k];
      if (e.radius > 0.0) {
        prog.linear_cons.push_back({{{{v.xi[k], 1.0}}, 0.0}});
        ++out.bound_constraints;
        const LmiBlock block =
            linearized_block({v.x, v.y, v.t, v.xi[k]}, pf.x, pf.y, e, s.altitude, L);
        prog.cones.push_back(as_rotated_soc(block));
        ++out.cone_blocks;
      } else {
        prog.linear_cons.push_back(
            linearized_distance_constraint(v.x, v.y, v.t, pf.x, pf.y, e, s.altitude, L));
        ++out.distance_constraints;
      }
    }
  }
  return out;
}

SubproblemSolution solve_step(const Trajectory& traj_fea, const std::vector<double>& u_fea,
                              const PowerSchedule& powers, const Scenario& s,
                              const cvx::SolverSettings& settings) {
  const std::size_t N = s.n_slots;
  const std::size_t K = s.eves.size();
  const double h2 = s.altitude * s.altitude;

  SubproblemSolution out;
  out.expansion_objective = smoothed_objective(traj_fea, powers, s);

  auto fallback = [&](std::string message) {
    out.trajectory = traj_fea;
    out.slacks = initialize_slacks(traj_fea, s);
    out.surrogate_objective = out.expansion_objective;
    out.true_objective = out.expansion_objective;
    out.status = StepStatus::numerical_trouble;
    out.message = std::move(message);
    return out;
  };

  const ScaProgram sp = assemble(traj_fea, u_fea, powers, s);
  const cvx::SolverResult res = cvx::solve(sp.program, settings);
  out.newton_iterations = res.newton_iterations + res.phase1_iterations;
  if (res.status == cvx::SolverStatus::numerical_trouble) return fallback(res.message);

  const double L = sp.length_scale;
  const auto& z = res.z;
  Trajectory traj = traj_fea;
  ScaSlacks slacks;
  slacks.u.resize(N);
  slacks.t.resize(N);
  slacks.xi.assign(K, std::vector<double>(N, 0.0));
  for (std::size_t n = 0; n < N; ++n) {
    const SlotVars& v = sp.slots[n];
    if (v.x != kNoVar) {
      traj.xs[n + 1] = z[v.x] * L;
      traj.ys[n + 1] = z[v.y] * L;
    }
    const Vec2 p = traj.at(n + 1);
    if (v.u != kNoVar) {
      slacks.u[n] = z[v.u] * L * L;
      slacks.t[n] = z[v.t] * L * L;
      for (std::size_t k = 0; k < K; ++k) {
        if (v.xi[k] == kNoVar) continue;
        double xi = z[v.xi[k]];
        if (xi < 0.0 && xi >= -1e-12) xi = 0.0;
        slacks.xi[k][n] = xi;
      }
    } else if (v.pinned) {
      slacks.u[n] = u_fea[n];
      slacks.t[n] = h2;
    } else {
      slacks.u[n] = p.x * p.x + p.y * p.y + h2;
      slacks.t[n] = min_worst_case_dist_sq(p, s.eves, s.altitude);
    }
  }

  if (!check_trajectory(traj, s).empty())
    return fallback("solver returned a trajectory violating the mobility constraint");

  // Every eavesdropper position in every disk must be at squared distance
  // >= t; check the closed form and a sampled cover of each disk.
  constexpr double kRobustTol = 1e-6;
  for (std::size_t n = 0; n < N; ++n) {
    const SlotVars& v = sp.slots[n];
    if (v.t == kNoVar) continue;
    const Vec2 p = traj.at(n + 1);
    for (std::size_t k = 0; k < K; ++k) {
      const double closed = worst_case_dist_sq(p, s.eves[k], s.altitude);
      const double sampled = worst_case_dist_sq_oracle(p, s.eves[k], s.altitude, 64, n * K + k);
      if (closed < slacks.t[n] - kRobustTol || sampled < slacks.t[n] - kRobustTol)
        return fallback("robust distance constraint violated at slot " + std::to_string(n + 1));
    }
  }

  out.trajectory = std::move(traj);
  out.slacks = std::move(slacks);
  out.surrogate_objective = res.objective;
  out.true_objective = smoothed_objective(out.trajectory, powers, s);
  out.status = res.status == cvx::SolverStatus::optimal ? StepStatus::optimal : StepStatus::max_iter;
  out.message = res.message;
  return out;
}

SubproblemSolution solve_step(const Trajectory& traj_fea, const PowerSchedule& powers,
                              const Scenario& scenario, const cvx::SolverSettings& settings) {
  return solve_step(traj_fea, initialize_slacks(traj_fea, scenario).u, powers, scenario, settings);
}

}  // namespace uavsec
