#include "uavsec/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "uavsec/geometry.hpp"
#include "uavsec/planner.hpp"
#include "uavsec/power_alloc.hpp"
#include "uavsec/robust_lmi.hpp"
#include "uavsec/trajectory_sca.hpp"

namespace uavsec::verify {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// f(q) - f(ref) for f(p) = log2(1 + alpha p) - log2(1 + beta p) - lambda p,
/// written in increments so that nearly flat maxima stay resolvable.
double power_gain(double alpha, double beta, double lambda, double ref, double q) {
  const double dq = q - ref;
  return (std::log1p(alpha * dq / (1.0 + alpha * ref)) - std::log1p(beta * dq / (1.0 + beta * ref))) /
             std::numbers::ln2 -
         lambda * dq;
}

/// Argmax over [lo, hi] on `points` evenly spaced samples.
double grid_argmax(double alpha, double beta, double lambda, double ref, double lo, double hi,
                   std::size_t points) {
  double best_p = lo;
  double best_v = power_gain(alpha, beta, lambda, ref, lo);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 1; i < points; ++i) {
    const double p = i + 1 == points ? hi : lo + step * static_cast<double>(i);
    const double v = power_gain(alpha, beta, lambda, ref, p);
    if (v > best_v) {
      best_v = v;
      best_p = p;
    }
  }
  return best_p;
}

}  // namespace

CheckResult disk_oracle(std::size_t pairs, std::size_t samples, double max_rel_gap,
                        std::uint64_t seed) {
  const auto start = Clock::now();
  CheckResult out;
  out.name = "disk-sampling oracle vs closed form";
  std::mt19937_64 rng(seed);
  std::size_t above = 0;
  double worst_gap = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    const EveRegion eve{uniform(rng, -500.0, 500.0), uniform(rng, -500.0, 500.0),
                        uniform(rng, 0.0, 100.0)};
    // Mix positions near the disk (including inside it) with far ones.
    const double spread = i % 2 == 0 ? 2.0 * eve.radius + 10.0 : 600.0;
    const Vec2 uav{eve.center_x + uniform(rng, -spread, spread),
                   eve.center_y + uniform(rng, -spread, spread)};
    const double h = uniform(rng, 50.0, 150.0);
    const double closed = worst_case_dist_sq(uav, eve, h);
    const double sampled = worst_case_dist_sq_oracle(uav, eve, h, samples, seed + i);
    if (closed > sampled * (1.0 + 1e-12)) ++above;
    worst_gap = std::max(worst_gap, (sampled - closed) / closed);
  }
  out.passed = above == 0 && worst_gap <= max_rel_gap;
  out.detail = fmt("%zu pairs, %zu samples: closed form above sample minimum %zu times, "
                   "max relative gap %.3g (limit %.3g)",
                   pairs, samples, above, worst_gap, max_rel_gap);
  out.seconds = seconds_since(start);
  return out;
}

CheckResult psd_vs_soc(std::size_t blocks, double boundary_tol, std::uint64_t seed) {
  const auto start = Clock::now();
  CheckResult out;
  out.name = "PSD vs rotated cone";
  std::mt19937_64 rng(seed);
  std::size_t near = 0;
  std::size_t mismatched = 0;
  std::size_t feasible = 0;
  for (std::size_t i = 0; i < blocks; ++i) {
    const double a = std::exp(uniform(rng, 0.0, std::log(1e4)));
    const double b = uniform(rng, -100.0, 100.0);
    const double c = uniform(rng, -100.0, 100.0);
    // Half the blocks sit close to the boundary d = (b^2 + c^2) / a.
    const double edge = (b * b + c * c) / a;
    const double d = i % 2 == 0 ? edge * (1.0 + uniform(rng, -1e-3, 1e-3)) + uniform(rng, -1e-6, 1e-6)
                                : uniform(rng, -1e4, 1e4);

    const double scale = std::max({1.0, std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    const double lambda_min =
        0.5 * ((a + d) - std::sqrt((a - d) * (a - d) + 4.0 * (b * b + c * c)));
    if (std::abs(std::min(lambda_min, a)) <= boundary_tol * scale) {
      ++near;
      continue;
    }

    AffineSym3 m;
    m.m00 = {{}, a};
    m.m11 = {{}, a};
    m.m02 = {{}, b};
    m.m12 = {{}, c};
    m.m22 = {{}, d};
    const cvx::RotatedCone cone = as_rotated_soc(make_lmi_block(m));
    const double ca = cone.a.eval({});
    const double cd = cone.d.eval({});
    double sq = 0.0;
    for (const auto& p : cone.parts) sq += p.eval({}) * p.eval({});
    const bool in_cone = ca >= 0.0 && cd >= 0.0 && ca * cd >= sq;
    const bool psd = psd_check(a, b, c, d);
    if (in_cone) ++feasible;
    if (in_cone != psd) ++mismatched;
  }
  out.passed = mismatched == 0;
  out.detail = fmt("%zu blocks (%zu feasible, %zu within %.0e of the boundary skipped): %zu mismatches",
                   blocks, feasible, near, boundary_tol, mismatched);
  out.seconds = seconds_since(start);
  return out;
}

CheckResult power_grid(std::size_t instances, std::size_t grid_points, std::uint64_t seed) {
  const auto start = Clock::now();
  CheckResult out;
  out.name = "power allocation vs grid search";
  std::mt19937_64 rng(seed);
  double worst_slot = 0.0;
  double worst_kkt = 0.0;
  std::size_t saturated = 0;
  bool bounds_ok = true;
  for (std::size_t i = 0; i < instances; ++i) {
    const std::size_t n = 1 + static_cast<std::size_t>(uniform(rng, 0.0, 16.0));
    const double avg = dbm_to_watt(uniform(rng, -10.0, 30.0));
    const double peak = avg * uniform(rng, 1.5, 6.0);
    std::vector<double> alpha(n);
    std::vector<double> beta(n);
    for (std::size_t k = 0; k < n; ++k) {
      // Same ranges the planner produces: gamma0 = 1e8 over squared
      // distances between 100 m and about 700 m.
      alpha[k] = 1e8 / std::exp(uniform(rng, std::log(1e4), std::log(5e5)));
      beta[k] = 1e8 / std::exp(uniform(rng, std::log(1e4), std::log(5e5)));
    }
    const PowerDual dual = optimize_power(alpha, beta, avg, peak);
    if (dual.lambda == 0.0) ++saturated;

    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double p = dual.schedule.p[k];
      sum += p;
      if (p < 0.0 || p > peak) bounds_ok = false;
      // Coarse grid, then a second grid across the two cells around the
      // coarse maximum.
      const double coarse = grid_argmax(alpha[k], beta[k], dual.lambda, p, 0.0, peak, grid_points);
      const double cell = peak / static_cast<double>(grid_points - 1);
      const double fine = grid_argmax(alpha[k], beta[k], dual.lambda, p, std::max(0.0, coarse - cell),
                                      std::min(peak, coarse + cell), grid_points);
      worst_slot = std::max(worst_slot, std::abs(fine - p) / peak);
    }
    const double mean = sum / static_cast<double>(n);
    // Complementary slackness: a positive multiplier means the budget is
    // used exactly; a zero multiplier only needs the budget to hold.
    const double kkt = dual.lambda > 0.0 ? std::abs(mean - avg) / avg
                                         : std::max(0.0, mean - avg) / avg;
    worst_kkt = std::max(worst_kkt, kkt);
  }
  out.passed = bounds_ok && worst_slot <= 1e-6 && worst_kkt <= 1e-9;
  out.detail = fmt("%zu instances (%zu with zero multiplier): max per-slot deviation %.3g*P_peak "
                   "(limit 1e-6), max average-power residual %.3g (limit 1e-9)%s",
                   instances, saturated, worst_slot, worst_kkt, bounds_ok ? "" : ", bounds violated");
  out.seconds = seconds_since(start);
  return out;
}

Scenario tiny_scenario(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Scenario s;
  s.altitude = 100.0;
  s.slot_len = 5.0;
  s.v_max = 10.0;
  s.start_xy = {-150.0, -100.0};
  s.end_xy = {150.0, -100.0};
  s.avg_power = dbm_to_watt(uniform(rng, -5.0, 5.0));
  s.peak_power = 4.0 * s.avg_power;
  s.gamma0 = db_to_linear(80.0);
  s.eves = {{-200.0 + uniform(rng, -40.0, 40.0), uniform(rng, -40.0, 40.0), uniform(rng, 0.0, 40.0)},
            {200.0 + uniform(rng, -40.0, 40.0), uniform(rng, -40.0, 40.0), uniform(rng, 20.0, 100.0)}};
  return with_duration(s, 40.0);
}

CheckResult sca_steps(std::size_t scenarios, std::size_t steps, std::size_t samples,
                      std::uint64_t seed) {
  const auto start = Clock::now();
  CheckResult out;
  out.name = "SCA step soundness";
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t infeasible = 0;
  std::size_t decreases = 0;
  double worst_drop = 0.0;
  for (std::size_t j = 0; j < scenarios; ++j) {
    const Scenario s = tiny_scenario(seed + j);
    Trajectory traj = best_effort_trajectory(s);
    PowerSchedule power = equal_power(s);
    for (std::size_t m = 0; m < steps; ++m) {
      const SubproblemSolution step = solve_step(traj, power, s);
      if (step.status == StepStatus::numerical_trouble) {
        ++rejected;
        break;
      }
      ++accepted;
      for (std::size_t n = 0; n < s.n_slots; ++n) {
        if (power.p[n] <= 0.0) continue;
        const Vec2 p = step.trajectory.at(n + 1);
        for (std::size_t k = 0; k < s.eves.size(); ++k) {
          const double sampled = worst_case_dist_sq_oracle(p, s.eves[k], s.altitude, samples,
                                                           seed + 7919 * n + k);
          if (sampled < step.slacks.t[n] - 1e-6) ++infeasible;
        }
      }
      const double drop = step.expansion_objective - step.true_objective;
      worst_drop = std::max(worst_drop, drop);
      if (drop > 1e-6) ++decreases;
      traj = step.trajectory;
      power = optimize_power(traj, s).schedule;
    }
  }
  out.passed = accepted > 0 && rejected == 0 && infeasible == 0 && decreases == 0;
  out.detail = fmt("%zu accepted steps, %zu rejected, %zu robust violations, %zu decreases "
                   "(largest %.3g)",
                   accepted, rejected, infeasible, decreases, worst_drop);
  out.seconds = seconds_since(start);
  return out;
}

std::vector<CheckResult> run_all(Level level, std::uint64_t seed) {
  if (level == Level::quick) {
    return {disk_oracle(100, 2000, 2e-2, seed), psd_vs_soc(10000, 1e-9, seed),
            power_grid(10, 10000, seed), sca_steps(1, 4, 1000, seed)};
  }
  return {disk_oracle(1000, 10000, 5e-3, seed), psd_vs_soc(100000, 1e-9, seed),
          power_grid(100, 100000, seed), sca_steps(5, 10, 10000, seed)};
}

}  // namespace uavsec::verify
