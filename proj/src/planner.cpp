#include "uavsec/planner.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "uavsec/geometry.hpp"
#include "uavsec/power_alloc.hpp"

namespace uavsec {

const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::robust: return "robust";
    case Algorithm::non_robust: return "non-robust";
    case Algorithm::best_effort: return "best-effort";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "robust") return Algorithm::robust;
  if (name == "non-robust" || name == "non_robust") return Algorithm::non_robust;
  if (name == "best-effort" || name == "best_effort") return Algorithm::best_effort;
  throw std::invalid_argument("unknown algorithm '" + name + "'");
}

double fractional_increase(double obj, double prev) {
  return std::abs(obj - prev) / std::max(std::abs(prev), 1e-12);
}

namespace {

Vec2 step_toward(Vec2 from, Vec2 to, double step) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  const double d = std::hypot(dx, dy);
  if (d <= step) return to;
  return {from.x + dx * step / d, from.y + dy * step / d};
}

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

Trajectory best_effort_trajectory(const Scenario& s) {
  const std::size_t N = s.n_slots;
  const double step = s.step_len();
  Trajectory traj;
  traj.xs.resize(N + 2);
  traj.ys.resize(N + 2);
  traj.xs[0] = s.start_xy.x;
  traj.ys[0] = s.start_xy.y;

  Vec2 pos = s.start_xy;
  bool heading_home = true;
  for (std::size_t n = 1; n <= N; ++n) {
    if (heading_home) {
      const Vec2 next = step_toward(pos, {0.0, 0.0}, step);
      const double budget = static_cast<double>(N + 1 - n) * step;
      if (dist(next, s.end_xy) <= budget * (1.0 + 1e-12)) {
        pos = next;
        traj.xs[n] = pos.x;
        traj.ys[n] = pos.y;
        continue;
      }
      heading_home = false;
    }
    pos = step_toward(pos, s.end_xy, step);
    traj.xs[n] = pos.x;
    traj.ys[n] = pos.y;
  }
  traj.xs[N + 1] = s.end_xy.x;
  traj.ys[N + 1] = s.end_xy.y;
  return traj;
}

PowerSchedule equal_power(const Scenario& s) { return {std::vector<double>(s.n_slots, s.avg_power)}; }

PlanResult optimize(const Scenario& s, const PlanOptions& options) {
  require_valid(s);
  const std::size_t max_iters = options.max_iters > 0 ? options.max_iters : s.max_iters;

  PlanResult out;
  out.algorithm = Algorithm::robust;
  Trajectory traj = best_effort_trajectory(s);
  PowerSchedule power = equal_power(s);
  double objective = smoothed_objective(traj, power, s);

  auto record = [&](std::size_t iter, StepStatus status, double wall) {
    IterationRecord r;
    r.iter = iter;
    r.objective = objective;
    r.status = status;
    r.wall_ms = wall;
    if (options.keep_snapshots) {
      r.trajectory = traj;
      r.power = power;
    }
    out.iterations.push_back(std::move(r));
  };
  record(0, StepStatus::optimal, 0.0);

  for (std::size_t m = 1; m <= max_iters; ++m) {
    const auto started = std::chrono::steady_clock::now();
    StepStatus status = StepStatus::optimal;
    double inner_prev = objective;
    bool trouble = false;
    for (std::size_t j = 0; j < std::max<std::size_t>(options.inner_max_steps, 1); ++j) {
      SubproblemSolution step = solve_step(traj, power, s, options.solver);
      if (step.status == StepStatus::numerical_trouble) {
        trouble = true;
        out.message = "trajectory step failed at iteration " + std::to_string(m) + ": " + step.message;
        break;
      }
      if (step.status == StepStatus::max_iter) status = StepStatus::max_iter;
      traj = std::move(step.trajectory);
      const bool small = fractional_increase(step.true_objective, inner_prev) < options.inner_epsilon;
      inner_prev = step.true_objective;
      if (small) break;
    }
    if (trouble) {
      out.converged = false;
      break;
    }

    power = optimize_power(traj, s).schedule;
    const double previous = objective;
    objective = smoothed_objective(traj, power, s);
    record(m, status, elapsed_ms(started));
    if (fractional_increase(objective, previous) < s.epsilon) {
      out.converged = true;
      break;
    }
  }

  out.trajectory = std::move(traj);
  out.power = std::move(power);
  out.secrecy_rate = avg_worst_case_secrecy_rate(out.trajectory, out.power, s);
  return out;
}

PlanResult optimize_non_robust(const Scenario& s, const PlanOptions& options) {
  require_valid(s);
  Scenario nominal = s;
  for (auto& e : nominal.eves) e.radius = 0.0;
  PlanResult out = optimize(nominal, options);
  out.algorithm = Algorithm::non_robust;
  out.secrecy_rate = avg_worst_case_secrecy_rate(out.trajectory, out.power, s);
  return out;
}

PlanResult run_best_effort(const Scenario& s) {
  require_valid(s);
  PlanResult out;
  out.algorithm = Algorithm::best_effort;
  out.trajectory = best_effort_trajectory(s);
  out.power = equal_power(s);
  out.secrecy_rate = avg_worst_case_secrecy_rate(out.trajectory, out.power, s);
  out.converged = true;
  return out;
}

PlanResult run_algorithm(Algorithm algorithm, const Scenario& scenario, const PlanOptions& options) {
  switch (algorithm) {
    case Algorithm::robust: return optimize(scenario, options);
    case Algorithm::non_robust: return optimize_non_robust(scenario, options);
    case Algorithm::best_effort: return run_best_effort(scenario);
  }
  throw std::invalid_argument("run_algorithm: unknown algorithm");
}

}  // namespace uavsec
