#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "uavsec/convex_backend.hpp"
#include "uavsec/scenario.hpp"
#include "uavsec/trajectory_sca.hpp"

namespace uavsec {

enum class Algorithm { robust, non_robust, best_effort };

const char* to_string(Algorithm algorithm);
/// Accepts "robust", "non-robust"/"non_robust", "best-effort"/"best_effort".
Algorithm parse_algorithm(const std::string& name);

struct IterationRecord {
  std::size_t iter = 0;
  /// Unclamped objective summed over slots (no 1/N).
  double objective = 0.0;
  Trajectory trajectory;
  PowerSchedule power;
  StepStatus status = StepStatus::optimal;
  double wall_ms = 0.0;
};

struct PlanResult {
  Algorithm algorithm = Algorithm::robust;
  Trajectory trajectory;
  PowerSchedule power;
  std::vector<IterationRecord> iterations;
  /// Average worst-case secrecy rate (clamped per slot, averaged).
  double secrecy_rate = 0.0;
  bool converged = false;
  std::string message;
};

struct PlanOptions {
  /// Overrides scenario.max_iters when non-zero.
  std::size_t max_iters = 0;
  /// Trajectory solves per outer iteration; 1 follows the outer loop
  /// literally (one linearised solve, then a power update).
  std::size_t inner_max_steps = 1;
  /// Stop the inner loop early when its fractional improvement drops below
  /// this value; only used when inner_max_steps > 1.
  double inner_epsilon = 1e-4;
  cvx::SolverSettings solver;
  /// Keep trajectory/power snapshots in each IterationRecord.
  bool keep_snapshots = false;
};

/// Fly toward the point above the receiver at full speed, hover, and leave
/// at the last slot from which the end point is still reachable. When the
/// receiver cannot be reached in time the UAV turns toward the end point
/// at the latest feasible slot.
Trajectory best_effort_trajectory(const Scenario& scenario);

PowerSchedule equal_power(const Scenario& scenario);

/// Alternating power / trajectory optimisation of the robust design.
PlanResult optimize(const Scenario& scenario, const PlanOptions& options = {});

/// Design with all uncertainty radii set to zero, evaluated under the true
/// radii.
PlanResult optimize_non_robust(const Scenario& scenario, const PlanOptions& options = {});

PlanResult run_best_effort(const Scenario& scenario);

PlanResult run_algorithm(Algorithm algorithm, const Scenario& scenario,
                         const PlanOptions& options = {});

/// |obj - prev| / max(|prev|, 1e-12)
double fractional_increase(double obj, double prev);

}  // namespace uavsec
