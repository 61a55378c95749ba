#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "uavsec/convex_backend.hpp"
#include "uavsec/scenario.hpp"

namespace uavsec {

/// Slack variables of the trajectory sub-problem at a given trajectory:
/// u[n] >= x^2 + y^2 + H^2, t[n] <= worst-case squared eavesdropper
/// distance, xi[k][n] >= 0 the S-procedure multipliers.
struct ScaSlacks {
  std::vector<double> u;
  std::vector<double> t;
  std::vector<std::vector<double>> xi;
};

/// u tight, t equal to the closed-form worst case, and xi the multiplier
/// maximising the smallest eigenvalue margin of each S-procedure block
/// (zero for zero-radius regions).
ScaSlacks initialize_slacks(const Trajectory& traj, const Scenario& scenario);

/// First-order lower bound of log2(1 + P_n / u) around u_fea.
double taylor_rate_surrogate(double u, double u_fea, double p_scaled);

inline constexpr std::size_t kNoVar = std::numeric_limits<std::size_t>::max();

/// Where each slot's quantities live in the solver vector. kNoVar marks a
/// quantity held constant for this step.
struct SlotVars {
  std::size_t x = kNoVar;
  std::size_t y = kNoVar;
  std::size_t u = kNoVar;
  std::size_t t = kNoVar;
  std::vector<std::size_t> xi;
  /// Slot transmits (P_n > 0); otherwise only its position is a variable.
  bool active = false;
  /// Expansion point lies inside an uncertainty disk: the linearised
  /// feasible set leaves no freedom, position and t are held fixed.
  bool pinned = false;
};

/// The convex trajectory step in solver units (lengths divided by
/// length_scale = H). Its objective is the surrogate sum over slots.
struct ScaProgram {
  cvx::ConvexProgram program;
  std::vector<SlotVars> slots;
  double length_scale = 1.0;
  std::size_t mobility_constraints = 0;
  std::size_t u_constraints = 0;
  std::size_t cone_blocks = 0;
  std::size_t distance_constraints = 0;
  std::size_t bound_constraints = 0;
};

ScaProgram assemble(const Trajectory& traj_fea, const std::vector<double>& u_fea,
                    const PowerSchedule& powers, const Scenario& scenario);

enum class StepStatus { optimal, max_iter, numerical_trouble };

const char* to_string(StepStatus status);

struct SubproblemSolution {
  Trajectory trajectory;
  ScaSlacks slacks;
  /// Surrogate objective at the new point (sum over slots, bps/Hz).
  double surrogate_objective = 0.0;
  /// Unclamped secrecy objective at the new trajectory for the given power.
  double true_objective = 0.0;
  /// Same quantity at the expansion point.
  double expansion_objective = 0.0;
  StepStatus status = StepStatus::numerical_trouble;
  std::size_t newton_iterations = 0;
  std::string message;
};

SubproblemSolution solve_step(const Trajectory& traj_fea, const std::vector<double>& u_fea,
                              const PowerSchedule& powers, const Scenario& scenario,
                              const cvx::SolverSettings& settings = {});

/// Expands around traj_fea with u_fea tight.
SubproblemSolution solve_step(const Trajectory& traj_fea, const PowerSchedule& powers,
                              const Scenario& scenario, const cvx::SolverSettings& settings = {});

}  // namespace uavsec
