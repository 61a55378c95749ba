#pragma once

#include <cstddef>
#include <span>

#include "uavsec/scenario.hpp"

namespace uavsec {

/// Result of the power sub-problem: the average-power multiplier and the
/// schedule it induces.
struct PowerDual {
  double lambda = 0.0;
  PowerSchedule schedule;
  double avg_used = 0.0;
  std::size_t iterations = 0;
};

inline constexpr double kLambdaTol = 1e-15;
inline constexpr double kPowerRelTol = 1e-12;

/// Maximiser of log2(1 + alpha P) - log2(1 + beta P) - lambda P over
/// [0, peak]. lambda = 0 is handled as the saturating limit.
double power_for_dual(double alpha, double beta, double lambda, double peak);

/// Optimal schedule for fixed rate coefficients under the average and peak
/// power constraints; lambda is found by bisection.
PowerDual optimize_power(std::span<const double> alpha, std::span<const double> beta,
                         double avg_power, double peak_power);

PowerDual optimize_power(const Trajectory& traj, const Scenario& scenario);

/// Sum over slots of log2(1 + alpha P) - log2(1 + beta P).
double power_objective(std::span<const double> alpha, std::span<const double> beta,
                       std::span<const double> powers);

}  // namespace uavsec
