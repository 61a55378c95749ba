#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "uavsec/scenario.hpp"

namespace uavsec::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Closed-form worst-case distance against a sampled minimum over random
/// UAV positions and regions with radius in [0, 100] m.
CheckResult disk_oracle(std::size_t pairs, std::size_t samples, double max_rel_gap,
                        std::uint64_t seed);

/// Rotated-cone test against the eigenvalue test on random arrowhead
/// blocks with a >= 1. Blocks within `boundary_tol` of the boundary are
/// counted but not compared.
CheckResult psd_vs_soc(std::size_t blocks, double boundary_tol, std::uint64_t seed);

/// optimize_power against a per-slot grid search at the returned
/// multiplier, plus the average-power complementary slackness.
CheckResult power_grid(std::size_t instances, std::size_t grid_points, std::uint64_t seed);

/// Small problem used by the step-soundness check: N = 8, K = 2.
Scenario tiny_scenario(std::uint64_t seed);

/// Runs alternating trajectory steps and power updates on tiny scenarios
/// and checks that every accepted step is robustly feasible (sampled
/// worst-case distance >= t - 1e-6) and does not lower the objective by
/// more than 1e-6.
CheckResult sca_steps(std::size_t scenarios, std::size_t steps, std::size_t samples,
                      std::uint64_t seed);

enum class Level { quick, full };

std::vector<CheckResult> run_all(Level level, std::uint64_t seed);

}  // namespace uavsec::verify
