#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uavsec/scenario.hpp"

namespace uavsec {

/// Per-slot worst-case eavesdropper geometry and the rate coefficients
/// derived from it. theta and d_center are indexed [k][n], alpha and beta
/// by slot n (zero-based, slot 1..N).
struct WorstCaseGeometry {
  std::vector<std::vector<double>> theta;
  std::vector<std::vector<double>> d_center;
  std::vector<double> alpha;
  std::vector<double> beta;
};

/// Minimum squared 3-D distance from a UAV at `uav` (altitude H) to any
/// point of the eavesdropper's uncertainty disk.
double worst_case_dist_sq(Vec2 uav, const EveRegion& eve, double altitude);

/// Same quantity estimated by minimising over `n_samples` points of a
/// seeded sunflower layout covering the closed disk. Always >= the closed
/// form. Sample 0 is the center; about 2 sqrt(n) samples lie on the
/// boundary, including the last one.
double worst_case_dist_sq_oracle(Vec2 uav, const EveRegion& eve, double altitude,
                                 std::size_t n_samples, std::uint64_t seed);

/// Deterministic sunflower samples of the disk, used by the oracle and by
/// robustness checks.
std::vector<Vec2> disk_samples(const EveRegion& eve, std::size_t n_samples, std::uint64_t seed);

double min_worst_case_dist_sq(Vec2 uav, std::span<const EveRegion> eves, double altitude);

/// log2(1 + gamma0 P / (x^2 + y^2 + H^2)).
double rate_bob(Vec2 uav, double altitude, double gamma0, double power);

/// Largest eavesdropper rate over all regions and all positions inside them.
double worst_case_rate_eves(Vec2 uav, std::span<const EveRegion> eves, double altitude,
                            double gamma0, double power);

/// Per-slot secrecy term rate_bob - worst_case_rate_eves, not clamped.
double secrecy_term(Vec2 uav, const Scenario& scenario, double power);

/// Average over slots of the clamped secrecy term; the reported metric.
double avg_worst_case_secrecy_rate(const Trajectory& traj, const PowerSchedule& powers,
                                   const Scenario& scenario);

/// Sum over slots of the unclamped secrecy term. This is the objective the
/// optimizers maximise; same optimal solutions as the clamped form.
double smoothed_objective(const Trajectory& traj, const PowerSchedule& powers,
                          const Scenario& scenario);

WorstCaseGeometry rate_coefficients(const Trajectory& traj, const Scenario& scenario);

}  // namespace uavsec
