#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace uavsec {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Estimated ground position of one eavesdropper and the radius of the
/// disk its true position is known to lie in. Coordinates are relative to
/// the legitimate receiver, which sits at the origin.
struct EveRegion {
  double center_x = 0.0;
  double center_y = 0.0;
  double radius = 0.0;
};

/// Immutable problem instance. All lengths in meters, powers in watts,
/// gamma0 is the linear reference SNR per watt at 1 m.
struct Scenario {
  double altitude = 100.0;
  double flight_duration = 0.0;
  double slot_len = 0.0;
  std::size_t n_slots = 0;
  double v_max = 0.0;
  Vec2 start_xy;
  Vec2 end_xy;
  double avg_power = 0.0;
  double peak_power = 0.0;
  double gamma0 = 0.0;
  std::vector<EveRegion> eves;
  double epsilon = 1e-4;
  std::size_t max_iters = 200;

  /// Largest horizontal displacement allowed between consecutive slots.
  double step_len() const { return v_max * slot_len; }
  double tol_mobility() const { return 1e-6 * step_len() * step_len(); }
  double tol_power() const { return 1e-9 * avg_power; }
};

/// Horizontal positions for slots 0..N+1; entries 0 and N+1 are the pinned
/// start and end positions.
struct Trajectory {
  std::vector<double> xs;
  std::vector<double> ys;

  std::size_t size() const { return xs.size(); }
  Vec2 at(std::size_t i) const { return {xs[i], ys[i]}; }
};

/// Transmit power per slot 1..N, stored zero-based.
struct PowerSchedule {
  std::vector<double> p;
};

struct Violation {
  std::string field;
  std::string message;
};

/// Returns every violated invariant of the scenario; empty means valid.
std::vector<Violation> validate(const Scenario& scenario);

/// Throws std::invalid_argument listing all violations.
void require_valid(const Scenario& scenario);

/// Number of slots for a flight of length `flight_duration` split into
/// slots of length `slot_len`. Rejects non-integral ratios.
std::size_t slot_count(double flight_duration, double slot_len);

/// Builds a scenario with n_slots derived from flight_duration/slot_len.
Scenario with_duration(Scenario scenario, double flight_duration);

/// Checks the Trajectory invariants against a scenario (pinned endpoints,
/// length N+2, per-step mobility within tol_mobility).
std::vector<Violation> check_trajectory(const Trajectory& traj, const Scenario& scenario);

/// Checks the PowerSchedule invariants (length N, peak and average bounds).
std::vector<Violation> check_power(const PowerSchedule& powers, const Scenario& scenario);

/// Scenario used in the simulation study: two eavesdroppers at (-200,0)
/// and (200,0) with radii 20 m and 80 m, H = 100 m, v_max = 10 m/s,
/// d_t = 0.5 s, gamma0 = 80 dB, average power -5 dBm, peak = 4x average.
Scenario reference_scenario(double flight_duration = 160.0);

double dbm_to_watt(double dbm);
double db_to_linear(double db);

}  // namespace uavsec
