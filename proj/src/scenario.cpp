#include "uavsec/scenario.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace uavsec {

namespace {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

std::vector<Violation> validate(const Scenario& s) {
  std::vector<Violation> out;
  auto add = [&out](std::string field, std::string message) {
    out.push_back({std::move(field), std::move(message)});
  };

  if (!(s.altitude > 0.0)) add("altitude", "altitude > 0 required");
  if (!(s.slot_len > 0.0)) add("slot_len", "slot_len > 0 required");
  if (!(s.flight_duration > 0.0)) add("flight_duration", "flight_duration > 0 required");
  if (s.n_slots < 1) add("n_slots", "n_slots >= 1 required");
  if (s.slot_len > 0.0 && s.flight_duration > 0.0 && s.n_slots >= 1) {
    const double ratio = s.flight_duration / s.slot_len;
    if (std::abs(ratio - static_cast<double>(s.n_slots)) > 1e-9 * std::max(1.0, ratio))
      add("n_slots", "n_slots must equal flight_duration / slot_len");
  }
  if (!(s.v_max > 0.0)) add("v_max", "v_max > 0 required");
  if (!(s.avg_power > 0.0)) add("avg_power", "avg_power > 0 required");
  if (!(s.avg_power < s.peak_power)) add("peak_power", "avg_power < peak_power required");
  if (!(s.gamma0 > 0.0)) add("gamma0", "gamma0 > 0 required");
  if (!(s.epsilon > 0.0)) add("epsilon", "epsilon > 0 required");
  if (s.max_iters < 1) add("max_iters", "max_iters >= 1 required");
  if (s.eves.empty()) add("eves", "at least one eavesdropper region required");

  for (std::size_t k = 0; k < s.eves.size(); ++k) {
    const EveRegion& e = s.eves[k];
    const std::string field = "eves[" + std::to_string(k) + "]";
    if (!(e.radius >= 0.0)) add(field + ".radius", "radius >= 0 required");
    if (!(e.center_x * e.center_x + e.center_y * e.center_y > e.radius * e.radius))
      add(field, "region must not contain the receiver at the origin");
  }

  if (s.v_max > 0.0 && s.slot_len > 0.0) {
    const double budget = s.step_len() * static_cast<double>(s.n_slots + 1);
    if (distance(s.start_xy, s.end_xy) > budget * (1.0 + 1e-12))
      add("end_xy", "endpoints unreachable within flight duration at v_max");
  }
  return out;
}

void require_valid(const Scenario& scenario) {
  const auto violations = validate(scenario);
  if (violations.empty()) return;
  std::ostringstream os;
  os << "invalid scenario:";
  for (const auto& v : violations) os << " [" << v.field << "] " << v.message << ';';
  throw std::invalid_argument(os.str());
}

std::size_t slot_count(double flight_duration, double slot_len) {
  if (!(flight_duration > 0.0) || !(slot_len > 0.0))
    throw std::invalid_argument("slot_count: flight_duration and slot_len must be positive");
  const double ratio = flight_duration / slot_len;
  const double rounded = std::round(ratio);
  const double eps = std::numeric_limits<double>::epsilon();
  if (rounded < 1.0 || std::abs(ratio - rounded) > 4.0 * eps * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "slot_count: flight_duration / slot_len = " << ratio << " is not a positive integer";
    throw std::invalid_argument(os.str());
  }
  return static_cast<std::size_t>(rounded);
}

Scenario with_duration(Scenario scenario, double flight_duration) {
  scenario.flight_duration = flight_duration;
  scenario.n_slots = slot_count(flight_duration, scenario.slot_len);
  return scenario;
}

std::vector<Violation> check_trajectory(const Trajectory& traj, const Scenario& s) {
  std::vector<Violation> out;
  const std::size_t n = s.n_slots + 2;
  if (traj.xs.size() != n || traj.ys.size() != n) {
    out.push_back({"trajectory", "expected N+2 positions"});
    return out;
  }
  if (traj.xs.front() != s.start_xy.x || traj.ys.front() != s.start_xy.y)
    out.push_back({"trajectory[0]", "start position not pinned"});
  if (traj.xs.back() != s.end_xy.x || traj.ys.back() != s.end_xy.y)
    out.push_back({"trajectory[N+1]", "end position not pinned"});
  const double limit = s.step_len() * s.step_len() + s.tol_mobility();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dx = traj.xs[i + 1] - traj.xs[i];
    const double dy = traj.ys[i + 1] - traj.ys[i];
    if (dx * dx + dy * dy > limit)
      out.push_back({"trajectory[" + std::to_string(i + 1) + "]", "step exceeds v_max * slot_len"});
  }
  return out;
}

std::vector<Violation> check_power(const PowerSchedule& powers, const Scenario& s) {
  std::vector<Violation> out;
  if (powers.p.size() != s.n_slots) {
    out.push_back({"power", "expected N entries"});
    return out;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < powers.p.size(); ++i) {
    const double p = powers.p[i];
    if (!(p >= 0.0) || p > s.peak_power)
      out.push_back({"power[" + std::to_string(i + 1) + "]", "outside [0, peak_power]"});
    sum += p;
  }
  if (sum / static_cast<double>(s.n_slots) > s.avg_power + s.tol_power())
    out.push_back({"power", "mean power exceeds avg_power"});
  return out;
}

double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

Scenario reference_scenario(double flight_duration) {
  Scenario s;
  s.altitude = 100.0;
  s.slot_len = 0.5;
  s.v_max = 10.0;
  s.start_xy = {-400.0, -200.0};
  s.end_xy = {400.0, -200.0};
  s.avg_power = dbm_to_watt(-5.0);
  s.peak_power = 4.0 * s.avg_power;
  s.gamma0 = db_to_linear(80.0);
  s.eves = {{-200.0, 0.0, 20.0}, {200.0, 0.0, 80.0}};
  s.epsilon = 1e-4;
  s.max_iters = 200;
  return with_duration(s, flight_duration);
}

}  // namespace uavsec
