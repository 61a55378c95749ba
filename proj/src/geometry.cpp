#include "uavsec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace uavsec {

double worst_case_dist_sq(Vec2 uav, const EveRegion& eve, double altitude) {
  const double d = std::hypot(uav.x - eve.center_x, uav.y - eve.center_y);
  const double h2 = altitude * altitude;
  if (d <= eve.radius) return h2;
  const double gap = d - eve.radius;
  return gap * gap + h2;
}

std::vector<Vec2> disk_samples(const EveRegion& eve, std::size_t n_samples, std::uint64_t seed) {
  std::vector<Vec2> out;
  out.reserve(n_samples);
  if (n_samples == 0) return out;
  // Golden-angle spiral for the interior, rotated by a seeded offset, plus
  // about 2 sqrt(n) evenly spaced points on the boundary circle.
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::mt19937_64 rng(seed);
  const double offset = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
  const std::size_t n_rim =
      std::min(n_samples - 1, static_cast<std::size_t>(std::lround(2.0 * std::sqrt(n_samples))));
  const std::size_t n_inner = n_samples - n_rim;
  for (std::size_t i = 0; i < n_inner; ++i) {
    const double r = eve.radius * std::sqrt(static_cast<double>(i) / static_cast<double>(n_inner));
    const double phi = offset + golden * static_cast<double>(i);
    out.push_back({eve.center_x + r * std::cos(phi), eve.center_y + r * std::sin(phi)});
  }
  for (std::size_t j = 0; j < n_rim; ++j) {
    const double phi = offset + 2.0 * std::numbers::pi * static_cast<double>(j) /
                                    static_cast<double>(n_rim);
    out.push_back({eve.center_x + eve.radius * std::cos(phi),
                   eve.center_y + eve.radius * std::sin(phi)});
  }
  return out;
}

double worst_case_dist_sq_oracle(Vec2 uav, const EveRegion& eve, double altitude,
                                 std::size_t n_samples, std::uint64_t seed) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2 q : disk_samples(eve, std::max<std::size_t>(n_samples, 1), seed)) {
    const double dx = uav.x - q.x;
    const double dy = uav.y - q.y;
    best = std::min(best, dx * dx + dy * dy + altitude * altitude);
  }
  return best;
}

double min_worst_case_dist_sq(Vec2 uav, std::span<const EveRegion> eves, double altitude) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& e : eves) best = std::min(best, worst_case_dist_sq(uav, e, altitude));
  return best;
}

double rate_bob(Vec2 uav, double altitude, double gamma0, double power) {
  const double d2 = uav.x * uav.x + uav.y * uav.y + altitude * altitude;
  return std::log2(1.0 + gamma0 * power / d2);
}

double worst_case_rate_eves(Vec2 uav, std::span<const EveRegion> eves, double altitude,
                            double gamma0, double power) {
  if (eves.empty()) return 0.0;
  return std::log2(1.0 + gamma0 * power / min_worst_case_dist_sq(uav, eves, altitude));
}

double secrecy_term(Vec2 uav, const Scenario& s, double power) {
  return rate_bob(uav, s.altitude, s.gamma0, power) -
         worst_case_rate_eves(uav, s.eves, s.altitude, s.gamma0, power);
}

double avg_worst_case_secrecy_rate(const Trajectory& traj, const PowerSchedule& powers,
                                   const Scenario& s) {
  double sum = 0.0;
  for (std::size_t n = 0; n < s.n_slots; ++n)
    sum += std::max(0.0, secrecy_term(traj.at(n + 1), s, powers.p[n]));
  return sum / static_cast<double>(s.n_slots);
}

double smoothed_objective(const Trajectory& traj, const PowerSchedule& powers, const Scenario& s) {
  double sum = 0.0;
  for (std::size_t n = 0; n < s.n_slots; ++n) sum += secrecy_term(traj.at(n + 1), s, powers.p[n]);
  return sum;
}

WorstCaseGeometry rate_coefficients(const Trajectory& traj, const Scenario& s) {
  const std::size_t N = s.n_slots;
  const std::size_t K = s.eves.size();
  const double h2 = s.altitude * s.altitude;
  WorstCaseGeometry g;
  g.theta.assign(K, std::vector<double>(N));
  g.d_center.assign(K, std::vector<double>(N));
  g.alpha.resize(N);
  g.beta.resize(N);
  for (std::size_t n = 0; n < N; ++n) {
    const Vec2 p = traj.at(n + 1);
    double theta_min = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
      const EveRegion& e = s.eves[k];
      g.d_center[k][n] = std::hypot(p.x - e.center_x, p.y - e.center_y);
      g.theta[k][n] = worst_case_dist_sq(p, e, s.altitude);
      theta_min = std::min(theta_min, g.theta[k][n]);
    }
    g.alpha[n] = s.gamma0 / (p.x * p.x + p.y * p.y + h2);
    g.beta[n] = s.gamma0 / theta_min;
  }
  return g;
}

}  // namespace uavsec
