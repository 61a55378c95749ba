#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "uavsec/geometry.hpp"

using namespace uavsec;

namespace {

const EveRegion kEve1{-200.0, 0.0, 20.0};
const EveRegion kEve2{200.0, 0.0, 80.0};

Scenario hover_scenario() {
  Scenario s = reference_scenario(160.0);
  s.start_xy = {0.0, 0.0};
  s.end_xy = {0.0, 0.0};
  s.slot_len = 0.5;
  return with_duration(s, 0.5);
}

}  // namespace

TEST_CASE("closed-form worst-case distance") {
  CHECK(worst_case_dist_sq({-200.0, 0.0}, kEve1, 100.0) == doctest::Approx(10000.0));
  CHECK(worst_case_dist_sq({0.0, 0.0}, kEve1, 100.0) == doctest::Approx(42400.0));
  CHECK(worst_case_dist_sq({0.0, 0.0}, kEve2, 100.0) == doctest::Approx(24400.0));
}

TEST_CASE("closed form is continuous across the disk boundary") {
  const double h = 100.0;
  const double inside = worst_case_dist_sq({-200.0 + 20.0 - 1e-12, 0.0}, kEve1, h);
  const double outside = worst_case_dist_sq({-200.0 + 20.0 + 1e-12, 0.0}, kEve1, h);
  CHECK(std::abs(inside - outside) <= 1e-9);
}

TEST_CASE("sampling oracle bounds the closed form") {
  const double closed = 42400.0;
  const double sampled = worst_case_dist_sq_oracle({0.0, 0.0}, kEve1, 100.0, 10000, 3);
  CHECK(sampled >= closed);
  CHECK(sampled <= closed * (1.0 + 5e-3));

  // One sample sits at the center.
  CHECK(worst_case_dist_sq_oracle({0.0, 0.0}, kEve1, 100.0, 1, 3) == doctest::Approx(50000.0));

  // Degenerate disk.
  const EveRegion point{30.0, 40.0, 0.0};
  for (std::size_t n : {1u, 10u, 1000u})
    CHECK(worst_case_dist_sq_oracle({0.0, 0.0}, point, 100.0, n, 9) == doctest::Approx(12500.0));
}

TEST_CASE("disk samples are deterministic and inside the disk") {
  const auto a = disk_samples(kEve2, 500, 11);
  const auto b = disk_samples(kEve2, 500, 11);
  REQUIRE(a.size() == 500);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].y == b[i].y);
    CHECK(std::hypot(a[i].x - kEve2.center_x, a[i].y - kEve2.center_y) <= kEve2.radius * (1 + 1e-12));
  }
  CHECK(a.front().x == kEve2.center_x);
  CHECK(std::hypot(a.back().x - kEve2.center_x, a.back().y - kEve2.center_y) ==
        doctest::Approx(kEve2.radius));
}

TEST_CASE("rates") {
  const double p = 3.162e-4;
  CHECK(rate_bob({0.0, 0.0}, 100.0, 1e8, p) == doctest::Approx(2.057).epsilon(1e-3));
  CHECK(rate_bob({0.0, 0.0}, 100.0, 1e8, 0.0) == 0.0);
  CHECK(rate_bob({300.0, 400.0}, 100.0, 1e8, p) == doctest::Approx(0.1655).epsilon(1e-3));

  const std::vector<EveRegion> eves{kEve1, kEve2};
  CHECK(worst_case_rate_eves({0.0, 0.0}, eves, 100.0, 1e8, p) == doctest::Approx(1.199).epsilon(1e-3));
  CHECK(worst_case_rate_eves({0.0, 0.0}, eves, 100.0, 1e8, 0.0) == 0.0);

  // A zero-radius eavesdropper behaves like a receiver at its center.
  const std::vector<EveRegion> single{{30.0, 40.0, 0.0}};
  CHECK(worst_case_rate_eves({0.0, 0.0}, single, 100.0, 1e8, p) ==
        doctest::Approx(rate_bob({-30.0, -40.0}, 100.0, 1e8, p)));
}

TEST_CASE("average worst-case secrecy rate") {
  const Scenario s = hover_scenario();
  REQUIRE(s.n_slots == 1);
  const Trajectory t{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  CHECK(avg_worst_case_secrecy_rate(t, {{3.162e-4}}, s) == doctest::Approx(0.858).epsilon(2e-3));
  CHECK(avg_worst_case_secrecy_rate(t, {{0.0}}, s) == 0.0);

  // Hovering above an eavesdropper: negative term, clamped to zero.
  Scenario above = s;
  above.start_xy = above.end_xy = {-200.0, 0.0};
  const Trajectory te{{-200.0, -200.0, -200.0}, {0.0, 0.0, 0.0}};
  CHECK(secrecy_term({-200.0, 0.0}, above, 3.162e-4) < 0.0);
  CHECK(avg_worst_case_secrecy_rate(te, {{3.162e-4}}, above) == 0.0);
  CHECK(smoothed_objective(te, {{3.162e-4}}, above) < 0.0);
}

TEST_CASE("secrecy rate properties") {
  Scenario s = reference_scenario(20.0);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pos(-300.0, 300.0);
  Trajectory t;
  t.xs.push_back(s.start_xy.x);
  t.ys.push_back(s.start_xy.y);
  for (std::size_t n = 0; n < s.n_slots; ++n) {
    t.xs.push_back(pos(rng));
    t.ys.push_back(pos(rng));
  }
  t.xs.push_back(s.end_xy.x);
  t.ys.push_back(s.end_xy.y);
  const PowerSchedule p{std::vector<double>(s.n_slots, s.avg_power)};
  const double base = avg_worst_case_secrecy_rate(t, p, s);

  Scenario swapped = s;
  std::swap(swapped.eves[0], swapped.eves[1]);
  CHECK(avg_worst_case_secrecy_rate(t, p, swapped) == base);

  for (double grow : {1.0, 10.0, 50.0}) {
    Scenario bigger = s;
    bigger.eves[0].radius += grow;
    CHECK(avg_worst_case_secrecy_rate(t, p, bigger) <= base);
  }
}

TEST_CASE("rate coefficients") {
  Scenario s = hover_scenario();
  const Trajectory t{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
  const WorstCaseGeometry g = rate_coefficients(t, s);
  CHECK(g.alpha[0] == doctest::Approx(1e4));
  CHECK(g.beta[0] == doctest::Approx(4098.36).epsilon(1e-4));
  CHECK(g.theta[0][0] == doctest::Approx(42400.0));
  CHECK(g.theta[1][0] == doctest::Approx(24400.0));
  CHECK(g.d_center[0][0] == doctest::Approx(200.0));

  s.start_xy = s.end_xy = {-200.0, 0.0};
  const Trajectory above{{-200.0, -200.0, -200.0}, {0.0, 0.0, 0.0}};
  const WorstCaseGeometry ga = rate_coefficients(above, s);
  CHECK(ga.beta[0] == doctest::Approx(1e4));
  CHECK(ga.alpha[0] == doctest::Approx(2000.0));
  CHECK(ga.theta[0][0] == doctest::Approx(1e4));
}
