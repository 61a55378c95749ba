#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "uavsec/geometry.hpp"
#include "uavsec/planner.hpp"
#include "uavsec/verify.hpp"

using namespace uavsec;

namespace {

void check_steps(const Trajectory& t, const Scenario& s) {
  CHECK(check_trajectory(t, s).empty());
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    CHECK(std::hypot(t.xs[i + 1] - t.xs[i], t.ys[i + 1] - t.ys[i]) <= s.step_len() + 1e-9);
}

}  // namespace

TEST_CASE("best-effort trajectory, long flight") {
  const Scenario s = reference_scenario(160.0);
  const Trajectory t = best_effort_trajectory(s);
  check_steps(t, s);
  // 447.21 m each way at 5 m per slot: 90 slots to arrive, 90 to leave.
  std::size_t first = 0, last = 0, hovering = 0;
  for (std::size_t n = 1; n <= s.n_slots; ++n) {
    if (t.xs[n] == 0.0 && t.ys[n] == 0.0) {
      if (first == 0) first = n;
      last = n;
      ++hovering;
    }
  }
  CHECK(first == 90);
  CHECK(hovering == last - first + 1);
  CHECK(std::hypot(400.0, -200.0) <= static_cast<double>(s.n_slots + 1 - last) * 5.0);
  CHECK(std::hypot(400.0, -200.0) > static_cast<double>(s.n_slots - last) * 5.0);
  // About 70.56 s above the receiver.
  CHECK(static_cast<double>(hovering) * s.slot_len == doctest::Approx(70.56).epsilon(0.02));
}

TEST_CASE("best-effort trajectory turns midway on a short flight") {
  const Scenario s = reference_scenario(80.0);
  const Trajectory t = best_effort_trajectory(s);
  check_steps(t, s);
  for (std::size_t n = 1; n <= s.n_slots; ++n) CHECK(std::hypot(t.xs[n], t.ys[n]) > 0.0);

  // Replay the rule: the turn happens after the largest n that still
  // leaves enough slots to reach the end.
  const double step = s.step_len();
  const double d0 = std::hypot(s.start_xy.x, s.start_xy.y);
  std::size_t turn = 0;
  for (std::size_t n = 1; n <= s.n_slots; ++n) {
    const double k = static_cast<double>(n) * step / d0;
    const Vec2 p{s.start_xy.x * (1.0 - k), s.start_xy.y * (1.0 - k)};
    if (std::hypot(p.x - s.end_xy.x, p.y - s.end_xy.y) <=
        static_cast<double>(s.n_slots + 1 - n) * step * (1.0 + 1e-12))
      turn = n;
    else
      break;
  }
  REQUIRE(turn > 0);
  const double k = static_cast<double>(turn) * step / d0;
  CHECK(t.xs[turn] == doctest::Approx(s.start_xy.x * (1.0 - k)));
  CHECK(t.ys[turn] == doctest::Approx(s.start_xy.y * (1.0 - k)));
  // After the turn the UAV heads straight for the end point.
  const Vec2 next = t.at(turn + 1);
  const double before = std::hypot(t.xs[turn] - s.end_xy.x, t.ys[turn] - s.end_xy.y);
  CHECK(std::hypot(next.x - s.end_xy.x, next.y - s.end_xy.y) == doctest::Approx(before - step));
}

TEST_CASE("best-effort trajectory hovers when start and end are the receiver") {
  Scenario s = reference_scenario(10.0);
  s.start_xy = s.end_xy = {0.0, 0.0};
  const Trajectory t = best_effort_trajectory(s);
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t.xs[i] == 0.0);
    CHECK(t.ys[i] == 0.0);
  }
}

TEST_CASE("equal power") {
  Scenario s = reference_scenario(1.5);
  const PowerSchedule p = equal_power(s);
  CHECK(p.p == std::vector<double>(3, s.avg_power));
  CHECK(check_power(p, s).empty());
}

TEST_CASE("algorithm names") {
  CHECK(parse_algorithm("robust") == Algorithm::robust);
  CHECK(parse_algorithm("non-robust") == Algorithm::non_robust);
  CHECK(parse_algorithm("non_robust") == Algorithm::non_robust);
  CHECK(parse_algorithm("best-effort") == Algorithm::best_effort);
  CHECK(std::string(to_string(Algorithm::best_effort)) == "best-effort");
  CHECK_THROWS(parse_algorithm("greedy"));
  CHECK(fractional_increase(1.1, 1.0) == doctest::Approx(0.1));
  CHECK(fractional_increase(1.0, 0.0) == doctest::Approx(1e12));
}

TEST_CASE("robust design is monotone and feasible") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Scenario s = verify::tiny_scenario(seed);
    PlanOptions o;
    o.keep_snapshots = true;
    const PlanResult r = optimize(s, o);
    CHECK(r.converged);
    CHECK(r.iterations.front().iter == 0);
    for (std::size_t i = 1; i < r.iterations.size(); ++i) {
      CHECK(r.iterations[i].objective >= r.iterations[i - 1].objective - 1e-6);
      CHECK(check_trajectory(r.iterations[i].trajectory, s).empty());
      CHECK(check_power(r.iterations[i].power, s).empty());
    }
    CHECK(check_trajectory(r.trajectory, s).empty());
    CHECK(check_power(r.power, s).empty());
    CHECK(r.secrecy_rate >= run_best_effort(s).secrecy_rate - 1e-9);

    bool all_positive = true;
    for (std::size_t n = 0; n < s.n_slots; ++n)
      all_positive = all_positive && secrecy_term(r.trajectory.at(n + 1), s, r.power.p[n]) >= 0.0;
    if (all_positive)
      CHECK(r.secrecy_rate * s.n_slots ==
            doctest::Approx(r.iterations.back().objective).epsilon(1e-9));
  }
}

TEST_CASE("iteration cap is honoured") {
  const Scenario s = verify::tiny_scenario(1);
  PlanOptions o;
  o.max_iters = 1;
  const PlanResult r = optimize(s, o);
  CHECK(r.iterations.size() <= 2);
}

TEST_CASE("zero radii make robust and non-robust identical") {
  Scenario s = verify::tiny_scenario(4);
  for (auto& e : s.eves) e.radius = 0.0;
  const PlanResult a = optimize(s);
  const PlanResult b = optimize_non_robust(s);
  CHECK(a.trajectory.xs == b.trajectory.xs);
  CHECK(a.trajectory.ys == b.trajectory.ys);
  CHECK(a.power.p == b.power.p);
  CHECK(a.secrecy_rate == b.secrecy_rate);
  CHECK(b.algorithm == Algorithm::non_robust);
}

TEST_CASE("non-robust plan is judged under the true radii") {
  const Scenario s = verify::tiny_scenario(5);
  const PlanResult r = optimize_non_robust(s);
  CHECK(r.secrecy_rate == avg_worst_case_secrecy_rate(r.trajectory, r.power, s));
}

TEST_CASE("best effort has no iterations") {
  const Scenario s = verify::tiny_scenario(1);
  const PlanResult r = run_best_effort(s);
  CHECK(r.iterations.empty());
  CHECK(r.converged);
  CHECK(r.algorithm == Algorithm::best_effort);
}

TEST_CASE("optimiser is deterministic") {
  const Scenario s = verify::tiny_scenario(6);
  const PlanResult a = optimize(s);
  const PlanResult b = optimize(s);
  CHECK(a.trajectory.xs == b.trajectory.xs);
  CHECK(a.power.p == b.power.p);
  CHECK(a.secrecy_rate == b.secrecy_rate);
}

TEST_CASE("invalid scenarios are rejected") {
  Scenario s = verify::tiny_scenario(1);
  s.peak_power = s.avg_power;
  CHECK_THROWS_AS(optimize(s), std::invalid_argument);
  CHECK_THROWS_AS(run_best_effort(s), std::invalid_argument);
}
