#include <doctest.h>

#include <cmath>

#include "uavsec/convex_backend.hpp"

using namespace uavsec::cvx;

TEST_CASE("monotone log objective hits its upper bound") {
  ConvexProgram p;
  p.num_vars = 1;
  p.linear = {0.0};
  p.log_terms = {{0, 1.0}};
  p.linear_cons = {{{{{0, 1.0}}, -1.0}}, {{{{0, -1.0}}, 4.0}}};  // 1 <= t <= 4
  p.initial = {2.0};
  const SolverResult r = solve(p);
  REQUIRE(r.status == SolverStatus::optimal);
  CHECK(r.z[0] == doctest::Approx(4.0).epsilon(1e-7));
  CHECK(r.objective == doctest::Approx(-std::log2(1.25)).epsilon(1e-7));
}

TEST_CASE("projection onto a quadratic bound") {
  // maximise -u  s.t.  3^2 + 4^2 + 1 <= u
  ConvexProgram p;
  p.num_vars = 1;
  p.linear = {-1.0};
  p.norm_cons = {{{{{}, 3.0}, {{}, 4.0}}, {{{0, 1.0}}, -1.0}}};
  p.initial = {0.0};
  const SolverResult r = solve(p);
  REQUIRE(r.status == SolverStatus::optimal);
  CHECK(r.z[0] == doctest::Approx(26.0).epsilon(1e-7));
  CHECK(r.primal_residual <= 1e-8);
}

TEST_CASE("rotated cone with an infeasible start") {
  // maximise x + y  s.t.  x^2 + y^2 <= 1 * d,  d <= 2
  ConvexProgram p;
  p.num_vars = 3;
  p.linear = {1.0, 1.0, 0.0};
  p.cones = {{{{}, 1.0}, {{{2, 1.0}}, 0.0}, {{{{0, 1.0}}, 0.0}, {{{1, 1.0}}, 0.0}}}};
  p.linear_cons = {{{{{2, -1.0}}, 2.0}}};
  p.initial = {5.0, -3.0, -1.0};
  const SolverResult r = solve(p);
  REQUIRE(r.status == SolverStatus::optimal);
  CHECK(r.z[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.z[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("infeasible program is not reported optimal") {
  // x >= 1 and x <= 0
  ConvexProgram p;
  p.num_vars = 1;
  p.linear = {1.0};
  p.linear_cons = {{{{{0, 1.0}}, -1.0}}, {{{{0, -1.0}}, 0.0}}};
  p.initial = {0.5};
  const SolverResult r = solve(p);
  CHECK(r.status != SolverStatus::optimal);
}

TEST_CASE("deterministic") {
  ConvexProgram p;
  p.num_vars = 2;
  p.linear = {1.0, -0.5};
  p.log_terms = {{1, 3.0}};
  p.norm_cons = {{{{{{0, 1.0}}, 0.0}}, {{{1, 1.0}}, -1.0}}};
  p.linear_cons = {{{{{1, -1.0}}, 10.0}}};
  p.initial = {0.0, 2.0};
  const SolverResult a = solve(p);
  const SolverResult b = solve(p);
  CHECK(a.z == b.z);
  CHECK(a.objective == b.objective);
  CHECK(a.status == SolverStatus::optimal);
}

TEST_CASE("objective and violation helpers") {
  ConvexProgram p;
  p.num_vars = 2;
  p.linear = {1.0, 2.0};
  p.constant = 0.5;
  p.log_terms = {{1, 1.0}};
  p.linear_cons = {{{{{0, 1.0}}, 0.0}}};
  const std::vector<double> z{-0.25, 1.0};
  CHECK(p.objective(z) == doctest::Approx(-0.25 + 2.0 + 0.5 - 1.0));
  CHECK(p.max_violation(z) == doctest::Approx(0.25));
  CHECK(p.num_constraints() == 1);
}
