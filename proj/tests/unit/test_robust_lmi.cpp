#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "uavsec/geometry.hpp"
#include "uavsec/robust_lmi.hpp"

using namespace uavsec;

namespace {

const EveRegion kEve1{-200.0, 0.0, 20.0};

}  // namespace

TEST_CASE("exact_c") {
  CHECK(exact_c(-200.0, 0.0, 1e4, kEve1, 100.0) == doctest::Approx(0.0));
  CHECK(exact_c(0.0, 0.0, 1e4, kEve1, 100.0) == doctest::Approx(40000.0));
  CHECK(exact_c(37.0, -12.0, 5e3, kEve1, 100.0) + 5e3 - 1e4 ==
        doctest::Approx(237.0 * 237.0 + 144.0));
}

TEST_CASE("linearized_c") {
  CHECK(linearized_c(15.0, -7.0, 2e4, 15.0, -7.0, kEve1, 100.0) ==
        doctest::Approx(exact_c(15.0, -7.0, 2e4, kEve1, 100.0)));
  // x_fea = 0: the x^2 term linearises to 0.
  const double direct = 0.0 - 2.0 * (-200.0) * 10.0 + 40000.0 + 0.0 + 1e4 - 1e4;
  CHECK(linearized_c(10.0, 0.0, 1e4, 0.0, 0.0, kEve1, 100.0) == doctest::Approx(direct));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-300.0, 300.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng), y = u(rng), xf = u(rng), yf = u(rng);
    CHECK(linearized_c(x, y, 1e4, xf, yf, kEve1, 100.0) <= exact_c(x, y, 1e4, kEve1, 100.0) + 1e-9);
  }
}

TEST_CASE("psd_check examples") {
  CHECK(psd_check(1.0, 0.0, 0.0, 0.0));
  CHECK_FALSE(psd_check(1.0, 1.0, 0.0, 0.5));
  CHECK(psd_check(2.0, 1.0, 1.0, 1.0));
  CHECK_FALSE(psd_check(-1.0, 0.0, 0.0, 1.0));
}

TEST_CASE("rotated cone form") {
  AffineSym3 m;
  m.m00 = {{{0, 1.0}}, 1.0};
  m.m11 = {{{0, 1.0}}, 1.0};
  m.m02 = {{{1, -1.0}}, 3.0};
  m.m12 = {{}, 0.0};
  m.m22 = {{{2, 1.0}}, 0.0};
  const cvx::RotatedCone cone = as_rotated_soc(make_lmi_block(m));
  const std::vector<double> z{0.0, 1.0, 4.0};
  CHECK(cone.a.eval(z) == 1.0);
  CHECK(cone.d.eval(z) == 4.0);
  REQUIRE(cone.parts.size() == 2);
  CHECK(cone.parts[0].eval(z) == 2.0);
  CHECK(cone.parts[1].eval(z) == 0.0);

  // Boundary case a = 1, d = b^2 + c^2 is feasible both ways.
  CHECK(psd_check(1.0, 3.0, 4.0, 25.0));
}

TEST_CASE("non-arrowhead blocks are rejected") {
  AffineSym3 m;
  m.m00 = {{{0, 1.0}}, 1.0};
  m.m11 = {{{0, 1.0}}, 2.0};
  CHECK_THROWS_AS(make_lmi_block(m), std::logic_error);
  AffineSym3 off;
  off.m00 = {{}, 1.0};
  off.m11 = {{}, 1.0};
  off.m01 = {{{0, 1.0}}, 0.0};
  CHECK_THROWS_AS(make_lmi_block(off), std::logic_error);
  // Same expression written with terms in another order is accepted.
  AffineSym3 ok;
  ok.m00 = {{{0, 1.0}, {1, 2.0}}, 1.0};
  ok.m11 = {{{1, 1.0}, {0, 1.0}, {1, 1.0}}, 1.0};
  CHECK_NOTHROW(make_lmi_block(ok));
}

TEST_CASE("linearised block implies the exact block") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> pos(-300.0, 300.0);
  std::uniform_real_distribution<double> tt(1e4, 1.5e5);
  std::uniform_real_distribution<double> xi(0.0, 5.0);
  const EveRegion eve{-200.0, 30.0, 40.0};
  int feasible = 0;
  for (int i = 0; i < 10000; ++i) {
    const double x = pos(rng), y = pos(rng), t = tt(rng), s = xi(rng);
    const double xf = x + pos(rng) / 10.0, yf = y + pos(rng) / 10.0;
    const auto lin = s_procedure_matrix_linearized(x, y, t, s, xf, yf, eve, 100.0);
    if (!psd_check(lin.a, lin.b, lin.c, lin.d)) continue;
    ++feasible;
    const auto ex = s_procedure_matrix(x, y, t, s, eve, 100.0);
    CHECK(psd_check(ex.a, ex.b, ex.c, ex.d));
  }
  CHECK(feasible > 100);
}

TEST_CASE("PSD block means every point of the disk is far enough") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> pos(-300.0, 300.0);
  std::uniform_real_distribution<double> tt(1e4, 1.5e5);
  std::uniform_real_distribution<double> xi(0.0, 5.0);
  const EveRegion eve{150.0, -60.0, 70.0};
  const auto samples = disk_samples(eve, 1000, 1);
  int feasible = 0;
  for (int i = 0; i < 2000; ++i) {
    const double x = pos(rng), y = pos(rng), t = tt(rng), s = xi(rng);
    const auto m = s_procedure_matrix(x, y, t, s, eve, 100.0);
    if (!psd_check(m.a, m.b, m.c, m.d)) continue;
    ++feasible;
    for (const Vec2 q : samples)
      CHECK((x - q.x) * (x - q.x) + (y - q.y) * (y - q.y) + 1e4 >= t - 1e-6);
  }
  CHECK(feasible > 50);
}

TEST_CASE("linearised block at the expansion point matches the S-procedure matrix") {
  const EveRegion eve{-200.0, 0.0, 20.0};
  const LmiBlock block = linearized_block({0, 1, 2, 3}, -50.0, 20.0, eve, 100.0, 1.0);
  const std::vector<double> z{-50.0, 20.0, 3e4, 0.7};
  const auto v = block.eval(z);
  const auto m = s_procedure_matrix(-50.0, 20.0, 3e4, 0.7, eve, 100.0);
  CHECK(v.a == doctest::Approx(m.a));
  CHECK(v.b == doctest::Approx(m.b));
  CHECK(v.c == doctest::Approx(m.c));
  CHECK(v.d == doctest::Approx(m.d));
}
