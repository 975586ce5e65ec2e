#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pdim/core.hpp"
#include "pdim/error.hpp"

using namespace pdim;

TEST_SUITE("core") {
  TEST_CASE("family rejects odd or small degrees") {
    CHECK_THROWS_AS(Family(3, 0.0), UsageError);
    CHECK_THROWS_AS(Family(0, 0.0), UsageError);
    CHECK_THROWS_AS(Family(2, INFINITY), UsageError);
  }

  TEST_CASE("identity jet under z^2") {
    const Complex z0(0.3, -0.7);
    const Jet j = evaluate_jet(Family(2, 0.0), Jet::variable(z0, 3));
    CHECK(std::abs(j[0] - z0 * z0) < 1e-15);
    CHECK(std::abs(j[1] - 2.0 * z0) < 1e-15);
    CHECK(std::abs(j[2] - 1.0) < 1e-15);
    CHECK(std::abs(j[3]) < 1e-15);
  }

  TEST_CASE("0 is critical for every even degree") {
    for (int d : {2, 4, 6}) {
      const Jet j = evaluate_jet(Family(d, -0.3), Jet::variable(0.0, 3));
      CHECK(std::abs(j[0] - Complex(-0.3)) < 1e-15);
      CHECK(std::abs(j[1]) == 0.0);
    }
  }

  TEST_CASE("jet derivative of an iterate matches central differences") {
    const Family fam(2, -1.75);
    const Complex z(1.30, 0.01);
    const Jet j = iterate_jet(fam, Jet::variable(z, 3), 3);
    const double h = 1e-5;
    const Complex fd = (iterate(fam, z + h, 3).z - iterate(fam, z - h, 3).z) / (2 * h);
    CHECK(std::abs(j[1] - fd) / std::abs(j[1]) < 1e-6);
  }

  TEST_CASE("rotation and real symmetry of evaluate") {
    for (int d : {2, 4}) {
      const Family fam(d, -1.1);
      const Complex zeta = std::polar(1.0, 2 * std::numbers::pi / d);
      for (Complex z : {Complex(0.3, 0.4), Complex(-1.2, 0.05), Complex(0.01, -0.9)}) {
        CHECK(std::abs(evaluate(fam, zeta * z) - evaluate(fam, z)) < 1e-14);
        CHECK(std::abs(evaluate(fam, std::conj(z)) - std::conj(evaluate(fam, z))) < 1e-15);
      }
    }
  }

  TEST_CASE("iterate stops at the escape ceiling") {
    const auto r = iterate(Family(2, 0.0), 3.0, 1000);
    CHECK(r.escaped);
    CHECK(r.steps < 1000);
  }

  TEST_CASE("find_cycle: superattracting fixed point of z^2") {
    const auto cyc = find_cycle(Family(2, 0.0), 1, 0.1);
    CHECK(std::abs(cyc.points[0]) < 1e-12);
    CHECK(std::abs(cyc.multiplier) < 1e-12);
  }

  TEST_CASE("find_cycle: parabolic fixed point at c = 1/4") {
    const auto cyc = find_cycle(Family(2, 0.25), 1, 0.4);
    // double root: Newton converges linearly and resolves z to about sqrt(eps)
    CHECK(std::abs(cyc.points[0] - 0.5) < 1e-6);
    CHECK(std::abs(cyc.multiplier - 1.0) < 1e-4);
  }

  TEST_CASE("find_cycle: period-3 cycle at c = -7/4 against the closed form") {
    const auto cyc = find_cycle(Family(2, -1.75), 3, 1.3);
    REQUIRE(cyc.points.size() == 3);
    // cycle points are 2cos((2m+1)pi/7) - 1/2
    for (const Complex p : cyc.points) {
      double best = INFINITY;
      for (int m = 0; m < 3; ++m) best = std::min(best, std::abs(p - (2 * std::cos((2 * m + 1) * std::numbers::pi / 7) - 0.5)));
      CHECK(best < 1e-6);
    }
    CHECK(std::abs(cyc.multiplier - 1.0) < 1e-4);
  }

  TEST_CASE("find_cycle reports a smaller minimal period") {
    // for c > -3/4 every root of f^2(z) = z is a fixed point
    const Family fam(2, -0.5);
    const double fixed = 0.5 * (1 - std::sqrt(3.0));
    try {
      find_cycle(fam, 2, fixed + 1e-3);
      FAIL("expected PeriodError");
    } catch (const PeriodError& e) {
      CHECK(e.period() == 1);
    }
  }
}
