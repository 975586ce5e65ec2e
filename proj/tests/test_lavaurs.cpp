#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pdim/checks.hpp"
#include "pdim/error.hpp"
#include "reference.hpp"

using namespace pdim;

TEST_SUITE("lavaurs") {
  TEST_CASE("frozen phase of the quadratic instance") {
    const auto& in = ref::quadratic();
    CHECK(in.sol.j == 1);
    CHECK(in.sol.sigma == doctest::Approx(-0.44051186549).epsilon(1e-8));
    CHECK(in.sol.x_target == doctest::Approx(-1.3019).epsilon(1e-4));
    CHECK(in.sol.residual < 1e-8);
    CHECK(std::abs(in.lav->eval(0.0) - in.sol.x_target) < 1e-8);
  }

  TEST_CASE("frozen phase of the quartic instance") {
    const auto& in = ref::quartic();
    CHECK(in.sol.sigma == doctest::Approx(-0.5013271305838).epsilon(1e-8));
    CHECK(in.sol.residual < 1e-8);
  }

  TEST_CASE("phase is defined modulo 1") {
    const auto& in = ref::quadratic();
    const LavaursMap shifted(in.ev, in.sol.sigma + 1);
    for (Complex z : {Complex(0.0), Complex(0.02, 0.01), Complex(-0.03, 0.0)}) {
      const Complex g = in.lav->eval(z);
      CHECK(std::abs(shifted.eval(z) - in.ev->map().apply(g)) < 1e-8);
    }
  }

  TEST_CASE("g_sigma is real on the real axis and commutes with conjugation") {
    const auto& in = ref::quadratic();
    for (double x : {-0.04, 0.0, 0.03}) CHECK(std::abs(in.lav->eval(x).imag()) < 1e-10);
    const Complex z(0.02, 0.015);
    CHECK(std::abs(in.lav->eval(std::conj(z)) - std::conj(in.lav->eval(z))) < 1e-10);
  }

  TEST_CASE("critical point of g_sigma at 0") {
    CHECK(critical_derivative(*ref::quadratic().lav) < 1e-6);
    CHECK(critical_derivative(*ref::quartic().lav) < 1e-6);
  }

  TEST_CASE("extension agrees with g_sigma on the immediate component") {
    const auto& in = ref::quadratic();
    const Complex z(0.01, 0.02);
    const auto e = in.lav->extend(z);
    CHECK(e.landing == 0);
    CHECK(std::abs(e.value - in.lav->eval(z)) < 1e-12);
    // a point one f-step before the component
    const auto fam = in.pd.family();
    Complex pre = std::sqrt(z - in.pd.c0);
    if (in.ev->landing_time(pre, in.lav->landing_budget()).steps != 1) pre = -pre;
    const auto e1 = in.lav->extend(pre);
    CHECK(e1.landing == 1);
    CHECK(std::abs(evaluate(fam, pre) - z) < 1e-12);
    CHECK(std::abs(e1.value - e.value) < 1e-10);
  }

  TEST_CASE("escaping points are rejected") {
    const auto& in = ref::quadratic();
    CHECK_THROWS_AS(in.lav->extend(Complex(1.0, 1.0)), EscapeError);
    CHECK_THROWS_AS(in.lav->eval(Complex(1.0, 1.0)), EscapeError);
    CHECK_THROWS_AS(in.lav->eval(in.pd.alpha - 0.3 * in.pd.orientation), DomainError);
  }

  TEST_CASE("inverse branch G") {
    const auto& in = ref::quadratic();
    CHECK(inverse_round_trip(*in.lav, 50, 3) < 1e-8);
    const auto horn = horn_translation(*in.lav);
    CHECK(horn.error < 1e-3);
    CHECK(std::abs(horn.translation.real() - in.sol.sigma) < 1e-3);
    CHECK(std::abs(horn.translation.imag() + in.pd.A * std::numbers::pi) < 1e-3);
    CHECK_THROWS_AS(in.lav->inverse_branch(in.ev->approx_coord_inv(Complex(40, -5))), DomainError);
  }

  TEST_CASE("G iterates converge to alpha") {
    const auto& in = ref::quadratic();
    Complex z = in.ev->approx_coord_inv(Complex(30, 30));
    double prev = std::abs(z - in.pd.alpha);
    for (int n = 0; n < 6; ++n) {
      z = in.lav->inverse_branch(z);
      const double dist = std::abs(z - in.pd.alpha);
      CHECK(dist < prev);
      prev = dist;
    }
  }

  TEST_CASE("find_sigma is sorted by depth and validates j_max") {
    const auto sols = find_sigma(ref::quadratic().ev, 3);
    REQUIRE(!sols.empty());
    for (std::size_t i = 1; i < sols.size(); ++i) CHECK(sols[i - 1].j <= sols[i].j);
    for (const auto& s : sols) CHECK(s.residual < 1e-8);
    CHECK_THROWS_AS(find_sigma(ref::quadratic().ev, 0), UsageError);
  }

  TEST_CASE("implosion: f^{kN} approaches g_sigma as N grows") {
    const auto run = implosion_run(*ref::quadratic().lav, {50, 100, 200});
    for (const auto& f : run.fits) CHECK(f.epsilon > 0);
    CHECK(run.defects[1] < run.defects[0]);
    CHECK(run.defects[2] < run.defects[1]);
    CHECK(run.slope > -2.2);
    CHECK(run.slope < -1.8);
    CHECK_THROWS_AS(implosion_fit(*ref::quadratic().lav, 0, 0.0), UsageError);
  }
}
