#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pdim/error.hpp"
#include "reference.hpp"

using namespace pdim;

TEST_SUITE("ifs") {
  TEST_CASE("base ball of the quadratic instance") {
    const auto& sys = *ref::quadratic().ifs;
    CHECK(sys.ball().radius == 0.0078125);
    CHECK(sys.ball().enlarged_radius > sys.ball().radius);
    CHECK(sys.ball().postcritical_distance > 2 * sys.ball().radius);
    CHECK(sys.n0() == 1);
  }

  TEST_CASE("base ball is stable under the critical orbit length") {
    const auto& ev = *ref::quadratic().ev;
    const auto a = choose_base_ball(ev, 500);
    const auto b = choose_base_ball(ev, 2000);
    CHECK(a.radius == b.radius);
  }

  TEST_CASE("h inverts f^j o g_sigma") {
    const auto& in = ref::quadratic();
    const auto& h = in.ifs->h();
    const double rho = 0.5 * h.radius();
    int checked = 0;
    for (int i = 0; i < 24; ++i) {
      const Complex zeta = in.pd.alpha + std::polar(rho, 2 * std::numbers::pi * (i + 0.5) / 24);
      if (!h.in_domain(zeta)) continue;
      const auto v = h.eval_d(zeta);
      CHECK(std::abs(h.forward(v.value) - zeta) < 1e-9);
      double arg = std::arg(v.value * std::polar(1.0, -h.sector_start()));
      if (arg < 0) arg += 2 * std::numbers::pi;
      CHECK(arg < std::numbers::pi + 1e-9);  // V* has opening 2pi/d
      ++checked;
    }
    CHECK(checked > 12);
    CHECK_FALSE(h.in_domain(in.pd.alpha + in.pd.orientation * rho));
  }

  TEST_CASE("h is Holder of exponent 1/d at alpha") {
    const auto& in = ref::quadratic();
    const auto& h = in.ifs->h();
    const Complex dir = std::polar(1.0, 2.0);
    const double r1 = 1e-4, r2 = 1e-6;
    const double v1 = std::abs(h(in.pd.alpha + r1 * dir)), v2 = std::abs(h(in.pd.alpha + r2 * dir));
    CHECK(std::log(v1 / v2) / std::log(r1 / r2) == doctest::Approx(0.5).epsilon(1e-2));
  }

  TEST_CASE("derivative law on the (20, 20) window") {
    const auto& sys = *ref::quadratic().ifs;
    const auto branches = sys.build_window(20, 20);
    const auto sep = separation_check(branches, sys.ball());
    CHECK(sep.valid());
    CHECK(sep.count == branches.size());
    const auto law = derivative_law(branches, sys.label_step(), 2);
    CHECK(law.c1_fitted < 10);
    CHECK(law.distortion < 4);
  }

  TEST_CASE("branch images lie in B0 and contract") {
    const auto& sys = *ref::quadratic().ifs;
    for (auto [n, r] : {std::pair{1, 0}, std::pair{3, -2}, std::pair{5, 4}}) {
      const auto br = sys.build_branch(n, r);
      CHECK(br.deriv_max < 1);
      CHECK(br.deriv_min <= br.deriv_max);
      CHECK(std::abs(br.image_center) + br.image_radius < sys.ball().radius);
      const Complex p = sys.fixed_point(n, r);
      CHECK(std::abs(sys.apply(n, r, p) - p) < 1e-12);
      CHECK(std::abs(p - br.image_center) <= br.image_radius);
    }
  }

  TEST_CASE("single branch window") {
    const auto& sys = *ref::quadratic().ifs;
    const auto window = sys.build_window(1, 0);
    REQUIRE(window.size() == 1);
    CHECK(separation_check(window, sys.ball()).valid());
  }

  TEST_CASE("overlapping images are reported") {
    const auto& sys = *ref::quadratic().ifs;
    auto b = sys.build_branch(1, 0);
    std::vector<IfsBranch> twice{b, b};
    CHECK_FALSE(separation_check(twice, sys.ball()).disjoint);
  }
}
