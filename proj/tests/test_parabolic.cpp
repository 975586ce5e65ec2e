#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pdim/error.hpp"
#include "pdim/fatou.hpp"
#include "pdim/parabolic.hpp"

using namespace pdim;

namespace {

// Plain 2-D Newton on (f^3(z) - z, (f^3)'(z) - 1) with a finite-difference Jacobian.
std::pair<double, double> tangency_oracle(double z, double c) {
  auto residual = [](double z, double c) {
    double x = z, dx = 1;
    for (int i = 0; i < 3; ++i) {
      dx *= 2 * x;
      x = x * x + c;
    }
    return std::pair{x - z, dx - 1};
  };
  for (int it = 0; it < 100; ++it) {
    const auto [g1, g2] = residual(z, c);
    const double h = 1e-7;
    const auto [a1, a2] = residual(z + h, c);
    const auto [b1, b2] = residual(z, c + h);
    const double j11 = (a1 - g1) / h, j21 = (a2 - g2) / h, j12 = (b1 - g1) / h, j22 = (b2 - g2) / h;
    const double det = j11 * j22 - j12 * j21;
    const double dz = (g1 * j22 - j12 * g2) / det, dc = (j11 * g2 - j21 * g1) / det;
    z -= dz;
    c -= dc;
    if (std::abs(dz) + std::abs(dc) < 1e-15) break;
  }
  return {z, c};
}

auto planted(double a, double A) {
  return [=](auto z) { return z * inv(A * a * a * z * z - a * z + 1.0); };
}

}  // namespace

TEST_SUITE("parabolic") {
  TEST_CASE("connectedness interval endpoints") {
    const auto q = connectedness_interval(2);
    CHECK(q.a_end == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(q.b_end == doctest::Approx(0.25).epsilon(1e-12));
    const auto c4 = connectedness_interval(4);
    CHECK(c4.b_end == doctest::Approx(3 * std::pow(4.0, -4.0 / 3)).epsilon(1e-12));
    for (int d : {2, 4, 6}) {
      const auto ci = connectedness_interval(d);
      const double z = std::pow(1.0 / d, 1.0 / (d - 1));
      CHECK(std::abs(d * std::pow(z, d - 1) - 1) < 1e-10);
      CHECK(std::abs(std::pow(z, d) + ci.b_end - z) < 1e-12);
      // f_a^2(0) is a fixed point
      const double v = std::pow(ci.a_end, d) + ci.a_end;
      CHECK(std::abs(std::pow(v, d) + ci.a_end - v) < 1e-10);
    }
  }

  TEST_CASE("period-3 tangency of z^2 + c") {
    const auto pd = locate_parabolic(2, 3, {-1.8, -1.7});
    CHECK(std::abs(pd.c0 + 1.75) < 1e-10);
    CHECK(pd.alpha == doctest::Approx(1.30194).epsilon(1e-5));
    CHECK(pd.multiplier_residual < 1e-9);
    const auto [z, c] = tangency_oracle(1.3, -1.75);
    CHECK(std::abs(pd.c0 - c) < 1e-8);
    CHECK(std::abs(pd.alpha - z) < 1e-6);
    const auto ci = connectedness_interval(2);
    CHECK(pd.c0 > ci.a_end);
    CHECK(pd.c0 < ci.b_end);
  }

  TEST_CASE("period 2 is a period-doubling boundary and is rejected") {
    CHECK_THROWS_AS(locate_parabolic(2, 2, {-1.0, -0.5}), NotFoundError);
    CHECK_THROWS_AS(locate_parabolic(2, 2, {-1.9, -1.0}), NotFoundError);
  }

  TEST_CASE("bracket outside the connectedness interval is a usage error") {
    CHECK_THROWS_AS(locate_parabolic(2, 3, {-2.5, -1.7}), UsageError);
    CHECK_THROWS_AS(locate_parabolic(2, 3, {-1.7, -1.8}), UsageError);
  }

  TEST_CASE("local form of the reference instances") {
    for (auto [d, b] : {std::pair{2, Interval{-1.8, -1.7}}, std::pair{4, Interval{-1.25, -1.2}}}) {
      const auto pd = local_form(locate_parabolic(d, 3, b));
      CHECK(pd.a_coef > 0);
      CHECK(pd.A > 0);
      CHECK(pd.has_local_form);
      for (double x : pd.cycle) CHECK(std::abs(normal_form_at(pd, x).A - pd.A) < 1e-8);
    }
    const auto pd = local_form(locate_parabolic(2, 3, {-1.8, -1.7}));
    CHECK(pd.alpha == doctest::Approx(2 * std::cos(3 * std::numbers::pi / 7) - 0.5).epsilon(1e-9));
    CHECK(pd.a_coef == doctest::Approx(8.91889).epsilon(1e-5));
    CHECK(pd.A == doctest::Approx(1.0408163265).epsilon(1e-8));
  }

  TEST_CASE("planted normal form recovers A") {
    for (double A : {0.25, 1.0, 1.7}) {
      const double a = 2.5;
      const auto nf = normal_form(planted(a, A)(Jet::variable(0.0, 3)));
      CHECK(nf.a == doctest::Approx(a).epsilon(1e-12));
      CHECK(std::abs(nf.A - A) < 1e-10);
      auto map = std::make_shared<FunctionReturnMap<decltype(planted(a, A))>>(planted(a, A));
      const FatouEvaluator ev(map, 0.0);
      CHECK(std::abs(ev.germ().A - A) < 1e-6);
    }
  }

  TEST_CASE("degenerate germ is rejected") {
    const auto cubic = [](auto z) { return z + z * z * z; };
    CHECK_THROWS_AS(normal_form(cubic(Jet::variable(0.0, 3))), MathError);
  }

  TEST_CASE("attracting cycle on the left of c0") {
    const auto pd = locate_parabolic(2, 3, {-1.8, -1.7});
    for (double eps : {1e-6, 1e-4, 1e-3}) {
      const Family fam(2, pd.c0 - eps);
      Complex z = 0.0;
      for (int i = 0; i < 300000; ++i) z = evaluate(fam, z);
      const auto cyc = find_cycle(fam, 3, z);
      CHECK(std::abs(cyc.multiplier) < 1);
    }
  }

  TEST_CASE("window center is superattracting of exact period k") {
    const auto pd = locate_parabolic(2, 3, {-1.8, -1.7});
    const double c = window_center(pd);
    CHECK(c == doctest::Approx(-1.7548776662466927).epsilon(1e-12));
    const auto cyc = find_cycle(Family(2, c), 3, 0.0);
    CHECK(std::abs(cyc.multiplier) < 1e-10);
  }
}
