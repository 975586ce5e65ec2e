#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pdim/checks.hpp"
#include "pdim/error.hpp"
#include "reference.hpp"

using namespace pdim;

namespace {

constexpr double pi = std::numbers::pi;

Complex log_plus(Complex u) {
  // branch cut on the positive reals, log|u| + i pi on the negative reals
  double t = std::arg(u);
  if (t < 0) t += 2 * pi;
  return {std::log(std::abs(u)), t};
}

}  // namespace

TEST_SUITE("fatou") {
  TEST_CASE("approximate coordinate") {
    const auto& pd = ref::quadratic().pd;
    const double as = pd.a_signed();
    CHECK(std::abs(approx_coord(pd, pd.alpha - 1 / as) - 1.0) < 1e-12);
    for (int i = 0; i < 16; ++i) {
      const Complex z = pd.alpha + std::polar(0.01, 2 * pi * i / 16);
      CHECK(std::abs(approx_coord_inv(pd, approx_coord(pd, z)) - z) < 1e-12);
    }
    for (double t : {0.1, 1.0, 7.0}) {
      const Complex w = approx_coord(pd, pd.alpha - t / as);
      CHECK(w.imag() == 0.0);
      CHECK(w.real() > 0);
    }
    CHECK_THROWS_AS(approx_coord(pd, pd.alpha), DomainError);
  }

  TEST_CASE("conjugated map is a translation up to A/w") {
    const auto& in = ref::quadratic();
    const double A = in.pd.A;
    for (double w : {1e6, -1e6}) {
      const Complex f = in.ev->conjugated_map(w);
      CHECK(std::abs(f - w - 1.0 - A / w) < 1e-10);
    }
    const Complex w(3e5, 2e5);
    CHECK(std::abs(in.ev->conjugated_map(std::conj(w)) - std::conj(in.ev->conjugated_map(w))) < 1e-9);
    CHECK(std::abs(conjugated_map(in.pd, 200.0) - in.ev->conjugated_map(200.0)) < 1e-8);
    CHECK(in.ev->conjugated_map_bound() < 1e3);
  }

  TEST_CASE("planted quadratic germ has A = 1") {
    const auto quad = [](auto z) { return z + 0.5 * z * z; };
    auto map = std::make_shared<FunctionReturnMap<decltype(quad)>>(quad);
    const FatouEvaluator ev(map, 0.0);
    const Complex w = 1e6;
    const Complex fitted = w * (ev.conjugated_map(w) - w - 1.0);
    CHECK(std::abs(fitted - 1.0) < 1e-4);
  }

  TEST_CASE("translation model: phi_minus is the approximate coordinate") {
    const auto mobius = [](auto z) { return z * inv(-z + 1.0); };  // I o F o I^-1 = w + 1
    auto map = std::make_shared<FunctionReturnMap<decltype(mobius)>>(mobius);
    const FatouEvaluator ev(map, 0.0);
    CHECK(std::abs(ev.germ().A) < 1e-14);
    for (Complex w : {Complex(30, 0), Complex(50, 20), Complex(100, -70)}) {
      const Complex z = ev.approx_coord_inv(w);
      CHECK(std::abs(ev.phi_minus(z) - w) < 1e-9 * std::abs(w));
    }
  }

  TEST_CASE("functional equations and symmetry of the reference coordinates") {
    for (const auto* in : {&ref::quadratic(), &ref::quartic()}) {
      const auto s = fatou_suite(*in->ev, 100, 7);
      CHECK(s.phi_equation < 1e-8);
      CHECK(s.psi_equation < 1e-8);
      CHECK(s.phi_symmetry < 1e-10);
      CHECK(s.psi_symmetry < 1e-10);
    }
  }

  TEST_CASE("phi_minus is real on the real slice of the basin") {
    const auto& in = ref::quadratic();
    for (double t : {0.1, 0.5, 0.9}) {
      const double z = in.pd.alpha - in.pd.orientation * in.ev->delta() * t;
      CHECK(std::abs(in.ev->phi_minus(z).imag()) < 1e-10);
    }
  }

  TEST_CASE("petal disk is invariant") {
    const auto& in = ref::quadratic();
    const double d = in.ev->delta();
    CHECK(d <= 0.1);
    const Complex center = in.pd.alpha - in.pd.orientation * d;
    for (int j = 0; j < 256; ++j) {
      const Complex z = center + std::polar(d * (1 - 1e-9), 2 * pi * (j + 0.5) / 256);
      CHECK(in.ev->in_attracting_disk(in.ev->map().apply(z)));
    }
  }

  TEST_CASE("basin membership") {
    const auto& in = ref::quadratic();
    CHECK(in.ev->in_basin(0.0));
    CHECK_FALSE(in.ev->in_basin(Complex(2.0, 1.0)));
    CHECK_THROWS_AS(in.ev->phi_minus(Complex(2.0, 1.0)), DomainError);
  }

  TEST_CASE("psi_plus asymptotics on Im w = 5") {
    const auto& in = ref::quadratic();
    const double A = in.pd.A;
    double prev = INFINITY;
    for (double x : {-1e2, -1e3, -1e4}) {
      const Complex w(x, 5);
      const Complex u = in.ev->approx_coord(in.ev->psi_plus(w));
      const double res = std::abs(u - (w + A * log_plus(w) - Complex(0, A * pi)));
      CHECK(res < prev);
      prev = res;
    }
    CHECK(prev < 1e-3);
  }

  TEST_CASE("psi_plus is real on the repelling real direction") {
    const auto& in = ref::quadratic();
    for (double x : {-40.0, -100.0, -400.0}) {
      const Complex z = in.ev->psi_plus(x);
      CHECK(std::abs(z.imag()) < 1e-12);
      CHECK(in.pd.orientation * (z.real() - in.pd.alpha) > 0);
    }
  }
}
