#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pdim/checks.hpp"
#include "pdim/error.hpp"
#include "reference.hpp"

using namespace pdim;

namespace {

Mask blank(int n) { return {n, n, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * n, 0)}; }

void set(Mask& m, int x, int y) { m.bits[static_cast<std::size_t>(y) * m.width + x] = 1; }

// Keeps the first and last quarter at every base-4 digit.
bool in_dust(int x) {
  for (; x > 0; x /= 4)
    if (x % 4 == 1 || x % 4 == 2) return false;
  return true;
}

std::vector<IfsBranch> strongest(const IteratedFunctionSystem& sys, int w, std::size_t count) {
  auto all = sys.build_window(w, w);
  std::sort(all.begin(), all.end(), [](const IfsBranch& a, const IfsBranch& b) { return a.deriv_min > b.deriv_min; });
  all.resize(std::min(all.size(), count));
  return all;
}

}  // namespace

TEST_SUITE("dimension") {
  TEST_CASE("pressure sum: convergent at t = 2, divergent at t = 1") {
    const auto& sys = *ref::quadratic().ifs;
    const auto ratios = upper_ratios(sys.build_window(40, 80), sys.label_step());
    CHECK(pressure_sum(ratios, 2.0).classification == SeriesClass::Convergent);
    CHECK(pressure_sum(ratios, 1.0).classification == SeriesClass::Divergent);
    CHECK(std::string(to_string(SeriesClass::Inconclusive)) == "inconclusive");
  }

  TEST_CASE("lattice model has critical exponent 2 / exponent") {
    const Complex tau(0.44051186549, std::numbers::pi * 51.0 / 49.0);
    for (double e : {1.5, 1.25}) {
      const auto th = theta_estimate(lattice_model(1, 80, 160, tau, e), 0.5, 2.5, 0.02);
      CHECK(th.upper - th.lower <= 0.02);
      CHECK(std::abs(th.estimate() - 2 / e) < 0.05);
    }
  }

  TEST_CASE("convergence exponent of the quadratic IFS") {
    const auto& sys = *ref::quadratic().ifs;
    const auto th = theta_estimate(upper_ratios(sys.build_window(60, 120), sys.label_step()), 0.5, 2.5, 0.02);
    CHECK(std::abs(th.estimate() - 4.0 / 3) < 0.05);
  }

  TEST_CASE("pressure sum rejects degenerate input") {
    CHECK_THROWS_AS(pressure_sum(std::vector<LabeledRatio>{}, 1.0), UsageError);
    const auto flat = lattice_model(1, 5, 5, Complex(0.5, -1.0), 1.5);
    CHECK_THROWS_AS(pressure_sum(flat, 1.0), UsageError);
  }

  TEST_CASE("Moran root") {
    const std::vector<double> halves{0.5, 0.5};
    CHECK(moran_root(halves) == doctest::Approx(1.0).epsilon(1e-6));
    const std::vector<double> thirds{1.0 / 3, 1.0 / 3};
    CHECK(moran_root(thirds) == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-6));
    const std::vector<double> bad{0.5, 1.5};
    CHECK_THROWS_AS(moran_root(bad), MathError);
  }

  TEST_CASE("Moran lower bound grows with the window") {
    const auto& sys = *ref::quadratic().ifs;
    double prev = 0;
    for (int w : {4, 8, 16}) {
      const auto b = moran_bounds(sys.build_window(w, w));
      CHECK(b.t_lower > prev);
      CHECK(b.t_lower <= b.t_upper);
      prev = b.t_lower;
    }
  }

  TEST_CASE("perturbed branches persist") {
    const auto& in = ref::quadratic();
    const auto subset = strongest(*in.ifs, 12, 4);
    const auto run = implosion_run(*in.lav, {100, 200});
    PersistenceReport reps[2];
    for (int i = 0; i < 2; ++i) reps[i] = persistence_check(*in.ifs, in.sol.j, subset, run.fits[i].N, run.fits[i].epsilon);
    CHECK(reps[1].max_defect < reps[0].max_defect);
    CHECK(reps[1].min_expansion > 1);
    CHECK(std::abs(reps[1].t_lower_perturbed - reps[1].t_lower_unperturbed) < 0.05);
    CHECK_THROWS_AS(persistence_check(*in.ifs, in.sol.j, std::vector<IfsBranch>{}, 100, 1e-4), UsageError);
  }

  TEST_CASE("box counting: square, segment, dust") {
    const int n = 256;
    const auto sizes = dyadic_sizes(1, 7);
    CHECK(sizes == std::vector<int>{1, 2, 4, 8, 16, 32, 64});
    Mask square = blank(n), segment = blank(n), dust = blank(n);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        set(square, x, y);
        if (y == n / 3) set(segment, x, y);
        if (in_dust(x) && in_dust(y)) set(dust, x, y);
      }
    CHECK(box_counting(square, sizes).dimension == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(box_counting(segment, sizes).dimension == doctest::Approx(1.0).epsilon(1e-9));
    const std::vector<int> fours{1, 4, 16, 64};
    const auto bc = box_counting(dust, fours);
    CHECK(bc.dimension == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(bc.std_error < 1e-9);
  }

  TEST_CASE("box counting rejects degenerate masks") {
    const auto sizes = dyadic_sizes(1, 4);
    CHECK_THROWS_AS(box_counting(blank(16), sizes), MathError);
    Mask one = blank(16);
    set(one, 3, 3);
    CHECK(box_counting(one, sizes).dimension == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_THROWS_AS(box_counting(one, std::vector<int>{2}), UsageError);
  }
}
