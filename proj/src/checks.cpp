#include "pdim/checks.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "pdim/error.hpp"
#include "pdim/parallel.hpp"

namespace pdim {

namespace {

constexpr double pi = std::numbers::pi;

double max_of(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

std::vector<Complex> petal_sample(const FatouEvaluator& ev, int n) {
  const Complex center = ev.germ().alpha - ev.germ().orientation * ev.delta();
  std::vector<Complex> pts;
  for (int i = 0; i < n; ++i) pts.push_back(center + std::polar(ev.delta() / 32, 2 * pi * (i + 0.5) / n));
  return pts;
}

FatouSuite fatou_suite(const FatouEvaluator& ev, int points, std::uint64_t seed) {
  if (points < 1) throw UsageError("fatou_suite needs at least one point");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Complex center = ev.germ().alpha - ev.germ().orientation * ev.delta();
  std::vector<Complex> zs(points), ws(points);
  for (int i = 0; i < points; ++i) {
    zs[i] = center + std::polar(0.95 * ev.delta() * std::sqrt(unit(rng)), 2 * pi * unit(rng));
    ws[i] = Complex(-40 + 40 * unit(rng), -10 + 20 * unit(rng));
  }
  std::vector<double> pe(points), qe(points), ps(points), qs(points);
  parallel_for(static_cast<std::size_t>(points), [&](std::size_t i) {
    const Complex z = zs[i], w = ws[i];
    const Complex phi = ev.phi_minus(z);
    pe[i] = std::abs(ev.phi_minus(ev.map().apply(z)) - phi - 1.0);
    ps[i] = std::abs(ev.phi_minus(std::conj(z)) - std::conj(phi));
    const Complex psi = ev.psi_plus(w);
    qe[i] = std::abs(ev.psi_plus(w + 1.0) - ev.map().apply(psi));
    qs[i] = std::abs(ev.psi_plus(std::conj(w)) - std::conj(psi));
  });
  return {max_of(pe), max_of(qe), max_of(ps), max_of(qs), points};
}

HornFit horn_translation(const LavaursMap& lav) {
  const auto& ev = lav.evaluator();
  const Complex expected(lav.sigma(), -ev.germ().A * pi);
  auto shift = [&](Complex w) { return ev.approx_coord(lav.eval_unchecked(ev.approx_coord_inv(w)).value) - w; };
  // Complex least squares for (T, p, q) via the normal equations.
  Complex m[3][4] = {};
  for (double r : {2500.0, 5000.0, 10000.0, 20000.0, 40000.0}) {
    const Complex w(0, r);
    const Complex f[3] = {1.0, std::log(w) / w, 1.0 / w};
    const Complex y = shift(w);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) m[a][b] += std::conj(f[a]) * f[b];
      m[a][3] += std::conj(f[a]) * y;
    }
  }
  for (int c = 0; c < 3; ++c)
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const Complex q = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= q * m[c][k];
    }
  const Complex t = m[0][3] / m[0][0];
  return {t, std::abs(t - expected), std::abs(shift(Complex(0, 1e4)) - expected)};
}

double inverse_round_trip(const LavaursMap& lav, int points, std::uint64_t seed) {
  const auto& ev = lav.evaluator();
  const auto sec = ev.attracting_sector();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Complex> zs;
  while (static_cast<int>(zs.size()) < points) {
    const Complex w = std::polar(30.0 * std::pow(10.0, unit(rng)), pi * unit(rng));
    if (sec.upper(w)) zs.push_back(ev.approx_coord_inv(w));
  }
  std::vector<double> err(zs.size());
  parallel_for(zs.size(), [&](std::size_t i) { err[i] = std::abs(lav.eval_unchecked(lav.inverse_branch(zs[i])).value - zs[i]); });
  return max_of(err);
}

double critical_derivative(const LavaursMap& lav) {
  // g_sigma is even, so symmetric differences vanish identically; use five points at fifth roots of unity.
  const double h = 1e-4;
  Complex s{};
  for (int m = 0; m < 5; ++m) {
    const Complex u = std::polar(1.0, 2 * pi * m / 5);
    s += lav.eval(h * u) / u;
  }
  return std::abs(s) / (5 * h);
}

ImplosionRun implosion_run(const LavaursMap& lav, const std::vector<int>& Ns) {
  if (Ns.size() < 2) throw UsageError("implosion_run needs at least two N values");
  const auto pts = petal_sample(lav.evaluator(), 21);
  const std::vector<Complex> others(pts.begin() + 1, pts.end());
  const Complex z_test = lav.evaluator().germ().alpha - lav.evaluator().germ().orientation * lav.evaluator().delta();
  ImplosionRun run;
  std::vector<double> lx, ly;
  for (int N : Ns) {
    const auto fit = implosion_fit(lav, N, z_test);
    run.fits.push_back(fit);
    run.defects.push_back(implosion_defect(lav, N, fit.epsilon, others));
    lx.push_back(std::log(static_cast<double>(N)));
    ly.push_back(std::log(std::abs(fit.epsilon)));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / lx.size();
    my += ly[i] / ly.size();
  }
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  run.slope = sxy / sxx;
  return run;
}

}  // namespace pdim
