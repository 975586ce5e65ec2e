#include "pdim/lavaurs.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pdim/error.hpp"

namespace pdim {

using std::numbers::pi;

LavaursMap::LavaursMap(std::shared_ptr<const FatouEvaluator> ev, double sigma) : ev_(std::move(ev)), sigma_(sigma) {
  if (!ev_ || !ev_->parabolic()) throw UsageError("LavaursMap needs an evaluator built from polynomial parabolic data");
  if (!std::isfinite(sigma)) throw UsageError("sigma must be finite");
}

int LavaursMap::landing_budget() const { return 2 * ev_->options().n_max * parabolic().k; }

ValueDeriv LavaursMap::eval_unchecked(Complex z) const {
  const auto phi = ev_->phi_minus_d(z);
  const auto psi = ev_->psi_plus_d(phi.value + sigma_);
  return {psi.value, psi.deriv * phi.deriv};
}

ValueDeriv LavaursMap::eval_d(Complex z) const {
  const auto land = ev_->landing_time(z, landing_budget());
  if (land.status == Landing::Status::Escaped) throw EscapeError("lavaurs_eval: point escapes, not in the basin");
  if (land.status != Landing::Status::Landed || land.steps != 0)
    throw DomainError("lavaurs_eval: point is not in the immediate component containing 0");
  return eval_unchecked(z);
}

LavaursMap::Extension LavaursMap::extend(Complex z) const {
  const auto land = ev_->landing_time(z, landing_budget());
  if (land.status == Landing::Status::Escaped) throw EscapeError("lavaurs_extend: orbit escapes, point is outside the filled Julia set");
  if (land.status == Landing::Status::Exhausted) throw DomainError("lavaurs_extend: orbit did not reach the petal within the budget");
  const auto fam = parabolic().family();
  Complex dz = 1.0;
  for (int i = 0; i < land.steps; ++i) {
    dz *= derivative(fam, z);
    z = evaluate(fam, z);
  }
  const auto g = eval_unchecked(z);
  return {g.value, g.deriv * dz, land.steps};
}

bool LavaursMap::solve_branch(Complex z, Complex seed, Complex& y, Complex& dg) const {
  const double alpha = ev_->germ().alpha;
  const double tol = 1e-11 * std::abs(z - alpha) + 1e-15;
  // Once Newton stagnates on the evaluation noise, accept the best iterate if it is still close.
  const double loose = 1e-9 * std::abs(z - alpha) + 1e-13;
  y = seed;
  Complex best_y = y, best_dg{};
  double best = INFINITY, prev = INFINITY;
  try {
    for (int it = 0; it < 40; ++it) {
      const auto g = eval_unchecked(y);
      if (g.deriv == Complex{}) return false;
      const double res = std::abs(g.value - z);
      if (res < best) {
        best = res;
        best_y = y;
        best_dg = g.deriv;
      }
      if (res <= tol || res > 0.5 * prev) break;
      prev = res;
      y -= (g.value - z) / g.deriv;
      if (!std::isfinite(y.real()) || !std::isfinite(y.imag()) || y == Complex(alpha)) break;
    }
  } catch (const Error&) {
  }
  y = best_y;
  dg = best_dg;
  return best <= loose;
}

ValueDeriv LavaursMap::inverse_branch_d(Complex z) const {
  const Complex w = ev_->approx_coord(z);
  if (!(w.imag() > 0)) throw DomainError("inverse_branch_G: point is not in the oriented upper half-plane at alpha");
  const Complex shift(-sigma_, ev_->germ().A * pi);
  const auto sec = ev_->attracting_sector();
  Complex y, dg;
  if (sec.upper(w) && solve_branch(z, ev_->approx_coord_inv(w + shift), y, dg) &&
      std::abs(ev_->approx_coord(y) - (w + shift)) < 1.0)
    return {y, 1.0 / dg};

  // Continue downward from a point deep in the upper sector along a vertical path in the w-plane.
  const double lift = std::max(0.0, std::abs(w.real()) + sec.radius / sec.kappa + 1.0 - w.imag());
  Complex cur = w + Complex(0, lift);
  const Complex top = ev_->approx_coord_inv(cur);
  if (!solve_branch(top, ev_->approx_coord_inv(cur + shift), y, dg))
    throw ConvergenceError("inverse_branch_G: Newton failed deep in the upper sector");
  double h = 0.5;
  while (cur.imag() > w.imag()) {
    const Complex next = cur.imag() - h <= w.imag() ? w : cur - Complex(0, h);
    Complex y2, dg2;
    const Complex znext = ev_->approx_coord_inv(next);
    const Complex seed = y + (znext - ev_->approx_coord_inv(cur)) / dg;
    if (solve_branch(znext, seed, y2, dg2)) {
      y = y2;
      dg = dg2;
      cur = next;
      h = std::min(0.5, h * 1.5);
    } else {
      h *= 0.5;
      if (h < 1e-4) {
        std::ostringstream msg;
        msg << "inverse_branch_G: continuation stalled at w = " << cur << " (target " << w << ")";
        throw ConvergenceError(msg.str());
      }
    }
  }
  return {y, 1.0 / dg};
}

std::vector<double> real_critical_points(const ParabolicData& pd) {
  std::vector<double> level{0.0}, all{0.0};
  for (int i = 1; i < pd.k; ++i) {
    std::vector<double> next;
    for (double y : level) {
      const double t = y - pd.c0;
      if (t < 0) continue;
      const double r = std::pow(t, 1.0 / pd.d);
      next.push_back(r);
      if (r != 0) next.push_back(-r);
    }
    all.insert(all.end(), next.begin(), next.end());
    level = std::move(next);
  }
  std::sort(all.begin(), all.end());
  return all;
}

namespace {

double real_return(const Family& fam, int k, double x) {
  for (int i = 0; i < k; ++i) x = std::pow(x, fam.d) + fam.c;
  return x;
}

}  // namespace

std::vector<SigmaSolution> find_sigma(std::shared_ptr<const FatouEvaluator> ev, int j_max) {
  if (j_max < 1) throw UsageError("j_max must be >= 1");
  const LavaursMap base(ev, 0.0);
  const auto& pd = base.parabolic();
  const auto fam = pd.family();
  const double alpha = pd.alpha;
  const int s = pd.orientation;

  // Monotone part of the real repelling slice: from alpha to the first critical value.
  double qstar = NAN;
  for (double q : real_critical_points(pd))
    if (s * (q - alpha) > 0 && (std::isnan(qstar) || std::abs(q - alpha) < std::abs(qstar - alpha))) qstar = q;
  if (std::isnan(qstar)) throw NotFoundError("find_sigma: no real critical point on the repelling side");
  const double vstar = real_return(fam, pd.k, qstar);
  auto in_gate = [&](double x) { return s * (x - alpha) > 0 && s * (vstar - x) > 0; };

  // Real preimages of alpha up to depth j_max, each recorded at its minimal depth.
  std::vector<std::pair<double, int>> pre;
  std::vector<double> level{alpha};
  std::vector<double> seen{alpha};
  for (int j = 1; j <= j_max; ++j) {
    std::vector<double> next;
    for (double y : level) {
      const double t = y - pd.c0;
      if (t < 0) continue;
      const double r = std::pow(t, 1.0 / pd.d);
      for (double x : {r, -r}) {
        bool dup = false;
        for (double v : seen) dup = dup || std::abs(v - x) < 1e-12;
        if (dup) continue;
        seen.push_back(x);
        next.push_back(x);
        if (in_gate(x)) pre.emplace_back(x, j);
      }
    }
    level = std::move(next);
  }
  if (pre.empty()) throw NotFoundError("find_sigma: no real preimage of alpha of depth <= j_max in the repelling gate");

  const double phi0 = ev->phi_minus(0.0).real();
  const double lo = std::min(alpha, qstar), hi = std::max(alpha, qstar);
  const double R = ev->options().repelling_radius;
  std::vector<SigmaSolution> out;
  for (auto [x, j] : pre) {
    // Pull x back along the branch of F^{-1} on (alpha, q*) until it is deep in the repelling petal.
    double y = x;
    int m = 0;
    while (ev->approx_coord(y).real() > -R) {
      if (++m > ev->options().n_max) throw ConvergenceError("find_sigma: backward orbit did not reach the repelling sector");
      const double target = y;
      auto fn = [&](double t) { return real_return(fam, pd.k, t) - target; };
      boost::uintmax_t iters = 200;
      const auto br = boost::math::tools::toms748_solve(fn, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
      y = 0.5 * (br.first + br.second);
    }
    const double phi_plus = (ev->repelling_series(ev->approx_coord(y)) + static_cast<double>(m)).real();
    double sigma = phi_plus - phi0;
    for (int it = 0; it < 8; ++it) {
      const auto psi = ev->psi_plus_d(phi0 + sigma);
      const double step = (psi.value.real() - x) / psi.deriv.real();
      sigma -= step;
      if (std::abs(step) < 1e-15) break;
    }
    Complex z = ev->psi_plus(phi0 + sigma);
    for (int i = 0; i < j; ++i) z = evaluate(fam, z);
    out.push_back({sigma, j, x, std::abs(z - alpha)});
  }
  std::sort(out.begin(), out.end(), [](const SigmaSolution& a, const SigmaSolution& b) {
    return a.j != b.j ? a.j < b.j : a.sigma < b.sigma;
  });
  return out;
}

double parameter_speed(const ParabolicData& pd) {
  const auto fam = pd.family();
  Complex z = pd.alpha, dc = 0.0;
  for (int i = 0; i < pd.k; ++i) {
    dc = derivative(fam, z) * dc + 1.0;
    z = evaluate(fam, z);
  }
  return pd.orientation * dc.real();
}

namespace {

double orbit_error(const Family& fam, int steps, Complex z, Complex target) {
  for (int i = 0; i < steps; ++i) {
    z = evaluate(fam, z);
    if (escaped(z) || std::abs(z) > 1e6) return 1e300;
  }
  return std::abs(z - target);
}

}  // namespace

ImplosionFit implosion_fit(const LavaursMap& lav, int N, Complex z_test) {
  if (N < 1) throw UsageError("implosion_fit: N must be positive");
  const auto& pd = lav.parabolic();
  const double beta = parameter_speed(pd);
  if (beta == 0) throw MathError("implosion_fit: parameter speed vanishes at alpha");
  const double scale = pi * pi / (pd.a_coef * std::abs(beta));
  const double sign = beta > 0 ? 1.0 : -1.0;
  // A single point matches spuriously at many phases; a real and an off-axis companion pin the phase down.
  const double spread = 0.125 * lav.evaluator().delta();
  const Complex probes[3] = {z_test, z_test + spread, z_test + Complex(0, 0.5 * spread)};
  Complex targets[3];
  for (int i = 0; i < 3; ++i) targets[i] = lav.eval(probes[i]);
  const int steps = pd.k * N;
  auto eps_of = [&](double tau) { return sign * scale / ((N - tau) * (N - tau)); };
  auto err = [&](double tau) {
    const Family fam(pd.d, pd.c0 + eps_of(tau));
    double e = 0;
    for (int i = 0; i < 3; ++i) e = std::max(e, orbit_error(fam, steps, probes[i], targets[i]));
    return e;
  };

  // Scan the phase over a decade of epsilon, then refine the best cell.
  const double tau_lo = N * (1 - std::pow(10.0, 0.25)), tau_hi = N * (1 - std::pow(10.0, -0.25));
  const double h = 0.05;
  double best_tau = tau_lo, best = err(tau_lo);
  for (double tau = tau_lo + h; tau <= tau_hi; tau += h) {
    const double e = err(tau);
    if (e < best) {
      best = e;
      best_tau = tau;
    }
  }
  if (!(best < 1e299)) throw NotFoundError("implosion_fit: every orbit in the epsilon bracket escaped");
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::brent_find_minima(err, best_tau - h, best_tau + h, 52, iters);
  if (r.second < best) {
    best = r.second;
    best_tau = r.first;
  }
  return {N, eps_of(best_tau), best_tau, best};
}

double implosion_defect(const LavaursMap& lav, int N, double epsilon, std::span<const Complex> points) {
  const auto& pd = lav.parabolic();
  const Family fam(pd.d, pd.c0 + epsilon);
  double worst = 0;
  for (Complex z : points) worst = std::max(worst, orbit_error(fam, pd.k * N, z, lav.eval(z)));
  return worst;
}

}  // namespace pdim
