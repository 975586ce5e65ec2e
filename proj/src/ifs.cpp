#include "pdim/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pdim/error.hpp"
#include "pdim/parallel.hpp"

namespace pdim {

using std::numbers::pi;

namespace {

bool in_immediate(const FatouEvaluator& ev, Complex z) {
  const auto land = ev.landing_time(z, 2 * ev.options().n_max * ev.parabolic()->k);
  return land.status == Landing::Status::Landed && land.steps == 0;
}

}  // namespace

BaseBall choose_base_ball(const FatouEvaluator& ev, int critical_orbit_len) {
  if (!ev.parabolic()) throw UsageError("choose_base_ball needs polynomial parabolic data");
  if (critical_orbit_len < 1) throw UsageError("critical orbit length must be positive");
  const auto fam = ev.parabolic()->family();
  Complex z = fam.c;
  double dist = std::abs(z);
  for (int i = 1; i < critical_orbit_len; ++i) {
    z = evaluate(fam, z);
    dist = std::min(dist, std::abs(z));
  }
  for (double r = 0.125; r > std::ldexp(1.0, -40); r *= 0.5) {
    if (dist < 2 * r) continue;
    bool inside = true;
    for (int i = 0; i < 16 && inside; ++i) inside = in_immediate(ev, std::polar(1.5 * r, 2 * pi * i / 16));
    if (inside) return {r, 1.5 * r, dist};
  }
  throw MathError("choose_base_ball: no dyadic radius above 2^-40 clears the postcritical set");
}

BranchInverse::BranchInverse(std::shared_ptr<const LavaursMap> lav, const SigmaSolution& sol, double radius,
                             double image_bound)
    : lav_(std::move(lav)), j_(sol.j), radius_(radius) {
  const auto& pd = lav_->parabolic();
  d_ = pd.d;
  alpha_ = pd.alpha;
  orientation_ = pd.orientation;
  auto cauchy = [&](double rho, int M, int K) {
    std::vector<Complex> vals(M);
    parallel_for(static_cast<std::size_t>(M), [&](std::size_t m) { vals[m] = forward(std::polar(rho, 2 * pi * m / M)) - alpha_; });
    std::vector<Complex> c(static_cast<std::size_t>(K) + 1);
    for (int i = 0; i <= K; ++i) {
      Complex s{};
      for (int m = 0; m < M; ++m) s += vals[m] * std::polar(1.0, -2 * pi * double(i) * m / M);
      c[i] = s / (M * std::pow(rho, i));
    }
    return c;
  };
  // The expansion must converge well inside the immediate component: measure its inner radius along rays.
  const auto& ev = lav_->evaluator();
  double inner = std::abs(alpha_);  // alpha lies on the boundary
  for (int i = 0; i < 64; ++i) {
    const Complex dir = std::polar(1.0, 2 * pi * (i + 0.5) / 64);
    double lo = 0, hi = std::min(inner, 2.0);
    if (in_immediate(ev, hi * dir)) continue;
    for (int it = 0; it < 30; ++it) {
      const double mid = 0.5 * (lo + hi);
      (in_immediate(ev, mid * dir) ? lo : hi) = mid;
    }
    inner = std::min(inner, lo);
  }
  if (!std::isfinite(inner) || inner <= 0) throw MathError("branch h: cannot bound the immediate component");
  inner_radius_ = inner;
  // g_sigma grows violently towards the boundary; shrink the circle until the expansion is self-consistent.
  constexpr int kNodes = 128, kOrder = 80;
  double rho = 0.5 * inner;
  for (;; rho *= 0.8) {
    if (rho < 1e-3 * inner) throw MathError("branch h: f^j o g_sigma is not ramified of order d at 0");
    try {
      coef_ = cauchy(rho, kNodes, kOrder);
    } catch (const EscapeError&) {
      continue;
    }
    const double lead = std::abs(coef_[d_]) * std::pow(rho, d_);
    double low = 0;
    for (int i = 0; i < d_; ++i) low = std::max(low, std::abs(coef_[i]) * std::pow(rho, i));
    if (low <= 1e-6 * lead) break;
  }
  // Truncation radius: the tail terms must be negligible against the leading term.
  v_max_ = 0.8 * rho;
  for (int i = kOrder - 8; i <= kOrder; ++i) {
    const double ci = std::abs(coef_[i]);
    if (ci == 0) continue;
    v_max_ = std::min(v_max_, std::pow(1e-15 * std::abs(coef_[d_]) / ci, 1.0 / (i - d_)));
  }
  v_max_ = std::min(v_max_, image_bound);
  for (int i = 0; i < d_; ++i) coef_[i] = 0;
  // If |H - alpha| exceeds r on |v| = v_max, the component of H^{-1}(D(alpha, r)) at 0 stays inside |v| < v_max.
  double floor_val = INFINITY;
  for (int i = 0; i < 256; ++i) floor_val = std::min(floor_val, std::abs(forward_model(std::polar(v_max_, 2 * pi * i / 256)) - alpha_));
  radius_ = std::min(radius, 0.9 * floor_val);
  sector_start_ = std::arg(Complex(orientation_) / coef_[d_]) / d_;
}

Complex BranchInverse::forward(Complex v) const {
  Complex z = lav_->eval_unchecked(v).value;
  const auto fam = lav_->parabolic().family();
  for (int i = 0; i < j_; ++i) z = evaluate(fam, z);
  return z;
}

Complex BranchInverse::forward_model(Complex v) const {
  Complex s{};
  for (auto it = coef_.rbegin(); it != coef_.rend(); ++it) s = s * v + *it;
  return alpha_ + s;
}

bool BranchInverse::in_domain(Complex zeta) const {
  const Complex x = zeta - alpha_;
  if (!(std::abs(x) < radius_) || x == Complex{}) return false;
  return !(x.imag() == 0 && orientation_ * x.real() > 0);
}

ValueDeriv BranchInverse::eval_d(Complex zeta) const {
  if (!in_domain(zeta)) throw CompositionError("h", "point outside the slit neighbourhood of alpha");
  const Complex x = zeta - alpha_;
  const double theta0 = d_ * sector_start_;
  const Complex q = x / coef_[d_];
  double th = std::arg(q);
  while (th <= theta0) th += 2 * pi;
  while (th > theta0 + 2 * pi) th -= 2 * pi;
  Complex v = std::polar(std::pow(std::abs(q), 1.0 / d_), th / d_);
  // Horner for p(v) = sum c_i v^i and p'(v).
  auto poly = [&](Complex t, Complex& dp) {
    Complex p{}, dd{};
    for (int i = static_cast<int>(coef_.size()) - 1; i >= 1; --i) {
      p = p * t + coef_[i];
      dd = dd * t + static_cast<double>(i) * coef_[i];
    }
    dp = dd;
    return p * t;
  };
  Complex dd;
  for (int it = 0;; ++it) {
    const Complex step = (poly(v, dd) - x) / dd;
    v -= step;
    if (std::abs(step) <= 1e-15 * std::abs(v)) break;
    if (it == 40) throw ConvergenceError("h: Newton on the local expansion did not converge");
  }
  poly(v, dd);
  double rel = std::arg(v * std::polar(1.0, -sector_start_));
  if (rel <= 0) rel += 2 * pi;
  if (!(rel < 2 * pi / d_) || std::abs(v) > v_max_)
    throw CompositionError("h", "Newton left the sector V*");
  return {v, 1.0 / dd};
}

IteratedFunctionSystem::IteratedFunctionSystem(std::shared_ptr<const LavaursMap> lav, const SigmaSolution& sol, IfsOptions opts)
    : lav_(lav), opts_(opts), ball_(choose_base_ball(lav->evaluator(), opts.critical_orbit_len)),
      h_(lav, sol, lav->evaluator().delta(), 0.8 * ball_.radius) {
  const auto& ev = lav_->evaluator();
  const auto& pd = lav_->parabolic();
  const auto fam = pd.family();
  // F-preimages of 0 in the immediate component, oriented upper half-plane; keep the one nearest alpha.
  std::vector<Complex> level{0.0};
  for (int i = 0; i < pd.k; ++i) {
    std::vector<Complex> next;
    for (Complex y : level) {
      const Complex base = std::pow(y - fam.c, 1.0 / pd.d);
      for (int l = 0; l < pd.d; ++l) next.push_back(base * std::polar(1.0, 2 * pi * l / pd.d));
    }
    level = std::move(next);
  }
  bool found = false;
  for (Complex y : level) {
    if (!(pd.orientation * y.imag() > 0) || !in_immediate(ev, y)) continue;
    if (!found || std::abs(y - pd.alpha) < std::abs(b_center_ - pd.alpha)) b_center_ = y;
    found = true;
  }
  if (!found) throw MathError("IFS: no preimage of B0 in the immediate component on the upper side");

  // n0: first depth at which G^n(B') sits inside the neighbourhood of alpha.
  const auto pts = samples();
  std::vector<Complex> cur(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) cur[i] = preimage_d(pts[i]).value;
  for (n0_ = 1;; ++n0_) {
    if (n0_ > 64) throw MathError("IFS: G^n(B') does not enter the neighbourhood of alpha");
    bool inside = true;
    for (auto& y : cur) {
      y = lav_->inverse_branch(y);
      inside = inside && std::abs(y - pd.alpha) < h_.radius();
    }
    if (inside) break;
  }
}

Complex IteratedFunctionSystem::label_step() const {
  return {-lav_->sigma(), pi * lav_->parabolic().A};
}

Complex IteratedFunctionSystem::label(int n, int r) const { return static_cast<double>(r) + static_cast<double>(n) * label_step(); }

std::vector<Complex> IteratedFunctionSystem::samples() const {
  std::vector<Complex> s{0.0};
  for (int i = 0; i < opts_.grid_radial; ++i)
    for (int j = 0; j < opts_.grid_angular; ++j)
      s.push_back(std::polar(ball_.radius * (i + 1) / opts_.grid_radial, 2 * pi * (j + 0.5 * (i % 2)) / opts_.grid_angular));
  return s;
}

ValueDeriv IteratedFunctionSystem::preimage_d(Complex z) const {
  if (!(std::abs(z) <= ball_.radius * (1 + 1e-12))) throw CompositionError("F^-1", "point outside B0");
  const auto& pd = lav_->parabolic();
  const auto& map = lav_->evaluator().map();
  Complex y = b_center_, dy = 1.0;
  for (int s = 1; s <= 4; ++s) {
    const Complex target = z * (s / 4.0);
    for (int it = 0; it < 30; ++it) {
      dy = 1.0;
      const Complex fy = map.apply(y, dy);
      const Complex step = (fy - target) / dy;
      y -= step;
      if (std::abs(step) <= 1e-15 * std::abs(y)) break;
    }
  }
  dy = 1.0;
  map.apply(y, dy);
  if (!(pd.orientation * y.imag() > 0)) throw CompositionError("F^-1", "preimage left the upper half-plane");
  return {y, 1.0 / dy};
}

ValueDeriv IteratedFunctionSystem::apply_d(int n, int r, Complex z) const {
  if (n < 1) throw UsageError("IFS branch needs n >= 1");
  auto pre = preimage_d(z);
  Complex y = pre.value, d = pre.deriv;
  for (int i = 0; i < n; ++i) {
    try {
      const auto g = lav_->inverse_branch_d(y);
      y = g.value;
      d *= g.deriv;
    } catch (const CompositionError&) {
      throw;
    } catch (const Error& e) {
      throw CompositionError("G^n", e.what());
    }
  }
  const auto& ev = lav_->evaluator();
  for (int i = 0; i < r; ++i) y = ev.map().apply(y, d);
  for (int i = 0; i > r; --i) {
    const auto b = ev.inverse_step_d(y);
    y = b.value;
    d *= b.deriv;
  }
  if (!h_.in_domain(y)) throw CompositionError("F^r", "image leaves the slit neighbourhood of alpha");
  const auto hv = h_.eval_d(y);
  return {hv.value, hv.deriv * d};
}

Complex IteratedFunctionSystem::fixed_point(int n, int r) const {
  Complex z = 0.0;
  for (int it = 0; it < 100; ++it) {
    const Complex next = apply(n, r, z);
    if (std::abs(next - z) <= 1e-15) return next;
    z = next;
  }
  return z;
}

IfsBranch IteratedFunctionSystem::build_branch(int n, int r) const {
  const auto pts = samples();
  double lo = INFINITY, hi = 0;
  Complex center{};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto v = apply_d(n, r, pts[i]);
    if (i == 0) center = v.value;
    lo = std::min(lo, std::abs(v.deriv));
    hi = std::max(hi, std::abs(v.deriv));
  }
  const double dmax = hi * opts_.margin;
  return {n, r, lo / opts_.margin, dmax, center, dmax * ball_.radius};
}

std::vector<IfsBranch> IteratedFunctionSystem::build_window(int n_max, int r_max) const {
  if (n_max < n0_ || r_max < 0) throw UsageError("IFS window is empty");
  const auto pts = samples();
  const int nn = n_max - n0_ + 1, nr = 2 * r_max + 1;
  const std::size_t per = static_cast<std::size_t>(nn) * nr;
  std::vector<double> dmag(pts.size() * per);
  std::vector<Complex> centers(per);
  const auto& ev = lav_->evaluator();
  std::vector<std::string> failures(pts.size());

  parallel_for(pts.size(), [&](std::size_t i) {
    auto pre = preimage_d(pts[i]);
    Complex y = pre.value, d = pre.deriv;
    std::vector<Complex> zs(nr), ds(nr);
    for (int n = 1; n <= n_max; ++n) {
      const auto g = lav_->inverse_branch_d(y);
      y = g.value;
      d *= g.deriv;
      if (n < n0_) continue;
      zs[r_max] = y;
      ds[r_max] = d;
      for (int r = 1; r <= r_max; ++r) {
        Complex dd = ds[r_max + r - 1];
        zs[r_max + r] = ev.map().apply(zs[r_max + r - 1], dd);
        ds[r_max + r] = dd;
        const auto b = ev.inverse_step_d(zs[r_max - r + 1]);
        zs[r_max - r] = b.value;
        ds[r_max - r] = ds[r_max - r + 1] * b.deriv;
      }
      for (int k = 0; k < nr; ++k) {
        if (!h_.in_domain(zs[k])) throw CompositionError("F^r", "image leaves the slit neighbourhood of alpha");
        const auto hv = h_.eval_d(zs[k]);
        const std::size_t idx = static_cast<std::size_t>(n - n0_) * nr + k;
        dmag[i * per + idx] = std::abs(hv.deriv * ds[k]);
        if (i == 0) centers[idx] = hv.value;
      }
    }
  });

  std::vector<IfsBranch> out;
  out.reserve(per);
  for (int n = n0_; n <= n_max; ++n) {
    for (int k = 0; k < nr; ++k) {
      const std::size_t idx = static_cast<std::size_t>(n - n0_) * nr + k;
      double lo = INFINITY, hi = 0;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        lo = std::min(lo, dmag[i * per + idx]);
        hi = std::max(hi, dmag[i * per + idx]);
      }
      const double dmax = hi * opts_.margin;
      out.push_back({n, k - r_max, lo / opts_.margin, dmax, centers[idx], dmax * ball_.radius});
    }
  }
  return out;
}

SeparationReport separation_check(std::span<const IfsBranch> branches, const BaseBall& ball) {
  SeparationReport rep;
  rep.count = branches.size();
  rep.min_gap = INFINITY;
  for (const auto& b : branches) {
    rep.max_radius = std::max(rep.max_radius, b.image_radius);
    const double g = ball.radius - std::abs(b.image_center) - b.image_radius;
    if (!(g > 0)) rep.contained = false;
    rep.min_gap = std::min(rep.min_gap, g);
  }
  std::vector<std::size_t> order(branches.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return branches[a].image_center.real() < branches[b].image_center.real(); });
  for (std::size_t a = 0; a < order.size(); ++a) {
    const auto& p = branches[order[a]];
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const auto& q = branches[order[b]];
      if (q.image_center.real() - p.image_center.real() > p.image_radius + rep.max_radius + std::max(rep.min_gap, 0.0)) break;
      const double g = std::abs(p.image_center - q.image_center) - p.image_radius - q.image_radius;
      if (!(g > 0)) rep.disjoint = false;
      rep.min_gap = std::min(rep.min_gap, g);
    }
  }
  return rep;
}

DerivativeLaw derivative_law(std::span<const IfsBranch> branches, Complex label_step, int d) {
  if (branches.empty()) throw UsageError("derivative_law: no branches");
  double qmax = 0, qmin = INFINITY, dist = 1;
  for (const auto& b : branches) {
    const double rho = std::pow(std::abs(static_cast<double>(b.r) + static_cast<double>(b.n) * label_step), -1.0 - 1.0 / d);
    qmax = std::max(qmax, b.deriv_max / rho);
    qmin = std::min(qmin, b.deriv_min / rho);
    dist = std::max(dist, b.deriv_max / b.deriv_min);
  }
  return {std::sqrt(qmax * qmin), std::sqrt(qmax / qmin), std::max(qmax, 1.0 / qmin), dist};
}

}  // namespace pdim
