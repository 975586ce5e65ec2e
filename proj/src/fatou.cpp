#include "pdim/fatou.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pdim/error.hpp"

namespace pdim {

using std::numbers::pi;

Complex PolynomialReturnMap::apply(Complex z) const {
  for (int i = 0; i < k_; ++i) z = evaluate(fam_, z);
  return z;
}

Complex PolynomialReturnMap::apply(Complex z, Complex& dz) const {
  for (int i = 0; i < k_; ++i) {
    dz *= derivative(fam_, z);
    z = evaluate(fam_, z);
  }
  return z;
}

int PolynomialReturnMap::taylor_order() const {
  long deg = 1;
  for (int i = 0; i < k_ && deg <= 128; ++i) deg *= fam_.d;
  return static_cast<int>(std::min<long>(deg, 128));
}

Germ germ_of(const ParabolicData& pd) {
  if (!pd.has_local_form) throw UsageError("parabolic data lacks a local normal form; run local_form first");
  return {pd.alpha, pd.a_coef, pd.orientation, pd.A};
}

Complex approx_coord(const ParabolicData& pd, Complex z) {
  if (z == Complex(pd.alpha)) throw DomainError("approx_coord: z equals the parabolic point");
  return -1.0 / (pd.a_signed() * (z - pd.alpha));
}

Complex approx_coord_inv(const ParabolicData& pd, Complex w) {
  if (w == Complex{}) throw DomainError("approx_coord_inv: w = 0");
  return pd.alpha - 1.0 / (pd.a_signed() * w);
}

namespace {

// Taylor data of F_inf at infinity. With u = 1/w and x = z - alpha = -u/a,
// F(alpha + x) - alpha = x P(u), so F_inf(w) = w / P(u) = w + 1 - S(u)/P(u).
struct InfinityPolys {
  std::vector<Complex> p, s;
};

InfinityPolys infinity_polys(const Jet& jet, double a) {
  const int n = jet.order();
  InfinityPolys out;
  out.p.assign(static_cast<std::size_t>(n), Complex{});
  Complex scale = 1.0;
  for (int i = 0; i < n; ++i) {
    out.p[i] = (i == 0 ? Complex(1.0) : jet[i + 1] * scale);
    scale *= -1.0 / a;
  }
  if (n >= 2) out.p[1] = -1.0;  // the jet coefficient equals a up to rounding
  out.s.assign(out.p.size(), Complex{});
  for (int i = 1; i < n; ++i) out.s[i] = out.p[i] + (i + 1 < n ? out.p[i + 1] : Complex{});
  return out;
}

Complex horner(const std::vector<Complex>& c, Complex u) {
  Complex r{};
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * u + *it;
  return r;
}

Complex conj_map_far(const InfinityPolys& ip, Complex w) {
  const Complex u = 1.0 / w;
  return w + 1.0 - horner(ip.s, u) / horner(ip.p, u);
}

constexpr double kFarRadius = 50.0;

}  // namespace

Complex conjugated_map(const ParabolicData& pd, Complex w) {
  if (std::abs(w) >= kFarRadius) {
    PolynomialReturnMap map(pd.family(), pd.k);
    const auto ip = infinity_polys(map.apply(Jet::variable(pd.alpha, map.taylor_order())), pd.a_signed());
    return conj_map_far(ip, w);
  }
  Complex z = approx_coord_inv(pd, w);
  for (int i = 0; i < pd.k; ++i) z = evaluate(pd.family(), z);
  return approx_coord(pd, z);
}

FatouEvaluator::FatouEvaluator(const ParabolicData& pd, FatouOptions opts)
    : map_(std::make_shared<PolynomialReturnMap>(pd.family(), pd.k)), germ_(germ_of(pd)), opts_(opts), pd_(pd) {
  setup();
}

FatouEvaluator::FatouEvaluator(std::shared_ptr<const ReturnMap> map, double alpha, FatouOptions opts)
    : map_(std::move(map)), opts_(opts) {
  germ_.alpha = alpha;
  const auto nf = normal_form(map_->apply(Jet::variable(germ_.alpha, 3)));
  germ_.orientation = nf.a > 0 ? 1 : -1;
  germ_.a_coef = std::abs(nf.a);
  germ_.A = nf.A;
  setup();
}

void FatouEvaluator::setup() {
  if (opts_.series_order < 0 || opts_.n_max < 1) throw UsageError("invalid Fatou options");
  const int order = std::max(map_->taylor_order(), opts_.series_order + 3);
  const Jet jet = map_->apply(Jet::variable(germ_.alpha, order));
  const double a = germ_.a_signed();
  const auto ip = infinity_polys(jet, a);
  p_poly_ = ip.p;
  s_poly_ = ip.s;

  // Formal Fatou coordinate at infinity: Phi(F_inf(w)) = Phi(w) + 1 solved order by order in u = 1/w.
  const int J = opts_.series_order;
  const int M = J + 2;
  Jet P(M);
  for (int i = 0; i <= M && i < static_cast<int>(p_poly_.size()); ++i) P[i] = p_poly_[i];
  const Jet R = P.reciprocal();
  Jet delta = R + Complex(-1.0);
  Jet log1p(M), dn = Jet::constant(1.0, M);
  for (int n = 1; n <= M; ++n) {
    dn *= delta;
    log1p += dn * Complex((n % 2 ? 1.0 : -1.0) / n);
  }
  Jet tot(M);
  for (int m = 1; m < M; ++m) tot[m] = R[m + 1];
  tot -= log1p * Complex(germ_.A);
  coef_.assign(static_cast<std::size_t>(J), Complex{});
  Jet Pm = Jet::constant(1.0, M);
  for (int m = 1; m <= J; ++m) {
    const Complex cm = tot[m + 1] / static_cast<double>(m);
    coef_[m - 1] = cm;
    Pm *= P;
    Jet term(M);
    for (int i = 0; i + m <= M; ++i) term[i + m] = Pm[i] - (i == 0 ? 1.0 : 0.0);
    tot += term * cm;
  }

  delta_ = opts_.delta > 0 ? opts_.delta : choose_delta();
}

double FatouEvaluator::choose_delta() const {
  const double s = germ_.orientation;
  for (double d = 0.0625; d > 1e-9; d *= 0.5) {
    bool ok = true;
    const Complex cm = germ_.alpha - s * d, cp = germ_.alpha + s * d;
    for (int j = 0; j < 256 && ok; ++j) {
      const Complex e = std::polar(d, 2 * pi * (j + 0.5) / 256);
      const Complex fm = map_->apply(cm + e), fp = map_->apply(cp + e);
      if (!(std::abs(fm - cm) < d) || !(std::abs(fp - cp) > d)) ok = false;
    }
    if (ok) return d;
  }
  throw MathError("no petal disk radius above 1e-9 is invariant");
}

Complex FatouEvaluator::approx_coord(Complex z) const {
  if (z == Complex(germ_.alpha)) throw DomainError("approx_coord: z equals the parabolic point");
  return -1.0 / (germ_.a_signed() * (z - germ_.alpha));
}

Complex FatouEvaluator::approx_coord_inv(Complex w) const {
  if (w == Complex{}) throw DomainError("approx_coord_inv: w = 0");
  return germ_.alpha - 1.0 / (germ_.a_signed() * w);
}

Complex FatouEvaluator::conjugated_map(Complex w) const {
  if (std::abs(w) >= kFarRadius) return conj_map_far({p_poly_, s_poly_}, w);
  return approx_coord(map_->apply(approx_coord_inv(w)));
}

double FatouEvaluator::conjugated_map_bound() const {
  double k = 0;
  for (int j = 0; j < 256; ++j) {
    const Complex w = std::polar(100.0, 2 * pi * (j + 0.5) / 256);
    k = std::max(k, std::norm(w) * std::abs(conjugated_map(w) - w - 1.0 - germ_.A / w));
  }
  return k;
}

Complex FatouEvaluator::attracting_series(Complex w) const {
  const Complex u = 1.0 / w;
  Complex s{};
  for (auto it = coef_.rbegin(); it != coef_.rend(); ++it) s = (s + *it) * u;
  return w - germ_.A * std::log(w) + s;
}

Complex FatouEvaluator::attracting_series_deriv(Complex w) const {
  const Complex u = 1.0 / w;
  Complex s{};
  for (int j = static_cast<int>(coef_.size()); j >= 1; --j) s = (s + static_cast<double>(j) * coef_[j - 1]) * u;
  return 1.0 - germ_.A * u - s * u;
}

// u - A log_+(u) + iA pi + sum c_j u^-j with log_+(u) = log(-u) + i pi.
Complex FatouEvaluator::repelling_series(Complex u) const {
  const Complex v = 1.0 / u;
  Complex s{};
  for (auto it = coef_.rbegin(); it != coef_.rend(); ++it) s = (s + *it) * v;
  return u - germ_.A * std::log(-u) + s;
}

Complex FatouEvaluator::repelling_series_deriv(Complex u) const { return attracting_series_deriv(u); }

ValueDeriv FatouEvaluator::phi_minus_d(Complex z) const {
  const auto sec = attracting_sector();
  Complex dz = 1.0;
  for (int n = 0; n <= opts_.n_max; ++n) {
    if (z == Complex(germ_.alpha)) throw DomainError("phi_minus: orbit hits the parabolic point");
    const Complex w = approx_coord(z);
    if (sec.attracting(w)) {
      const Complex x = z - germ_.alpha;
      const Complex dI = 1.0 / (germ_.a_signed() * x * x);
      return {attracting_series(w) - static_cast<double>(n), attracting_series_deriv(w) * dI * dz};
    }
    z = map_->apply(z, dz);
    if (escaped(z)) throw EscapeError("phi_minus: point is not in the parabolic basin (orbit escaped)");
  }
  std::ostringstream os;
  os << "phi_minus: orbit did not enter the attracting sector within n_max=" << opts_.n_max << " steps";
  throw ConvergenceError(os.str());
}

ValueDeriv FatouEvaluator::psi_plus_d(Complex w) const {
  const double R = opts_.repelling_radius, kappa = opts_.sector_slope;
  const double shift = std::ceil(w.real() + R - kappa * std::abs(w.imag()));
  const int m = shift > 0 ? static_cast<int>(shift) : 0;
  if (m > opts_.n_max) throw ConvergenceError("psi_plus: target lies too far right of the repelling sector");
  const Complex t = w - static_cast<double>(m);
  Complex u = t + germ_.A * std::log(-t);
  bool ok = false;
  Complex dphi = 1.0;
  for (int it = 0; it < 60; ++it) {
    dphi = repelling_series_deriv(u);
    const Complex step = (repelling_series(u) - t) / dphi;
    u -= step;
    if (std::abs(step) <= opts_.tol * std::abs(u)) {
      ok = true;
      break;
    }
  }
  if (!ok) throw ConvergenceError("psi_plus: Newton inversion of the repelling series did not converge");
  dphi = repelling_series_deriv(u);
  Complex z = approx_coord_inv(u);
  Complex dz = 1.0 / (germ_.a_signed() * u * u * dphi);
  for (int i = 0; i < m; ++i) {
    z = map_->apply(z, dz);
    if (escaped(z)) throw EscapeError("psi_plus: forward orbit overflowed");
  }
  return {z, dz};
}

ValueDeriv FatouEvaluator::inverse_step_d(Complex z) const {
  const Complex w = approx_coord(z);
  Complex y = approx_coord_inv(w - 1.0);
  double prev = INFINITY;
  for (int it = 0; it < 60; ++it) {
    Complex dy = 1.0;
    const Complex fy = map_->apply(y, dy);
    const Complex step = (fy - z) / dy;
    const double size = std::abs(step), scale = std::abs(y - germ_.alpha);
    y -= step;
    // Converged, or stagnating on rounding noise close to the root.
    if (size <= 1e-13 * scale + 4e-15 * (1 + std::abs(y)) || (size > 0.5 * prev && size <= 1e-10 * scale)) {
      Complex d = 1.0;
      map_->apply(y, d);
      if (std::abs(approx_coord(y) - (w - 1.0)) > 1.0 + 4 * germ_.A / std::max(std::abs(w), 1.0))
        throw CompositionError("inverse_step", "Newton left the branch fixing the parabolic point");
      return {y, 1.0 / d};
    }
    prev = size;
  }
  throw ConvergenceError("inverse_step: Newton did not converge");
}

Complex FatouEvaluator::inverse_step(Complex z) const { return inverse_step_d(z).value; }

bool FatouEvaluator::in_attracting_disk(Complex z) const {
  const Complex center = germ_.alpha - germ_.orientation * delta_;
  return std::abs(z - center) < delta_;
}

bool FatouEvaluator::in_basin(Complex z) const {
  for (int i = 0; i <= 10 * opts_.n_max; ++i) {
    if (in_attracting_disk(z)) return true;
    z = map_->apply(z);
    if (escaped(z)) return false;
  }
  return false;
}

Landing FatouEvaluator::landing_time(Complex z, int budget) const {
  if (!pd_) throw UsageError("landing_time needs polynomial parabolic data");
  const auto fam = pd_->family();
  const int k = pd_->k;
  std::vector<Complex> orbit;
  orbit.reserve(256);
  int entry = -1;
  for (int i = 0; i <= budget; ++i) {
    if (escaped(z)) return {Landing::Status::Escaped, i};
    orbit.push_back(z);
    if (in_attracting_disk(z)) {
      entry = i;
      break;
    }
    z = evaluate(fam, z);
  }
  if (entry < 0) return {Landing::Status::Exhausted, budget};
  // Walk back: a point sitting at cycle position p != 0 must lie in the sector around alpha_p.
  const double half = pi / pd_->d;
  int m_min = 0;
  for (int m = entry - 1; m >= 0; --m) {
    const int p = ((m - entry) % k + k) % k;
    if (p == 0) continue;
    const double ap = pd_->cycle[p];
    const double ang = std::abs(std::arg(orbit[m] * ap));
    if (!(ang < half)) {
      m_min = m + 1;
      break;
    }
  }
  int m = m_min;
  while (((m - entry) % k + k) % k != 0) ++m;
  return {Landing::Status::Landed, m};
}

}  // namespace pdim
