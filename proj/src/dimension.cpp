#include "pdim/dimension.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "pdim/error.hpp"

namespace pdim {

namespace {
constexpr double pi = std::numbers::pi;
}

std::vector<LabeledRatio> upper_ratios(std::span<const IfsBranch> branches, Complex tau) {
  std::vector<LabeledRatio> out;
  out.reserve(branches.size());
  for (const auto& b : branches) out.push_back({b.n, b.r, static_cast<double>(b.r) + static_cast<double>(b.n) * tau, b.deriv_max});
  return out;
}

std::vector<LabeledRatio> lattice_model(int n0, int n_max, int r_max, Complex tau, double exponent) {
  std::vector<LabeledRatio> out;
  for (int n = n0; n <= n_max; ++n)
    for (int r = -r_max; r <= r_max; ++r) {
      const Complex label = static_cast<double>(r) + static_cast<double>(n) * tau;
      out.push_back({n, r, label, std::pow(std::abs(label), -exponent)});
    }
  return out;
}

const char* to_string(SeriesClass c) {
  switch (c) {
    case SeriesClass::Convergent: return "convergent";
    case SeriesClass::Divergent: return "divergent";
    default: return "inconclusive";
  }
}

namespace {

// Least-squares slope and its standard error.
std::pair<double, double> fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  double ssr = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - my - slope * (x[i] - mx);
    ssr += e * e;
  }
  const double se = x.size() > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
  return {slope, se};
}

// Slope of y = b + e x + c exp(-x): the power law with its first 1/L correction.
double fit_corrected_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double m[3][4] = {};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f[3] = {1.0, x[i], std::exp(-x[i])};
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) m[a][b] += f[a] * f[b];
      m[a][3] += f[a] * y[i];
    }
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    std::swap(m[c], m[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      const double q = m[r][c] / m[c][c];
      for (int k = c; k < 4; ++k) m[r][k] -= q * m[c][k];
    }
  }
  return m[1][3] / m[1][1];
}

constexpr int kShells = 6;

}  // namespace

PressureSeries pressure_sum(std::span<const LabeledRatio> ratios, double t) {
  if (ratios.empty()) throw UsageError("pressure_sum: no ratios");
  int nmin = ratios.front().n, nmax = nmin, rmax = 0;
  Complex tau{};
  for (const auto& q : ratios) {
    nmin = std::min(nmin, q.n);
    nmax = std::max(nmax, q.n);
    rmax = std::max(rmax, std::abs(q.r));
    if (q.n != 0) tau = (q.label - static_cast<double>(q.r)) / static_cast<double>(q.n);
  }
  if (!(tau.imag() > 0)) throw UsageError("pressure_sum: labels need a step with positive imaginary part");
  // Annuli L/sqrt2 <= |label| < L below the largest complete radius. Rows start at height h;
  // each annulus sum is divided by the share of its upper half lying above h.
  const double h = (nmin - 0.5) * tau.imag();
  const double lc = std::min((nmax + 0.5) * tau.imag(), (rmax + 0.5) * tau.imag() / std::abs(tau));
  auto cap = [h](double rho) { return rho <= h ? 0.0 : rho * rho * std::acos(h / rho) - h * std::sqrt(rho * rho - h * h); };
  PressureSeries ps{t, nmax, rmax, lc, 0, {}, 0, SeriesClass::Inconclusive};
  std::vector<double> shell(kShells, 0.0);
  for (const auto& q : ratios) {
    const double v = std::pow(q.value, t);
    ps.partial_sum += v;
    const double rho = std::abs(q.label);
    if (!(rho < lc)) continue;
    const int k = static_cast<int>(std::floor(2 * std::log2(lc / rho)));
    if (k < kShells) shell[k] += v;
  }
  std::vector<double> lx, ly;
  for (int k = 0; k < kShells; ++k) {
    const double outer = lc * std::exp2(-0.5 * k), inner = outer / std::sqrt(2.0);
    const double share = (cap(outer) - cap(inner)) / (0.5 * pi * (outer * outer - inner * inner));
    ps.shell_sums.push_back(shell[k]);
    if (shell[k] > 0 && share > 0.25) {
      lx.push_back(std::log(outer));
      ly.push_back(std::log(shell[k] / share));
    }
  }
  if (lx.size() < 4) throw MathError("pressure_sum: window too small to fit a growth exponent");
  ps.growth_exponent = fit_corrected_slope(lx, ly);
  ps.classification = ps.growth_exponent > 0.05 ? SeriesClass::Divergent
                      : ps.growth_exponent < 0.01 ? SeriesClass::Convergent
                                                  : SeriesClass::Inconclusive;
  return ps;
}

ThetaEstimate theta_estimate(std::span<const LabeledRatio> ratios, double lo, double hi, double width) {
  if (!(pressure_sum(ratios, lo).growth_exponent > 0) || pressure_sum(ratios, hi).growth_exponent > 0)
    throw MathError("theta_estimate: growth exponent does not change sign on the bracket");
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    if (pressure_sum(ratios, mid).growth_exponent > 0)
      lo = mid;
    else
      hi = mid;
  }
  return {lo, hi};
}

double moran_root(std::span<const double> ratios) {
  if (ratios.empty()) throw UsageError("moran_root: no ratios");
  for (double r : ratios)
    if (!(r > 0 && r < 1)) throw MathError("moran_root: ratio outside (0, 1)");
  if (ratios.size() == 1) return 0.0;
  auto f = [&](double t) {
    double s = 0;
    for (double r : ratios) s += std::pow(r, t);
    return s - 1.0;
  };
  double hi = 1.0;
  while (f(hi) > 0) hi *= 2;
  auto tol = [](double a, double b) { return std::abs(a - b) <= 1e-7; };
  const auto br = boost::math::tools::bisect(f, 0.0, hi, tol);
  return 0.5 * (br.first + br.second);
}

MoranBounds moran_bounds(std::span<const IfsBranch> branches) {
  std::vector<double> lo, hi;
  for (const auto& b : branches) {
    lo.push_back(b.deriv_min);
    hi.push_back(b.deriv_max);
  }
  return {moran_root(lo), moran_root(hi), branches.size()};
}

namespace {

// f_eps^steps from z together with its derivative.
ValueDeriv run_steps(const Family& fam, Complex z, long steps) {
  Complex dz = 1.0;
  for (long s = 0; s < steps; ++s) {
    dz *= derivative(fam, z);
    z = evaluate(fam, z);
    if (escaped(z) || std::abs(z) > 1e6) throw ConvergenceError("persistence_check: perturbed orbit escaped");
  }
  return {z, dz};
}

// Stage points y_0 = psi(b), y_1 = F^r G^n F^{-1} b, y_2 = G^{n-1} F^{-1} b, ..., y_{n+1} = F^{-1} b
// of the unperturbed chain. F^{-r} near alpha is absorbed by the g that follows it,
// since g o F^{-r} = g_{sigma - r} on the basin.
std::vector<Complex> unperturbed_chain(const IteratedFunctionSystem& ifs, int j, int n, int r, Complex b) {
  const auto& lav = ifs.lavaurs();
  const auto& ev = lav.evaluator();
  const auto fam = lav.parabolic().family();
  const int k = lav.parabolic().k;
  std::vector<Complex> y{ifs.apply(n, r, b)};
  y.push_back(iterate(fam, lav.eval_d(y[0]).value, j).z);
  Complex u = y.back();
  for (int i = 0; i < r; ++i) u = ev.inverse_step(u);
  if (r < 0) u = iterate(fam, u, -r * k).z;
  for (int i = 0; i < n; ++i) {
    u = lav.extend(u).value;
    y.push_back(u);
  }
  return y;
}

}  // namespace

PersistenceReport persistence_check(const IteratedFunctionSystem& ifs, int j, std::span<const IfsBranch> subset,
                                    int N, double epsilon) {
  if (subset.empty()) throw UsageError("persistence_check: empty subset");
  const auto& pd = ifs.lavaurs().parabolic();
  const Family fam(pd.d, pd.c0 + epsilon);
  const double R0 = ifs.ball().radius;
  std::vector<Complex> pts{0.0};
  for (int i = 0; i < 16; ++i) pts.push_back(std::polar(R0, 2 * pi * i / 16));
  for (int i = 0; i < 8; ++i) pts.push_back(std::polar(0.5 * R0, 2 * pi * (i + 0.5) / 8));

  PersistenceReport rep{N, epsilon, 0, INFINITY, 0, 0};
  std::vector<double> lo_p, lo_u;
  const double margin = ifs.options().margin;
  for (const auto& b : subset) {
    if (static_cast<long>(N) <= b.r) throw UsageError("persistence_check: N must exceed r");
    // Segment lengths in f-steps: f^j o F^N, F^{N-r}, n - 1 blocks F^N, then F.
    std::vector<long> seg{static_cast<long>(pd.k) * N + j, static_cast<long>(pd.k) * (N - b.r)};
    for (int i = 1; i < b.n; ++i) seg.push_back(static_cast<long>(pd.k) * N);
    seg.push_back(pd.k);
    double dmin = INFINITY;
    for (Complex target : pts) {
      auto y = unperturbed_chain(ifs, j, b.n, b.r, target);
      const Complex x0 = y[0];
      const std::size_t m = seg.size();
      std::vector<ValueDeriv> img(m);
      // Stops at a residual of 1e-10, or at the rounding floor once the residual stalls below 1e-6
      // (long passages through the gate lose about eight digits).
      double prev = INFINITY;
      for (int it = 0;; ++it) {
        if (it == 40) throw ConvergenceError("persistence_check: shooting Newton did not converge");
        double res = 0;
        for (std::size_t i = 0; i < m; ++i) {
          img[i] = run_steps(fam, y[i], seg[i]);
          res = std::max(res, std::abs(img[i].value - (i + 1 < m ? y[i + 1] : target)));
        }
        if (res <= 1e-10 || (res <= 1e-6 && res > 0.5 * prev)) break;
        prev = res;
        // Bidiagonal linearization, solved from the last segment backwards.
        Complex next = target;
        for (std::size_t i = m; i-- > 0;) {
          next = y[i] + (next - img[i].value) / img[i].deriv;
          y[i] = next;
        }
      }
      Complex expansion = 1.0;
      for (const auto& v : img) expansion *= v.deriv;
      rep.max_defect = std::max(rep.max_defect, std::abs(y[0] - x0));
      rep.min_expansion = std::min(rep.min_expansion, std::abs(expansion));
      dmin = std::min(dmin, 1.0 / std::abs(expansion));
    }
    lo_p.push_back(dmin / margin);
    lo_u.push_back(b.deriv_min);
  }
  rep.t_lower_perturbed = moran_root(lo_p);
  rep.t_lower_unperturbed = moran_root(lo_u);
  return rep;
}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; }));
}

std::vector<int> dyadic_sizes(int smallest, int count) {
  std::vector<int> s;
  for (int i = 0; i < count; ++i) s.push_back(smallest << i);
  return s;
}

BoxCount box_counting(const Mask& mask, std::span<const int> box_sizes) {
  if (box_sizes.size() < 2) throw UsageError("box_counting needs at least two box sizes");
  if (mask.count() == 0) throw MathError("box_counting: empty mask");
  BoxCount bc{0, 0, {box_sizes.begin(), box_sizes.end()}, {}};
  std::vector<double> lx, ly;
  for (int s : box_sizes) {
    if (s < 1) throw UsageError("box size must be positive");
    const int bw = (mask.width + s - 1) / s, bh = (mask.height + s - 1) / s;
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(bw) * bh, 0);
    for (int y = 0; y < mask.height; ++y)
      for (int x = 0; x < mask.width; ++x)
        if (mask.at(x, y)) hit[static_cast<std::size_t>(y / s) * bw + x / s] = 1;
    const auto n = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    bc.counts.push_back(n);
    lx.push_back(-std::log(static_cast<double>(s)));
    ly.push_back(std::log(static_cast<double>(n)));
  }
  const auto [slope, se] = fit_slope(lx, ly);
  bc.dimension = slope;
  bc.std_error = se;
  return bc;
}

}  // namespace pdim
