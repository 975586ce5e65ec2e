#include "pdim/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pdim/error.hpp"

namespace pdim {

ConnectednessInterval connectedness_interval(int d) {
  if (d < 2 || d % 2 != 0) throw UsageError("degree must be an even integer >= 2");
  const double dd = d;
  // b_end: tangency of z^d + c with the diagonal, z^{d-1} = 1/d.
  const double z = std::pow(dd, -1.0 / (dd - 1.0));
  const double b_end = z - std::pow(z, dd);
  // a_end: the critical value lands on the negative of the beta fixed point.
  const double a_end = -std::pow(2.0, 1.0 / (dd - 1.0));
  return {d, a_end, b_end};
}

namespace {

struct TangencyState {
  double z, dz, dzz, dc, dzc;
};

// f^k at (z,c) with the derivatives needed by the tangency Newton step.
TangencyState tangency(int d, double c, double z0, int k) {
  TangencyState s{z0, 1, 0, 0, 0};
  for (int i = 0; i < k; ++i) {
    const double p1 = std::pow(s.z, d - 1);
    const double p2 = std::pow(s.z, d - 2);
    const double fz = d * p1;
    const double fzz = d * (d - 1) * p2;
    TangencyState n;
    n.z = p1 * s.z + c;
    n.dz = fz * s.dz;
    n.dzz = fzz * s.dz * s.dz + fz * s.dzz;
    n.dc = fz * s.dc + 1.0;
    n.dzc = fzz * s.dc * s.dz + fz * s.dzc;
    s = n;
  }
  return s;
}

struct Candidate {
  double z, c, res;
};

}  // namespace

ParabolicData locate_parabolic(int d, int k, Interval bracket, const LocateOptions& opts) {
  const auto ci = connectedness_interval(d);
  if (k < 1) throw UsageError("period must be >= 1");
  if (!(bracket.lo < bracket.hi)) throw UsageError("bracket must satisfy lo < hi");
  if (bracket.lo < ci.a_end - 1e-12 || bracket.hi > ci.b_end + 1e-12) {
    std::ostringstream os;
    os << "bracket [" << bracket.lo << ", " << bracket.hi << "] leaves the connectedness interval [" << ci.a_end << ", " << ci.b_end << "]";
    throw UsageError(os.str());
  }

  const int nc = std::max(1, opts.seeds / 16);
  const int nz = std::max(1, opts.seeds / nc);
  const double zmax = std::pow(std::max(std::abs(bracket.lo), std::abs(bracket.hi)), 1.0 / d) + 0.5;
  const double width = bracket.hi - bracket.lo;

  std::vector<Candidate> found;
  std::vector<std::string> rejected;
  for (int ic = 0; ic < nc; ++ic) {
    for (int iz = 0; iz < nz; ++iz) {
      double c = bracket.lo + width * (ic + 0.5) / nc;
      double z = -zmax + 2 * zmax * (iz + 0.5) / nz;
      bool ok = false;
      for (int it = 0; it < opts.max_iter; ++it) {
        const auto s = tangency(d, c, z, k);
        if (!std::isfinite(s.z) || std::abs(s.z) > 1e6) break;
        const double g1 = s.z - z, g2 = s.dz - 1.0;
        const double j11 = s.dz - 1.0, j12 = s.dc, j21 = s.dzz, j22 = s.dzc;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0 || !std::isfinite(det)) break;
        double dz = (g1 * j22 - j12 * g2) / det;
        double dc = (j11 * g2 - j21 * g1) / det;
        // Damp long steps so seeds far from the tangency do not jump out of the bracket region.
        const double lim = 0.25 * (width + 0.1);
        const double scale = std::max(std::abs(dc) / lim, std::abs(dz) / 0.5);
        if (scale > 1) {
          dz /= scale;
          dc /= scale;
        }
        z -= dz;
        c -= dc;
        if (std::abs(dz) < opts.tol * std::max(1.0, std::abs(z)) && std::abs(dc) < opts.tol) {
          ok = true;
          break;
        }
      }
      if (!ok || c < bracket.lo || c > bracket.hi) continue;
      const auto s = tangency(d, c, z, k);
      found.push_back({z, c, std::abs(s.z - z) + std::abs(s.dz - 1.0)});
    }
  }

  // Discard solutions of lower minimal period (period-doubling parents have multiplier -1).
  // There the tangency system has a triple root and Newton only resolves z to about eps^(1/3).
  std::vector<Candidate> good;
  for (const auto& cand : found) {
    bool lower = false;
    for (int p = 1; p < k && !lower; ++p) {
      if (k % p != 0) continue;
      auto s = tangency(d, cand.c, cand.z, p);
      if (std::abs(s.z - cand.z) <= 1e-4 * std::max(1.0, std::abs(cand.z))) {
        std::ostringstream os;
        os << "c=" << cand.c << " has minimal period " << p << " with multiplier " << s.dz;
        rejected.push_back(os.str());
        lower = true;
      }
    }
    if (!lower) good.push_back(cand);
  }
  if (good.empty()) {
    std::ostringstream os;
    os << "no parabolic parameter of exact period " << k << " in [" << bracket.lo << ", " << bracket.hi << "]";
    if (!rejected.empty()) os << " (rejected: " << rejected.front() << ")";
    throw NotFoundError(os.str());
  }

  const double mid = 0.5 * (bracket.lo + bracket.hi);
  const auto best = *std::min_element(good.begin(), good.end(), [&](const Candidate& x, const Candidate& y) {
    const double dx = std::abs(x.c - mid), dy = std::abs(y.c - mid);
    if (std::abs(x.c - y.c) > 1e-9) return dx < dy;
    return x.res < y.res;
  });

  ParabolicData pd;
  pd.d = d;
  pd.k = k;
  pd.c0 = best.c;
  std::vector<double> pts;
  double z = best.z;
  for (int i = 0; i < k; ++i) {
    pts.push_back(z);
    z = std::pow(z, d) + best.c;
  }
  const auto start = std::max_element(pts.begin(), pts.end());
  std::rotate(pts.begin(), start, pts.end());
  pd.cycle = pts;
  pd.alpha = pts.front();
  const auto s = tangency(d, pd.c0, pd.alpha, k);
  pd.fixed_residual = std::abs(s.z - pd.alpha);
  pd.multiplier_residual = std::abs(s.dz - 1.0);
  return pd;
}

NormalForm normal_form(const Jet& germ) {
  if (germ.order() < 3) throw UsageError("normal_form needs a jet of order >= 3");
  const double a = germ[2].real();
  const double b = germ[3].real();
  if (std::abs(a) < 1e-8) throw MathError("degenerate parabolic point: second-order coefficient vanishes");
  return {a, b, 1.0 - b / (a * a)};
}

NormalForm normal_form_at(const ParabolicData& pd, double cycle_point) {
  const auto fam = pd.family();
  return normal_form(iterate_jet(fam, Jet::variable(cycle_point, 3), pd.k));
}

int basin_cycle_index(const ParabolicData& pd) {
  const auto fam = pd.family();
  Complex z = 0.0;
  // Parabolic convergence is O(1/n); 2^15 returns separate cycle points comfortably.
  for (int i = 0; i < (1 << 15) * pd.k; ++i) {
    z = evaluate(fam, z);
    if (escaped(z)) throw MathError("critical orbit escapes: parameter is not parabolic");
  }
  int best = 0;
  for (int i = 1; i < static_cast<int>(pd.cycle.size()); ++i)
    if (std::abs(z - pd.cycle[i]) < std::abs(z - pd.cycle[best])) best = i;
  if (std::abs(z - pd.cycle[best]) > 1e-2) throw MathError("critical orbit does not approach the parabolic cycle");
  return best;
}

ParabolicData local_form(const ParabolicData& pd) {
  ParabolicData out = pd;
  const int idx = basin_cycle_index(pd);
  std::rotate(out.cycle.begin(), out.cycle.begin() + idx, out.cycle.end());
  out.alpha = out.cycle.front();
  const auto nf = normal_form_at(pd, out.alpha);
  out.orientation = nf.a > 0 ? 1 : -1;
  out.a_coef = std::abs(nf.a);
  out.b_coef = nf.b;
  out.A = nf.A;
  if (!(out.A > 0)) throw MathError("iterative residue A = " + std::to_string(out.A) + " is not positive");
  const auto jet = iterate_jet(pd.family(), Jet::variable(out.alpha, 1), pd.k);
  out.fixed_residual = std::abs(jet[0] - out.alpha);
  out.multiplier_residual = std::abs(jet[1] - 1.0);
  out.has_local_form = true;
  return out;
}

double window_center(const ParabolicData& pd) {
  const int d = pd.d, k = pd.k;
  double best = NAN;
  for (double h : {1e-3, 3e-3, 1e-2, 3e-2}) {
    for (double side : {-1.0, 1.0}) {
      double c = pd.c0 + side * h;
      bool ok = false;
      for (int it = 0; it < 60 && !ok; ++it) {
        double z = 0, dz = 0;
        for (int i = 0; i < k; ++i) {
          dz = d * std::pow(z, d - 1) * dz + 1;
          z = std::pow(z, d) + c;
        }
        const double step = z / dz;
        if (!std::isfinite(step)) break;
        c -= step;
        ok = std::abs(step) < 1e-15 * (1 + std::abs(c));
      }
      if (!ok || std::abs(c - pd.c0) < 1e-9) continue;
      // 0 must have minimal period exactly k
      double z = 0;
      bool minimal = true;
      for (int i = 1; i < k; ++i) {
        z = std::pow(z, d) + c;
        if (std::abs(z) < 1e-6) minimal = false;
      }
      if (minimal && (std::isnan(best) || std::abs(c - pd.c0) < std::abs(best - pd.c0))) best = c;
    }
    if (!std::isnan(best)) return best;
  }
  throw NotFoundError("no superattracting parameter of period " + std::to_string(k) + " near c0");
}

}  // namespace pdim
