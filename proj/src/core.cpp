#include "pdim/core.hpp"

#include <cmath>
#include <string>

#include "pdim/error.hpp"

namespace pdim {

Family::Family(int degree, double param) : d(degree), c(param) {
  if (degree < 2 || degree % 2 != 0) throw UsageError("degree must be an even integer >= 2, got " + std::to_string(degree));
  if (!std::isfinite(param)) throw UsageError("parameter c must be finite");
}

Complex ipow(Complex z, int e) {
  Complex r = 1.0;
  while (e > 0) {
    if (e & 1) r *= z;
    e >>= 1;
    if (e) z *= z;
  }
  return r;
}

Complex evaluate(const Family& fam, Complex z) { return ipow(z, fam.d) + fam.c; }

Complex derivative(const Family& fam, Complex z) { return static_cast<double>(fam.d) * ipow(z, fam.d - 1); }

IterateResult iterate(const Family& fam, Complex z, int m) {
  for (int i = 0; i < m; ++i) {
    if (escaped(z)) return {z, i, true};
    z = evaluate(fam, z);
  }
  return {z, m, escaped(z)};
}

Jet evaluate_jet(const Family& fam, const Jet& z) { return z.pow(fam.d) + Complex(fam.c); }

Jet iterate_jet(const Family& fam, Jet z, int m) {
  for (int i = 0; i < m; ++i) z = evaluate_jet(fam, z);
  return z;
}

namespace {

// Value and derivative of f^k at z.
std::pair<Complex, Complex> iterate_d(const Family& fam, Complex z, int k) {
  Complex dz = 1.0;
  for (int i = 0; i < k; ++i) {
    dz *= derivative(fam, z);
    z = evaluate(fam, z);
  }
  return {z, dz};
}

}  // namespace

Cycle find_cycle(const Family& fam, int k, Complex seed, const CycleOptions& opts) {
  if (k < 1) throw UsageError("period must be >= 1");
  Complex z = seed;
  bool converged = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    auto [fz, dfz] = iterate_d(fam, z, k);
    if (escaped(fz) || escaped(dfz)) throw ConvergenceError("find_cycle: orbit escaped during Newton");
    const Complex g = fz - z;
    const double scale = std::max(1.0, std::abs(z));
    if (std::abs(g) <= opts.tol * scale) {
      converged = true;
      break;
    }
    const Complex dg = dfz - 1.0;
    if (dg == Complex{}) throw ConvergenceError("find_cycle: singular Newton step");
    const Complex step = g / dg;
    z -= step;
    if (std::abs(step) <= opts.tol * scale) {
      converged = true;
      break;
    }
  }
  if (!converged) throw ConvergenceError("find_cycle: no convergence within " + std::to_string(opts.max_iter) + " Newton steps");

  Cycle cyc;
  cyc.period = k;
  cyc.multiplier = 1.0;
  Complex w = z;
  for (int i = 0; i < k; ++i) {
    cyc.points.push_back(w);
    cyc.multiplier *= derivative(fam, w);
    w = evaluate(fam, w);
  }
  cyc.residual = std::abs(w - z);

  const double scale = std::max(1.0, std::abs(z));
  for (int p = 1; p < k; ++p) {
    if (k % p != 0) continue;
    if (std::abs(cyc.points[p] - z) <= opts.period_tol * scale)
      throw PeriodError("find_cycle: converged to a cycle of minimal period " + std::to_string(p) + " dividing " + std::to_string(k), p);
  }
  return cyc;
}

}  // namespace pdim
