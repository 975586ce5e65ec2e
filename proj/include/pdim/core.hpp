#pragma once

#include <vector>

#include "pdim/jet.hpp"

namespace pdim {

/// Orbits whose modulus exceeds this are reported as escaped.
inline constexpr double kEscapeCeiling = 1e150;

inline bool escaped(Complex z) { return !(std::abs(z) <= kEscapeCeiling); }

/// The polynomial family f(z) = z^d + c with d even and c real.
struct Family {
  int d;
  double c;

  Family(int degree, double param);
};

Complex ipow(Complex z, int e);
Complex evaluate(const Family& fam, Complex z);
Complex derivative(const Family& fam, Complex z);

struct IterateResult {
  Complex z;
  int steps;  // iterations actually performed
  bool escaped;
};

/// Applies f up to m times, stopping early on escape.
IterateResult iterate(const Family& fam, Complex z, int m);

Jet evaluate_jet(const Family& fam, const Jet& z);
Jet iterate_jet(const Family& fam, Jet z, int m);

struct Cycle {
  std::vector<Complex> points;  // z, f(z), ..., f^{k-1}(z)
  int period;
  Complex multiplier;  // (f^k)' along the cycle
  double residual;     // |f^k(z) - z|
};

struct CycleOptions {
  double tol = 1e-12;
  int max_iter = 200;
  double period_tol = 1e-6;
};

/// Newton on f^k(z) - z from seed. Throws PeriodError when the limit
/// has a smaller minimal period and ConvergenceError when Newton stalls.
Cycle find_cycle(const Family& fam, int k, Complex seed, const CycleOptions& opts = {});

}  // namespace pdim
