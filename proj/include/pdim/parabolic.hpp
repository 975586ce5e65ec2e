#pragma once

#include <vector>

#include "pdim/core.hpp"

namespace pdim {

struct Interval {
  double lo;
  double hi;
};

/// Real slice [a_end, b_end] of the connectedness locus of z^d + c.
struct ConnectednessInterval {
  int d;
  double a_end;
  double b_end;
};

ConnectednessInterval connectedness_interval(int d);

/// A real parabolic parameter together with its local normal form.
///
/// After locate_parabolic, alpha is the positive point of the cycle and
/// the normal-form fields are unset. local_form moves alpha to the cycle
/// point on the boundary of the component that contains 0, and sets
/// orientation = sign(F''(alpha)/2) with a_coef = |F''(alpha)/2|.
struct ParabolicData {
  int d = 2;
  double c0 = 0;
  int k = 1;
  double alpha = 0;
  std::vector<double> cycle;  // starts at alpha
  double fixed_residual = 0;       // |f^k(alpha) - alpha|
  double multiplier_residual = 0;  // |(f^k)'(alpha) - 1|

  bool has_local_form = false;
  double a_coef = 0;
  double b_coef = 0;
  double A = 0;
  int orientation = 1;

  Family family() const { return Family(d, c0); }
  double a_signed() const { return orientation * a_coef; }
};

struct LocateOptions {
  int seeds = 64;
  double tol = 1e-13;
  int max_iter = 100;
};

ParabolicData locate_parabolic(int d, int k, Interval bracket, const LocateOptions& opts = {});

/// Coefficients of F(z) = alpha + (z-alpha) + a(z-alpha)^2 + b(z-alpha)^3 + ...
struct NormalForm {
  double a;
  double b;
  double A;  // 1 - b/a^2
};

/// Reads a, b, A from a jet (order >= 3) of a map at its parabolic fixed point.
NormalForm normal_form(const Jet& germ);

/// Normal form of f^k at an arbitrary point of the cycle.
NormalForm normal_form_at(const ParabolicData& pd, double cycle_point);

/// Index into pd.cycle of the point whose F-basin contains 0.
int basin_cycle_index(const ParabolicData& pd);

ParabolicData local_form(const ParabolicData& pd);

/// Real c nearest c0 at which 0 has exact period k (center of the adjacent window).
double window_center(const ParabolicData& pd);

}  // namespace pdim
