#pragma once

#include <cstdint>
#include <vector>

#include "pdim/lavaurs.hpp"

namespace pdim {

/// Points on the circle of radius delta/32 about the center of the attracting petal disk.
std::vector<Complex> petal_sample(const FatouEvaluator& ev, int n);

struct FatouSuite {
  double phi_equation;  // max |phi_-(F z) - phi_-(z) - 1|
  double psi_equation;  // max |psi_+(w + 1) - F(psi_+(w))|
  double phi_symmetry;  // max |phi_-(conj z) - conj phi_-(z)|
  double psi_symmetry;  // max |psi_+(conj w) - conj psi_+(w)|
  int points;
};

/// z uniform in the attracting petal disk; w uniform in [-40, 0] x [-10, 10].
FatouSuite fatou_suite(const FatouEvaluator& ev, int points = 1000, std::uint64_t seed = 1);

struct HornFit {
  Complex translation;  // extrapolated limit of I(g(I^-1 w)) - w
  double error;         // |translation - (sigma - iA pi)|
  double raw_error;     // same quantity unextrapolated at |w| = 1e4
};

/// Fits T(w) = T + (p log w + q) / w on the imaginary axis, |w| in [2.5e3, 4e4].
HornFit horn_translation(const LavaursMap& lav);

/// max |g(G(z)) - z| over z = I^-1(w), w uniform in the upper sector with |w| in [30, 300].
double inverse_round_trip(const LavaursMap& lav, int points = 200, std::uint64_t seed = 2);

/// Five-point Cauchy estimate of |g_sigma'(0)| on the circle |z| = 1e-4.
double critical_derivative(const LavaursMap& lav);

struct ImplosionRun {
  std::vector<ImplosionFit> fits;
  std::vector<double> defects;  // sup over the 20-point petal sample
  double slope;                 // log-log slope of epsilon_N against N
};

ImplosionRun implosion_run(const LavaursMap& lav, const std::vector<int>& Ns);

}  // namespace pdim
