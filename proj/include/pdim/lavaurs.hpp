#pragma once

#include <memory>
#include <span>
#include <vector>

#include "pdim/fatou.hpp"

namespace pdim {

/// g_sigma = psi_plus o T_sigma o phi_minus on the immediate component at alpha,
/// where T_sigma(w) = w + sigma.
class LavaursMap {
 public:
  LavaursMap(std::shared_ptr<const FatouEvaluator> ev, double sigma);

  double sigma() const { return sigma_; }
  const FatouEvaluator& evaluator() const { return *ev_; }
  std::shared_ptr<const FatouEvaluator> evaluator_ptr() const { return ev_; }
  const ParabolicData& parabolic() const { return *ev_->parabolic(); }
  /// f-step budget used when following orbits into the petal.
  int landing_budget() const;

  Complex eval(Complex z) const { return eval_d(z).value; }
  /// Requires z in the immediate component (DomainError otherwise).
  ValueDeriv eval_d(Complex z) const;
  /// Same formula without the membership check (any point of the F-basin).
  ValueDeriv eval_unchecked(Complex z) const;

  struct Extension {
    Complex value;
    Complex deriv;
    int landing;  // first m with f^m(z) in the immediate component
  };
  Extension extend(Complex z) const;

  /// Branch G of g_sigma^{-1} on the oriented upper half-plane near alpha,
  /// with I(G(z)) = I(z) - sigma + iA pi + O(1/|I(z)|).
  Complex inverse_branch(Complex z) const { return inverse_branch_d(z).value; }
  ValueDeriv inverse_branch_d(Complex z) const;

 private:
  bool solve_branch(Complex z, Complex seed, Complex& y, Complex& dg) const;

  std::shared_ptr<const FatouEvaluator> ev_;
  double sigma_;
};

struct SigmaSolution {
  double sigma;
  int j;            // f^j(x_target) = alpha
  double x_target;  // g_sigma(0)
  double residual;  // |f^j(g_sigma(0)) - alpha|
};

/// Real critical points of F = f^k.
std::vector<double> real_critical_points(const ParabolicData& pd);

/// Phases sigma for which g_sigma(0) is a real preimage of alpha of depth <= j_max
/// inside the monotone part of the real repelling slice. Sorted by (j, sigma).
std::vector<SigmaSolution> find_sigma(std::shared_ptr<const FatouEvaluator> ev, int j_max);

struct ImplosionFit {
  int N;
  double epsilon;
  double phase;       // tau in epsilon = pi^2 / (a beta (N - tau)^2)
  double test_error;  // |f_{c0+eps}^{kN}(z_test) - g_sigma(z_test)|
};

/// d(f^k)/dc at alpha, signed by the orientation.
double parameter_speed(const ParabolicData& pd);

ImplosionFit implosion_fit(const LavaursMap& lav, int N, Complex z_test);
double implosion_defect(const LavaursMap& lav, int N, double epsilon, std::span<const Complex> points);

}  // namespace pdim
