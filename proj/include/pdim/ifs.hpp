#pragma once

#include <memory>
#include <span>
#include <vector>

#include "pdim/lavaurs.hpp"

namespace pdim {

struct BaseBall {
  double radius;                 // B0 = D(0, radius)
  double enlarged_radius;        // a larger disk still clear of the postcritical set
  double postcritical_distance;  // min |f^i(c0)| over the sampled critical orbit
};

/// Largest dyadic radius <= 0.05 whose double stays clear of the sampled
/// postcritical set and whose disk lies in the immediate component.
BaseBall choose_base_ball(const FatouEvaluator& ev, int critical_orbit_len);

/// Local inverse h of f^j o g_sigma near alpha: a d-fold cover branched only at 0,
/// inverted on U* = D(alpha, delta) minus the repelling real ray.
///
/// The map H = f^j o g_sigma is expanded at 0 by Cauchy sums on a circle well
/// inside the immediate component; h solves H(v) = zeta on that polynomial.
class BranchInverse {
 public:
  /// radius is an upper bound for the radius of U; the actual radius also keeps
  /// h(U) inside |v| < min(image_bound, convergence radius of the expansion).
  BranchInverse(std::shared_ptr<const LavaursMap> lav, const SigmaSolution& sol, double radius,
                double image_bound = INFINITY);

  double radius() const { return radius_; }
  double leading_coefficient_abs() const { return std::abs(coef_[d_]); }
  /// V* = {arg v in (sector_start, sector_start + 2pi/d)}.
  double sector_start() const { return sector_start_; }
  double v_max() const { return v_max_; }
  /// Sampled distance from 0 to the boundary of the immediate component.
  double inner_radius() const { return inner_radius_; }

  bool in_domain(Complex zeta) const;
  Complex operator()(Complex zeta) const { return eval_d(zeta).value; }
  ValueDeriv eval_d(Complex zeta) const;
  /// Exact f^j o g_sigma (no expansion).
  Complex forward(Complex v) const;
  /// Polynomial model of f^j o g_sigma.
  Complex forward_model(Complex v) const;

 private:
  std::shared_ptr<const LavaursMap> lav_;
  int j_;
  int d_;
  double alpha_;
  int orientation_;
  double radius_;
  double v_max_ = 0;
  double inner_radius_ = 0;
  double sector_start_ = 0;
  std::vector<Complex> coef_;  // H(v) - alpha = sum_{i>=d} coef_[i] v^i
};

struct IfsBranch {
  int n;
  int r;
  double deriv_min;  // sampled min of |psi'| divided by the margin
  double deriv_max;  // sampled max of |psi'| times the margin
  Complex image_center;
  double image_radius;  // deriv_max * radius(B0)
};

struct IfsOptions {
  int grid_radial = 16;
  int grid_angular = 16;
  double margin = 1.25;
  int critical_orbit_len = 1000;
};

/// The branches psi_{n,r} = h o F^r o G^n o F^{-1} acting on B0.
class IteratedFunctionSystem {
 public:
  IteratedFunctionSystem(std::shared_ptr<const LavaursMap> lav, const SigmaSolution& sol, IfsOptions opts = {});

  const BaseBall& ball() const { return ball_; }
  const BranchInverse& h() const { return h_; }
  const LavaursMap& lavaurs() const { return *lav_; }
  const IfsOptions& options() const { return opts_; }
  int n0() const { return n0_; }
  Complex preimage_center() const { return b_center_; }
  /// Lattice label r + n(-sigma + i pi A).
  Complex label(int n, int r) const;
  Complex label_step() const;

  ValueDeriv apply_d(int n, int r, Complex z) const;
  Complex apply(int n, int r, Complex z) const { return apply_d(n, r, z).value; }
  Complex fixed_point(int n, int r) const;

  IfsBranch build_branch(int n, int r) const;
  /// All branches with n0 <= n <= n_max and |r| <= r_max.
  std::vector<IfsBranch> build_window(int n_max, int r_max) const;

 private:
  ValueDeriv preimage_d(Complex z) const;
  std::vector<Complex> samples() const;

  std::shared_ptr<const LavaursMap> lav_;
  IfsOptions opts_;
  BaseBall ball_;
  BranchInverse h_;
  Complex b_center_;
  int n0_ = 1;
};

struct SeparationReport {
  bool disjoint = true;
  bool contained = true;
  double min_gap = 0;  // min over pairs and over the boundary of B0
  double max_radius = 0;
  std::size_t count = 0;
  bool valid() const { return disjoint && contained && min_gap > 0; }
};

SeparationReport separation_check(std::span<const IfsBranch> branches, const BaseBall& ball);

/// Two-sided law C^{-1} rho <= |psi'| <= C rho with rho = |label|^{-1-1/d}.
struct DerivativeLaw {
  double scale;       // geometric-mean fitted K in |psi'| ~ K rho
  double c1_fitted;   // smallest C with C^{-1} K rho <= |psi'| <= C K rho
  double c1_raw;      // the same with K = 1
  double distortion;  // max deriv_max / deriv_min
};

DerivativeLaw derivative_law(std::span<const IfsBranch> branches, Complex label_step, int d);

}  // namespace pdim
