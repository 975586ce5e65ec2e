#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "pdim/core.hpp"
#include "pdim/parabolic.hpp"

namespace pdim {

struct ValueDeriv {
  Complex value;
  Complex deriv;
};

inline Complex inv(Complex z) { return 1.0 / z; }
inline Jet inv(const Jet& j) { return j.reciprocal(); }

/// A holomorphic map with a parabolic fixed point, seen as the return map F.
class ReturnMap {
 public:
  virtual ~ReturnMap() = default;
  virtual Complex apply(Complex z) const = 0;
  /// Returns F(z) and multiplies dz by F'(z).
  virtual Complex apply(Complex z, Complex& dz) const = 0;
  virtual Jet apply(const Jet& z) const = 0;
  /// Order at which apply(Jet) is an exact local representation (polynomial degree) or a safe truncation.
  virtual int taylor_order() const { return 40; }
};

/// F = f^k for f(z) = z^d + c.
class PolynomialReturnMap final : public ReturnMap {
 public:
  PolynomialReturnMap(Family fam, int k) : fam_(fam), k_(k) {}
  Complex apply(Complex z) const override;
  Complex apply(Complex z, Complex& dz) const override;
  Jet apply(const Jet& z) const override { return iterate_jet(fam_, z, k_); }
  int taylor_order() const override;

 private:
  Family fam_;
  int k_;
};

/// Wraps a generic callable usable on both Complex and Jet arguments.
template <class Fn>
class FunctionReturnMap final : public ReturnMap {
 public:
  explicit FunctionReturnMap(Fn fn) : fn_(std::move(fn)) {}
  Complex apply(Complex z) const override { return fn_(z); }
  Complex apply(Complex z, Complex& dz) const override {
    const Jet j = fn_(Jet::variable(z, 1));
    dz *= j[1];
    return j[0];
  }
  Jet apply(const Jet& z) const override { return fn_(z); }

 private:
  Fn fn_;
};

/// Local data at the parabolic point: F(z) = alpha + (z-alpha) + a_signed (z-alpha)^2 + ...
struct Germ {
  double alpha = 0;
  double a_coef = 1;  // |F''(alpha)/2|
  int orientation = 1;
  double A = 1;
  double a_signed() const { return orientation * a_coef; }
};

Germ germ_of(const ParabolicData& pd);

/// I(z) = -1/(a_signed (z - alpha)).
Complex approx_coord(const ParabolicData& pd, Complex z);
Complex approx_coord_inv(const ParabolicData& pd, Complex w);
/// F_inf(w) = I(F(I^{-1}(w))) for the polynomial return map.
Complex conjugated_map(const ParabolicData& pd, Complex w);

/// Truncated sectors in the w-plane. attracting: Re w > R - kappa|Im w|;
/// repelling: Re w < -R + kappa|Im w|; their intersection is |Re w| < kappa|Im w| - R.
struct SectorSpec {
  double kappa = 1;
  double radius = 20;
  bool attracting(Complex w) const { return w.real() > radius - kappa * std::abs(w.imag()); }
  bool repelling(Complex w) const { return w.real() < -radius + kappa * std::abs(w.imag()); }
  bool upper(Complex w) const { return w.imag() > 0 && attracting(w) && repelling(w); }
};

struct FatouOptions {
  int n_max = 5000;
  double tol = 1e-14;  // relative Newton tolerance when inverting the repelling series
  double delta = 0;    // 0 picks the largest valid dyadic radius <= 0.1
  double attracting_radius = 20;
  double repelling_radius = 20;
  double sector_slope = 1;
  int series_order = 12;
};

/// Outcome of following an f-orbit into the attracting petal disk.
struct Landing {
  enum class Status { Landed, Escaped, Exhausted };
  Status status;
  int steps;  // first f-iterate inside the immediate component (valid when Landed)
};

/// Attracting and repelling Fatou coordinates of a return map at its parabolic point.
///
/// phi_minus(z) = lim Phi(I(F^n z)) - n, where Phi(w) = w - A log w + sum c_j w^-j
/// is the formal Fatou coordinate at infinity; psi_plus inverts the repelling
/// analogue u - A log_+ u + iA pi + sum c_j u^-j and pushes forward by F.
class FatouEvaluator {
 public:
  explicit FatouEvaluator(const ParabolicData& pd, FatouOptions opts = {});
  /// Synthetic maps: the germ at alpha is read from map's jet.
  FatouEvaluator(std::shared_ptr<const ReturnMap> map, double alpha, FatouOptions opts = {});

  const Germ& germ() const { return germ_; }
  const ReturnMap& map() const { return *map_; }
  const FatouOptions& options() const { return opts_; }
  const std::optional<ParabolicData>& parabolic() const { return pd_; }
  double delta() const { return delta_; }
  const std::vector<Complex>& series_coefficients() const { return coef_; }
  SectorSpec attracting_sector() const { return {opts_.sector_slope, opts_.attracting_radius}; }
  SectorSpec repelling_sector() const { return {opts_.sector_slope, opts_.repelling_radius}; }

  Complex approx_coord(Complex z) const;
  Complex approx_coord_inv(Complex w) const;
  Complex conjugated_map(Complex w) const;
  /// Sampled sup of |w|^2 |F_inf(w) - w - 1 - A/w| on |w| = 100.
  double conjugated_map_bound() const;

  Complex attracting_series(Complex w) const;
  Complex attracting_series_deriv(Complex w) const;
  Complex repelling_series(Complex u) const;
  Complex repelling_series_deriv(Complex u) const;

  Complex phi_minus(Complex z) const { return phi_minus_d(z).value; }
  ValueDeriv phi_minus_d(Complex z) const;
  Complex psi_plus(Complex w) const { return psi_plus_d(w).value; }
  ValueDeriv psi_plus_d(Complex w) const;

  /// Branch of F^{-1} fixing alpha, for z close to alpha.
  Complex inverse_step(Complex z) const;
  ValueDeriv inverse_step_d(Complex z) const;

  bool in_attracting_disk(Complex z) const;
  /// F-orbit reaches the attracting disk within 10 n_max steps.
  bool in_basin(Complex z) const;
  /// First f-iterate of z in the immediate component at alpha (requires polynomial data).
  Landing landing_time(Complex z, int budget) const;

 private:
  void setup();
  double choose_delta() const;

  std::shared_ptr<const ReturnMap> map_;
  Germ germ_;
  FatouOptions opts_;
  std::optional<ParabolicData> pd_;
  double delta_ = 0;
  std::vector<Complex> coef_;   // c_1..c_J
  std::vector<Complex> p_poly_;  // P(u) with F_inf(w) = w / P(1/w)
  std::vector<Complex> s_poly_;  // S(u) with F_inf(w) = w + 1 - S(u)/P(u)
};

}  // namespace pdim
