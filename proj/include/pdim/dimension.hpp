#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pdim/ifs.hpp"

namespace pdim {

/// A contraction ratio attached to a lattice label (n, r); label = r + n tau.
struct LabeledRatio {
  int n;
  int r;
  Complex label;
  double value;
};

std::vector<LabeledRatio> upper_ratios(std::span<const IfsBranch> branches, Complex tau);
/// rho(n, r) = |r + n tau|^{-exponent} on n0 <= n <= n_max, |r| <= r_max.
std::vector<LabeledRatio> lattice_model(int n0, int n_max, int r_max, Complex tau, double exponent);

enum class SeriesClass { Convergent, Inconclusive, Divergent };
const char* to_string(SeriesClass c);

/// Sums of value^t over six annuli L/sqrt2 <= |label| < L, the outermost ending at
/// the largest radius whose upper half-disk the (n, r) window covers completely.
/// Annuli cut by the lowest row are rescaled by their covered share.
/// growth_exponent is the slope e of log(sum) = b + e log L + c/L; it approaches
/// 2 - t*exponent for a power-law family and is negative for a convergent one.
struct PressureSeries {
  double t;
  int window_n;
  int window_r;
  double complete_radius;
  double partial_sum;
  std::vector<double> shell_sums;
  double growth_exponent;
  SeriesClass classification;  // Divergent if > 0.05, Convergent if < 0.01
};

PressureSeries pressure_sum(std::span<const LabeledRatio> ratios, double t);

struct ThetaEstimate {
  double lower;  // growth exponent positive here
  double upper;  // and non-positive here
  double estimate() const { return 0.5 * (lower + upper); }
};

/// Bisects t in [lo, hi] on the sign of the growth exponent until the bracket is <= width.
ThetaEstimate theta_estimate(std::span<const LabeledRatio> ratios, double lo = 0.5, double hi = 2.5, double width = 0.02);

/// Root of sum ratios^t = 1 (tolerance 1e-6). Ratios must lie in (0, 1).
double moran_root(std::span<const double> ratios);

struct MoranBounds {
  double t_lower;  // from deriv_min
  double t_upper;  // from deriv_max
  std::size_t branches;
};

MoranBounds moran_bounds(std::span<const IfsBranch> branches);

struct PersistenceReport {
  int N;
  double epsilon;
  double max_defect;  // sup |x_eps - x_0| over sampled points of B0
  double min_expansion;  // min |(f_eps^{N_{n,r}})'(x_eps)|
  double t_lower_perturbed;
  double t_lower_unperturbed;
};

/// Solves f_{c0+eps}^{N_{n,r}}(x) = b for sampled b in B0, seeded by the
/// unperturbed branch x = psi_{n,r}(b), where N_{n,r} = k(N(n+1) - r + 1) + j.
PersistenceReport persistence_check(const IteratedFunctionSystem& ifs, int j, std::span<const IfsBranch> subset,
                                    int N, double epsilon);

/// Binary mask on a pixel grid.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;
  bool at(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }
  std::size_t count() const;
};

struct BoxCount {
  double dimension;
  double std_error;  // standard error of the regression slope
  std::vector<int> sizes;
  std::vector<std::size_t> counts;
};

/// Least-squares slope of log N(s) against log(1/s) over box sizes s (pixels).
BoxCount box_counting(const Mask& mask, std::span<const int> box_sizes);
std::vector<int> dyadic_sizes(int smallest, int count);

}  // namespace pdim
