#pragma once

#include <cstdint>
#include <vector>

#include "pdim/dimension.hpp"
#include "pdim/lavaurs.hpp"

namespace pdim {

/// Pixel (x, y) has center origin + x*pixel_size - i*y*pixel_size: row 0 is the top.
struct GridSpec {
  Complex origin;
  double pixel_size;
  int width;
  int height;

  /// Square grid of n x n pixels covering [center - half, center + half]^2.
  static GridSpec centered(Complex center, double half_width, int n);
  Complex pixel(int x, int y) const { return origin + Complex(x * pixel_size, -y * pixel_size); }
};

enum class CellState : std::uint8_t { Escaped, Member, Interior, Undetermined };

struct Cell {
  CellState state = CellState::Undetermined;
  int iterations = 0;      // f-iterations before escape, over all stages
  double distance = 0;     // distance estimate in the pixel plane (escaped cells only)
  int lavaurs_steps = 0;   // g_sigma applications used
};

struct Grid {
  GridSpec spec;
  std::vector<Cell> cells;

  const Cell& at(int x, int y) const { return cells[static_cast<std::size_t>(y) * spec.width + x]; }
  Mask member_mask() const;
  std::size_t count(CellState s) const;
  double undetermined_fraction() const;
};

struct RenderOptions {
  int max_iter = 2000;
  double bailout = 1e8;
  double interior_derivative = 1e-12;  // orbit derivative below this marks an attracted point
};

/// Escape time with derivative tracking; escaped pixels whose distance estimate
/// |z| log|z| / |dz| is below pixel_size are members. Bounded orbits are Interior.
Grid render_julia(const Family& fam, const GridSpec& spec, const RenderOptions& opts = {});

/// Alternates f-iteration with the extended Lavaurs map: a pixel is a member once an
/// escaping stage of its orbit has pulled-back distance estimate below pixel_size.
/// Orbits still bounded after m_max Lavaurs steps are Interior; failed landings are Undetermined.
Grid render_julia_lavaurs(const LavaursMap& lav, const GridSpec& spec, int m_max, const RenderOptions& opts = {});

}  // namespace pdim
