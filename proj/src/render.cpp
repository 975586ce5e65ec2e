#include "pdim/render.hpp"

#include <algorithm>
#include <cmath>

#include "pdim/error.hpp"
#include "pdim/parallel.hpp"

namespace pdim {

GridSpec GridSpec::centered(Complex center, double half_width, int n) {
  if (n < 1 || !(half_width > 0)) throw UsageError("grid needs n >= 1 and a positive half width");
  const double ps = 2 * half_width / n;
  return {center + Complex(-half_width + 0.5 * ps, half_width - 0.5 * ps), ps, n, n};
}

Mask Grid::member_mask() const {
  Mask m{spec.width, spec.height, std::vector<std::uint8_t>(cells.size())};
  for (std::size_t i = 0; i < cells.size(); ++i) m.bits[i] = cells[i].state == CellState::Member;
  return m;
}

std::size_t Grid::count(CellState s) const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [s](const Cell& c) { return c.state == s; }));
}

double Grid::undetermined_fraction() const {
  return cells.empty() ? 0.0 : static_cast<double>(count(CellState::Undetermined)) / cells.size();
}

namespace {

void check(const GridSpec& spec, const RenderOptions& opts) {
  if (spec.width < 1 || spec.height < 1 || !(spec.pixel_size > 0)) throw UsageError("grid needs positive size and pixel_size");
  if (opts.max_iter < 100) throw UsageError("render needs max_iter >= 100");
  if (!(opts.bailout > 2)) throw UsageError("bailout radius must exceed 2");
}

enum class Stage { Escaped, Attracted, Bounded };

// Iterates f from (z, dz) until escape, attraction, or the budget runs out.
Stage run(const Family& fam, Complex& z, Complex& dz, int& iters, const RenderOptions& opts) {
  for (int i = 0; i < opts.max_iter; ++i) {
    if (std::norm(z) > opts.bailout * opts.bailout) return Stage::Escaped;
    dz *= derivative(fam, z);
    z = evaluate(fam, z);
    ++iters;
    if (std::abs(dz) < opts.interior_derivative) return Stage::Attracted;
  }
  return std::norm(z) > opts.bailout * opts.bailout ? Stage::Escaped : Stage::Bounded;
}

void classify_escape(Cell& cell, Complex z, Complex dz, double pixel_size) {
  const double r = std::abs(z);
  cell.distance = r * std::log(r) / std::abs(dz);
  cell.state = cell.distance < pixel_size ? CellState::Member : CellState::Escaped;
}

}  // namespace

Grid render_julia(const Family& fam, const GridSpec& spec, const RenderOptions& opts) {
  check(spec, opts);
  Grid g{spec, std::vector<Cell>(static_cast<std::size_t>(spec.width) * spec.height)};
  parallel_for(static_cast<std::size_t>(spec.height), [&](std::size_t y) {
    for (int x = 0; x < spec.width; ++x) {
      Cell& cell = g.cells[y * spec.width + x];
      Complex z = spec.pixel(x, static_cast<int>(y)), dz = 1.0;
      if (run(fam, z, dz, cell.iterations, opts) == Stage::Escaped)
        classify_escape(cell, z, dz, spec.pixel_size);
      else
        cell.state = CellState::Interior;
    }
  });
  return g;
}

Grid render_julia_lavaurs(const LavaursMap& lav, const GridSpec& spec, int m_max, const RenderOptions& opts) {
  check(spec, opts);
  if (m_max < 0) throw UsageError("m_max must be non-negative");
  const auto fam = lav.parabolic().family();
  Grid g{spec, std::vector<Cell>(static_cast<std::size_t>(spec.width) * spec.height)};
  parallel_for(static_cast<std::size_t>(spec.height), [&](std::size_t y) {
    for (int x = 0; x < spec.width; ++x) {
      Cell& cell = g.cells[y * spec.width + x];
      Complex z = spec.pixel(x, static_cast<int>(y)), dz = 1.0;
      cell.state = CellState::Interior;
      for (int m = 0;; ++m) {
        const Complex z_stage = z, dz_stage = dz;
        if (run(fam, z, dz, cell.iterations, opts) == Stage::Escaped) {
          classify_escape(cell, z, dz, spec.pixel_size);
          break;
        }
        if (m == m_max) break;
        // g_sigma commutes with the return map, so apply it at the first landing of the stage start.
        try {
          const auto e = lav.extend(z_stage);
          z = e.value;
          dz = dz_stage * e.deriv;
          cell.lavaurs_steps = m + 1;
        } catch (const EscapeError&) {
          cell.state = CellState::Escaped;  // the Lavaurs image overflowed: far out in the basin of infinity
          break;
        } catch (const Error&) {
          cell.state = CellState::Undetermined;
          break;
        }
        if (escaped(z) || !std::isfinite(std::abs(dz))) {
          cell.state = CellState::Undetermined;
          break;
        }
      }
    }
  });
  return g;
}

}  // namespace pdim
