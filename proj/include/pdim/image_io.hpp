#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdim/render.hpp"

namespace pdim {

/// 8-bit grayscale PNG, rows top to bottom.
void write_png_gray(const std::string& path, int width, int height, const std::vector<std::uint8_t>& pixels);
/// Binary PPM (P6) from interleaved RGB bytes.
void write_ppm(const std::string& path, int width, int height, const std::vector<std::uint8_t>& rgb);
/// One row per line, 0/1 separated by commas.
void write_mask_csv(const std::string& path, const Mask& mask);
Mask read_mask_csv(const std::string& path);

/// Members black, escaped white, interior light gray, undetermined mid gray.
std::vector<std::uint8_t> grayscale(const Grid& grid);
/// Members black, escaped shaded by iteration count, interior blue, undetermined red.
std::vector<std::uint8_t> palette_rgb(const Grid& grid);

}  // namespace pdim
