#include "pdim/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "pdim/error.hpp"

namespace pdim {

namespace {

std::uint8_t gray_of(const Cell& c) {
  switch (c.state) {
    case CellState::Member: return 0;
    case CellState::Escaped: return 255;
    case CellState::Interior: return 200;
    default: return 128;
  }
}

}  // namespace

void write_png_gray(const std::string& path, int width, int height, const std::vector<std::uint8_t>& pixels) {
  if (pixels.size() != static_cast<std::size_t>(width) * height) throw UsageError("write_png_gray: size mismatch");
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw UsageError("cannot open " + path + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw NumericalError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw NumericalError("libpng failed writing " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) png_write_row(png, pixels.data() + static_cast<std::size_t>(y) * width);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void write_ppm(const std::string& path, int width, int height, const std::vector<std::uint8_t>& rgb) {
  if (rgb.size() != 3 * static_cast<std::size_t>(width) * height) throw UsageError("write_ppm: size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open " + path + " for writing");
  out << "P6\n" << width << ' ' << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
}

void write_mask_csv(const std::string& path, const Mask& mask) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open " + path + " for writing");
  std::string line;
  for (int y = 0; y < mask.height; ++y) {
    line.clear();
    for (int x = 0; x < mask.width; ++x) {
      if (x) line += ',';
      line += mask.at(x, y) ? '1' : '0';
    }
    out << line << '\n';
  }
}

Mask read_mask_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  Mask m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int w = 0;
    for (char ch : line) {
      if (ch == ',') continue;
      if (ch != '0' && ch != '1') throw UsageError("mask CSV holds a value other than 0/1");
      m.bits.push_back(ch == '1');
      ++w;
    }
    if (m.height == 0) m.width = w;
    if (w != m.width) throw UsageError("mask CSV rows differ in length");
    ++m.height;
  }
  return m;
}

std::vector<std::uint8_t> grayscale(const Grid& grid) {
  std::vector<std::uint8_t> px(grid.cells.size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = gray_of(grid.cells[i]);
  return px;
}

std::vector<std::uint8_t> palette_rgb(const Grid& grid) {
  std::vector<std::uint8_t> rgb(3 * grid.cells.size());
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const Cell& c = grid.cells[i];
    std::uint8_t r = 0, g = 0, b = 0;
    switch (c.state) {
      case CellState::Member: break;
      case CellState::Escaped: {
        const double s = 1.0 - 0.6 * std::exp(-0.02 * c.iterations);
        r = g = static_cast<std::uint8_t>(255 * s);
        b = 255;
        break;
      }
      case CellState::Interior: r = 40, g = 70, b = 160; break;
      case CellState::Undetermined: r = 200, g = 30, b = 30; break;
    }
    rgb[3 * i] = r;
    rgb[3 * i + 1] = g;
    rgb[3 * i + 2] = b;
  }
  return rgb;
}

}  // namespace pdim
