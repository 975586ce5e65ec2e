#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pdim/core.hpp"

namespace pdim {

/// Settings of a run. On disk: one `key = value` per line, `#` starts a comment,
/// lists are comma separated. See config_keys() for the documented keys.
struct RunConfig {
  int d = 2;
  int k = 3;
  double bracket_lo = -1.8;
  double bracket_hi = -1.7;
  int j_max = 10;

  int window_n = 30;  // IFS window n <= window_n, |r| <= window_r
  int window_r = 30;
  int theta_n = 80;  // window used for the convergence exponent
  int theta_r = 160;
  double theta_width = 0.02;
  std::vector<int> moran_windows{6, 12, 18, 24, 30};  // nested windows with n, |r| <= value
  std::vector<int> implosion_n{100, 200, 400};
  int persistence_branches = 8;

  int grid_size = 2048;
  double half_width = 2.0;
  Complex grid_center = 0.0;
  int max_iter = 2000;
  int lavaurs_grid = 1024;
  int m_max = 3;
  int box_smallest = 2;
  int box_scales = 7;
  bool write_masks = false;

  double locate_tol = 1e-13;
  double fatou_tol = 1e-14;
  int fatou_points = 1000;
  int critical_orbit_len = 1000;
  std::uint64_t seed = 1;
  std::string output_dir = "pdim_out";
};

struct ConfigKey {
  const char* name;
  const char* doc;
};

const std::vector<ConfigKey>& config_keys();

/// Throws UsageError for unknown keys or malformed values.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);
std::string get_config_value(const RunConfig& cfg, std::string_view key);

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);
/// Documented key = value text; parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const RunConfig& cfg);

/// Throws UsageError naming the first offending key.
void validate(const RunConfig& cfg);

}  // namespace pdim
