#include "pdim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "pdim/error.hpp"

namespace pdim {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(std::string_view key, std::string_view value, const char* expected) {
  throw UsageError("config key '" + std::string(key) + "': cannot read '" + std::string(value) + "' as " + expected);
}

template <class T>
T number(std::string_view key, std::string_view value, const char* expected) {
  const auto v = trim(value);
  T out{};
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) bad(key, value, expected);
  return out;
}

std::vector<std::string_view> split(std::string_view s) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) return out;
    s.remove_prefix(comma + 1);
  }
}

std::string fmt(double x) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string fmt_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

struct Entry {
  ConfigKey key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

Entry int_entry(const char* name, const char* doc, int RunConfig::*field) {
  return {{name, doc},
          [=](RunConfig& c, std::string_view v) { c.*field = number<int>(name, v, "an integer"); },
          [=](const RunConfig& c) { return std::to_string(c.*field); }};
}

Entry real_entry(const char* name, const char* doc, double RunConfig::*field) {
  return {{name, doc},
          [=](RunConfig& c, std::string_view v) { c.*field = number<double>(name, v, "a number"); },
          [=](const RunConfig& c) { return fmt(c.*field); }};
}

Entry pair_entry(const char* name, const char* doc, int RunConfig::*a, int RunConfig::*b) {
  return {{name, doc},
          [=](RunConfig& c, std::string_view v) {
            const auto parts = split(v);
            if (parts.size() != 2) bad(name, v, "two comma-separated integers");
            c.*a = number<int>(name, parts[0], "an integer");
            c.*b = number<int>(name, parts[1], "an integer");
          },
          [=](const RunConfig& c) { return std::to_string(c.*a) + "," + std::to_string(c.*b); }};
}

Entry list_entry(const char* name, const char* doc, std::vector<int> RunConfig::*field) {
  return {{name, doc},
          [=](RunConfig& c, std::string_view v) {
            std::vector<int> out;
            for (auto part : split(v)) out.push_back(number<int>(name, part, "a list of integers"));
            c.*field = out;
          },
          [=](const RunConfig& c) { return fmt_list(c.*field); }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      int_entry("d", "degree of z^d + c, even and >= 2", &RunConfig::d),
      int_entry("k", "period of the parabolic cycle", &RunConfig::k),
      {{"bracket", "real parameter interval searched for c0, as lo,hi"},
       [](RunConfig& c, std::string_view v) {
         const auto parts = split(v);
         if (parts.size() != 2) bad("bracket", v, "lo,hi");
         c.bracket_lo = number<double>("bracket", parts[0], "a number");
         c.bracket_hi = number<double>("bracket", parts[1], "a number");
       },
       [](const RunConfig& c) { return fmt(c.bracket_lo) + "," + fmt(c.bracket_hi); }},
      int_entry("j_max", "largest preimage depth searched for the phase", &RunConfig::j_max),
      pair_entry("window", "IFS window n_max,r_max checked for separation", &RunConfig::window_n, &RunConfig::window_r),
      pair_entry("theta_window", "window n_max,r_max used for the convergence exponent", &RunConfig::theta_n,
                 &RunConfig::theta_r),
      real_entry("theta_width", "bisection bracket width for the convergence exponent", &RunConfig::theta_width),
      list_entry("moran_windows", "increasing sizes of nested windows for the Moran bounds", &RunConfig::moran_windows),
      list_entry("implosion_n", "increasing N used for the implosion fits", &RunConfig::implosion_n),
      int_entry("persistence_branches", "branches with the largest derivative used by the persistence check",
                &RunConfig::persistence_branches),
      int_entry("grid_size", "pixels per side of the Julia renders", &RunConfig::grid_size),
      real_entry("half_width", "half side length of the rendered square", &RunConfig::half_width),
      {{"grid_center", "center of the rendered square, as re,im"},
       [](RunConfig& c, std::string_view v) {
         const auto parts = split(v);
         if (parts.size() != 2) bad("grid_center", v, "re,im");
         c.grid_center = {number<double>("grid_center", parts[0], "a number"),
                          number<double>("grid_center", parts[1], "a number")};
       },
       [](const RunConfig& c) { return fmt(c.grid_center.real()) + "," + fmt(c.grid_center.imag()); }},
      int_entry("max_iter", "escape-time iteration budget per stage, >= 100", &RunConfig::max_iter),
      int_entry("lavaurs_grid", "pixels per side of the Julia-Lavaurs render", &RunConfig::lavaurs_grid),
      int_entry("m_max", "Lavaurs steps allowed per pixel", &RunConfig::m_max),
      int_entry("box_smallest", "smallest box side (pixels) at grid_size", &RunConfig::box_smallest),
      int_entry("box_scales", "number of dyadic box sizes at grid_size", &RunConfig::box_scales),
      {{"write_masks", "also write membership masks as CSV (true/false)"},
       [](RunConfig& c, std::string_view v) {
         const auto t = trim(v);
         if (t == "true" || t == "1") c.write_masks = true;
         else if (t == "false" || t == "0") c.write_masks = false;
         else bad("write_masks", v, "true or false");
       },
       [](const RunConfig& c) { return std::string(c.write_masks ? "true" : "false"); }},
      real_entry("locate_tol", "Newton tolerance of the parabolic locator", &RunConfig::locate_tol),
      real_entry("fatou_tol", "relative Newton tolerance inside the Fatou coordinates", &RunConfig::fatou_tol),
      int_entry("fatou_points", "sample size of the functional-equation suite", &RunConfig::fatou_points),
      int_entry("critical_orbit_len", "critical-orbit samples used to choose the base ball",
                &RunConfig::critical_orbit_len),
      {{"seed", "seed of the sampling generators"},
       [](RunConfig& c, std::string_view v) { c.seed = number<std::uint64_t>("seed", v, "an unsigned integer"); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      {{"output_dir", "directory receiving reports, tables and images"},
       [](RunConfig& c, std::string_view v) { c.output_dir = std::string(trim(v)); },
       [](const RunConfig& c) { return c.output_dir; }},
  };
  return table;
}

const Entry& find(std::string_view key) {
  for (const auto& e : entries())
    if (key == e.key.name) return e;
  throw UsageError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& e : entries()) out.push_back(e.key);
    return out;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) { find(key).set(cfg, value); }

std::string get_config_value(const RunConfig& cfg, std::string_view key) { return find(key).get(cfg); }

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& e : entries()) {
    out += "# ";
    out += e.key.doc;
    out += "\n";
    out += e.key.name;
    out += " = " + e.get(cfg) + "\n";
  }
  return out;
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw UsageError(std::string("config key '") + key + "': " + what);
  };
  auto increasing = [](const std::vector<int>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] <= v[i - 1]) return false;
    return true;
  };
  require(c.d >= 2 && c.d % 2 == 0, "d", "must be even and >= 2");
  require(c.k >= 1, "k", "must be >= 1");
  require(std::isfinite(c.bracket_lo) && std::isfinite(c.bracket_hi) && c.bracket_lo < c.bracket_hi, "bracket",
          "needs finite lo < hi");
  require(c.j_max >= 1, "j_max", "must be >= 1");
  require(c.window_n >= 1 && c.window_r >= 0, "window", "needs n_max >= 1 and r_max >= 0");
  require(c.theta_n >= 10 && c.theta_r >= 10, "theta_window", "needs n_max, r_max >= 10");
  require(c.theta_width > 0, "theta_width", "must be positive");
  require(c.moran_windows.size() >= 2 && increasing(c.moran_windows) && c.moran_windows.front() >= 1, "moran_windows",
          "needs at least two strictly increasing positive sizes");
  require(c.implosion_n.size() >= 2 && increasing(c.implosion_n) && c.implosion_n.front() >= 10, "implosion_n",
          "needs at least two strictly increasing values >= 10");
  require(c.persistence_branches >= 1, "persistence_branches", "must be >= 1");
  require(c.grid_size >= 16, "grid_size", "must be >= 16");
  require(c.half_width > 0, "half_width", "must be positive");
  require(std::isfinite(c.grid_center.real()) && std::isfinite(c.grid_center.imag()), "grid_center", "must be finite");
  require(c.max_iter >= 100, "max_iter", "must be >= 100");
  require(c.lavaurs_grid >= 16, "lavaurs_grid", "must be >= 16");
  require(c.m_max >= 0, "m_max", "must be >= 0");
  require(c.box_smallest >= 1, "box_smallest", "must be >= 1");
  require(c.box_scales >= 4, "box_scales", "must be >= 4");
  require(c.box_scales < 30 && (c.box_smallest << (c.box_scales - 1)) <= c.grid_size / 2, "box_scales",
          "largest box must fit twice into the grid");
  require(c.locate_tol > 0, "locate_tol", "must be positive");
  require(c.fatou_tol > 0, "fatou_tol", "must be positive");
  require(c.fatou_points >= 1, "fatou_points", "must be >= 1");
  require(c.critical_orbit_len >= 1, "critical_orbit_len", "must be >= 1");
  require(!c.output_dir.empty(), "output_dir", "must not be empty");
}

}  // namespace pdim
