// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <tuple>

#include "pdim/error.hpp"
#include "pdim/pipeline.hpp"

using namespace pdim;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
  bool ok = false;
  std::string detail;
  try {
    std::tie(ok, detail) = body();
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  failures += !ok;
  std::printf("%s %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 2-D Newton on (f^3(z) - z, (f^3)'(z) - 1) for z^2 + c, finite-difference Jacobian.
std::pair<double, double> tangency_oracle(double z, double c) {
  auto residual = [](double z, double c) {
    double x = z, dx = 1;
    for (int i = 0; i < 3; ++i) {
      dx *= 2 * x;
      x = x * x + c;
    }
    return std::pair{x - z, dx - 1};
  };
  for (int it = 0; it < 100; ++it) {
    const auto [g1, g2] = residual(z, c);
    const double h = 1e-7;
    const auto [a1, a2] = residual(z + h, c);
    const auto [b1, b2] = residual(z, c + h);
    const double j11 = (a1 - g1) / h, j21 = (a2 - g2) / h, j12 = (b1 - g1) / h, j22 = (b2 - g2) / h;
    const double det = j11 * j22 - j12 * j21;
    const double dz = (g1 * j22 - j12 * g2) / det, dc = (j11 * g2 - j21 * g1) / det;
    z -= dz;
    c -= dc;
    if (std::abs(dz) + std::abs(dc) < 1e-15) break;
  }
  return {z, c};
}

Mask blank(int n) { return {n, n, std::vector<std::uint8_t>(static_cast<std::size_t>(n) * n, 0)}; }

bool in_dust(int x) {
  for (; x > 0; x /= 4)
    if (x % 4 == 1 || x % 4 == 2) return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  cfg.output_dir = argc > 1 ? argv[1] : "acceptance_out";
  Pipeline p2(cfg);

  report(1, "parabolic location", [] {
    const auto t0 = Clock::now();
    const auto pd = locate_parabolic(2, 3, {-1.8, -1.7});
    const double secs = seconds_since(t0);
    const auto [z, c] = tangency_oracle(1.3, -1.75);
    const bool ok = std::abs(pd.c0 + 1.75) < 1e-8 && pd.alpha > 0 && pd.multiplier_residual < 1e-9 &&
                    std::abs(pd.c0 - c) < 1e-8 && std::abs(pd.alpha - z) < 1e-6 && secs < 1;
    return std::pair{ok, fmt("c0=%.15g alpha=%.12g |mult-1|=%.2e oracle |dc|=%.1e |dz|=%.1e time=%.3fs", pd.c0, pd.alpha,
                             pd.multiplier_residual, std::abs(pd.c0 - c), std::abs(pd.alpha - z), secs)};
  });

  report(2, "normal form", [&] {
    const auto r = p2.local_form();
    const auto planted = [](auto z) { return z * inv(0.7 * 6.25 * z * z - 2.5 * z + 1.0); };
    const FatouEvaluator ev(std::make_shared<FunctionReturnMap<decltype(planted)>>(planted), 0.0);
    const double planted_err = std::abs(ev.germ().A - 0.7);
    const bool ok = r["pass"].get<bool>() && planted_err < 1e-4;
    return std::pair{ok, fmt("a=%.6g A=%.10g spread=%.1e planted |A-0.7|=%.1e", r["a"].get<double>(), r["A"].get<double>(),
                             r["A_spread_over_cycle"].get<double>(), planted_err)};
  });

  report(3, "Fatou functional equations", [&] {
    const auto r = p2.fatou();
    return std::pair{r["pass"].get<bool>(),
                     fmt("%d points: phi %.1e psi %.1e symmetry %.1e/%.1e", r["points"].get<int>(),
                         r["phi_equation"].get<double>(), r["psi_equation"].get<double>(), r["phi_symmetry"].get<double>(),
                         r["psi_symmetry"].get<double>())};
  });

  const auto sigma = [&] { return p2.sigma(); };
  report(4, "Lavaurs asymptotics", [&] {
    const auto r = sigma();
    const bool ok = r["horn_error"].get<double>() < 1e-3 && r["inverse_round_trip"].get<double>() < 1e-8;
    return std::pair{ok, fmt("horn error %.1e (raw at |w|=1e4: %.1e) round trip %.1e", r["horn_error"].get<double>(),
                             r["horn_raw_error"].get<double>(), r["inverse_round_trip"].get<double>())};
  });

  report(5, "sigma selection", [&] {
    const auto r = sigma();
    const bool ok = r["j"].get<int>() <= 10 && r["residual"].get<double>() < 1e-8 &&
                    r["critical_derivative"].get<double>() < 1e-6;
    return std::pair{ok, fmt("sigma=%.12g j=%d residual %.1e |g'(0)| %.1e", r["sigma"].get<double>(), r["j"].get<int>(),
                             r["residual"].get<double>(), r["critical_derivative"].get<double>())};
  });

  report(6, "implosion limit", [&] {
    const auto r = p2.implosion();
    std::string d;
    for (const auto& f : r["fits"]) d += fmt("N=%d defect %.2e; ", f["N"].get<int>(), f["defect"].get<double>());
    return std::pair{r["pass"].get<bool>(), d + fmt("slope %.3f", r["slope"].get<double>())};
  });

  report(7, "IFS validity", [&] {
    const auto r = p2.ifs();
    return std::pair{r["pass"].get<bool>(), fmt("%zu branches, min gap %.2e, C1 %.3g (raw %.3g)", r["branches"].get<std::size_t>(),
                                                r["min_gap"].get<double>(), r["c1_fitted"].get<double>(),
                                                r["c1_raw"].get<double>())};
  });

  report(8, "theta bracketing", [&] {
    std::string d;
    bool ok = true;
    for (int deg : {2, 4}) {
      RunConfig c = cfg;
      if (deg == 4) {
        c.d = 4;
        c.bracket_lo = -1.25;
        c.bracket_hi = -1.2;
      }
      Pipeline p(c);
      p.ifs();
      const auto r = p.theta();
      const double secs = p.timings()["theta"].get<double>();
      ok = ok && r["pass"].get<bool>() && secs < 60;
      d += fmt("d=%d theta in [%.4g, %.4g] model %.4g target %.4g (%.1fs); ", deg, r["theta_bracket"][0].get<double>(),
               r["theta_bracket"][1].get<double>(), r["model_theta"].get<double>(), r["target"].get<double>(), secs);
    }
    return std::pair{ok, d};
  });

  report(9, "Moran monotonicity", [&] {
    const auto r = p2.moran();
    std::string d = "t_lower";
    for (const auto& t : r["trajectory"]) d += fmt(" %.4f", t["t_lower"].get<double>());
    d += fmt("; final t_upper %.4f; 4/3 %s", r["t_upper"].get<double>(),
             r["crosses_target"].get<bool>() ? "crossed" : "not crossed");
    return std::pair{r["pass"].get<bool>(), d};
  });

  report(10, "dimension jump", [&] {
    const auto r = p2.render();
    const double secs = p2.timings()["render"].get<double>();
    const auto& imp = r["images"][0]["box"];
    const auto& win = r["images"][1]["box"];
    const bool ok = r["dimension_jump"].get<bool>() && secs < 300;
    return std::pair{ok, fmt("%dpx imploded %.3f+-%.3f vs window %.3f+-%.3f (%.0fs)", r["images"][0]["pixels"].get<int>(),
                             imp["dimension"].get<double>(), imp["std_error"].get<double>(), win["dimension"].get<double>(),
                             win["std_error"].get<double>(), secs)};
  });

  report(11, "renderer sanity", [] {
    // unit circle
    const auto spec = GridSpec::centered(0.0, 1.5, 512);
    const auto circle = render_julia(Family(2, 0.0), spec).member_mask();
    double off = 0;
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x)
        if (circle.at(x, y)) off = std::max(off, std::abs(std::abs(spec.pixel(x, y)) - 1) / spec.pixel_size);
    const double circle_dim = box_counting(circle, dyadic_sizes(2, 6)).dimension;
    // z -> -z and z -> conj z
    const int n = 256;
    const auto g = render_julia(Family(2, -1.0), GridSpec::centered(0.0, 2.0, n));
    int mismatches = 0;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x)
        mismatches += (g.at(x, y).state != g.at(n - 1 - x, n - 1 - y).state) + (g.at(x, y).state != g.at(x, n - 1 - y).state);
    // product of two four-corner Cantor sets, dimension 1
    Mask dust = blank(n);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) dust.bits[static_cast<std::size_t>(y) * n + x] = in_dust(x) && in_dust(y);
    const double dust_dim = box_counting(dust, std::vector<int>{1, 4, 16, 64}).dimension;
    const bool ok = circle.count() > 0 && off < 3 && std::abs(circle_dim - 1) < 0.05 && mismatches <= n * n / 1000 &&
                    std::abs(dust_dim - 1) < 1e-9;
    return std::pair{ok, fmt("circle offset %.2f px, dim %.3f; symmetry mismatches %d; dust dim %.6f", off, circle_dim,
                             mismatches, dust_dim)};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
