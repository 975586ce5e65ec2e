#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "pdim/error.hpp"
#include "pdim/image_io.hpp"
#include "pdim/pipeline.hpp"

using namespace pdim;

namespace {

struct Overrides {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

// Every config key becomes a flag: j_max -> --j-max.
void add_config_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
  for (const auto& key : config_keys()) {
    std::string flag = key.name;
    std::replace(flag.begin(), flag.end(), '_', '-');
    o.options[key.name] = cmd->add_option("--" + flag, o.values[key.name], key.doc);
  }
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
  for (const auto& [name, opt] : o.options)
    if (opt->count() > 0) set_config_value(cfg, name, o.values.at(name));
  validate(cfg);
  return cfg;
}

int emit(const Json& j) {
  std::cout << j.dump(2) << '\n';
  if (j.is_object() && j.contains("pass")) return j["pass"].get<bool>() ? 0 : 2;
  int code = 0;
  if (j.is_array())
    for (const auto& rec : j)
      if (!rec["pass"].get<bool>()) code = 2;
  return code;
}

int render_command(const RunConfig& cfg, const std::string& kind, double c_override) {
  Pipeline p(cfg);
  RenderOptions ropts;
  ropts.max_iter = cfg.max_iter;
  const auto spec = GridSpec::centered(cfg.grid_center, cfg.half_width, cfg.grid_size);
  Grid grid;
  double c = 0;
  if (kind == "julia") {
    if (std::isnan(c_override)) throw UsageError("render --kind julia needs --c");
    c = c_override;
    grid = render_julia(Family(cfg.d, c), spec, ropts);
  } else if (kind == "parabolic") {
    c = p.parabolic().c0;
    grid = render_julia(p.parabolic().family(), spec, ropts);
  } else if (kind == "imploded") {
    c = p.parabolic().c0 + p.implosion_data().fits.front().epsilon;
    grid = render_julia(Family(cfg.d, c), spec, ropts);
  } else if (kind == "window") {
    c = window_center(p.parabolic());
    grid = render_julia(Family(cfg.d, c), spec, ropts);
  } else if (kind == "lavaurs") {
    c = p.parabolic().c0;
    grid = render_julia_lavaurs(*p.lavaurs(), spec, cfg.m_max, ropts);
  } else {
    throw UsageError("unknown render kind '" + kind + "'");
  }
  std::filesystem::create_directories(cfg.output_dir);
  const std::string base = cfg.output_dir + "/" + kind;
  write_png_gray(base + ".png", grid.spec.width, grid.spec.height, grayscale(grid));
  write_ppm(base + ".ppm", grid.spec.width, grid.spec.height, palette_rgb(grid));
  const auto mask = grid.member_mask();
  write_mask_csv(base + ".csv", mask);
  const auto bc = box_counting(mask, dyadic_sizes(cfg.box_smallest, cfg.box_scales));
  Json out{{"kind", kind},
           {"c", c},
           {"pixels", cfg.grid_size},
           {"members", mask.count()},
           {"undetermined_fraction", grid.undetermined_fraction()},
           {"box_dimension", bc.dimension},
           {"box_std_error", bc.std_error},
           {"box_sizes", bc.sizes},
           {"box_counts", bc.counts},
           {"files", {kind + ".png", kind + ".ppm", kind + ".csv"}}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parabolic implosion and Julia set dimension toolkit for z^d + c.\n"
               "Set PDIM_THREADS to cap the number of worker threads."};
  app.require_subcommand(1);

  std::map<CLI::App*, Overrides> flags;
  auto* locate = app.add_subcommand("locate", "find the parabolic parameter of period k in the bracket");
  auto* fatou = app.add_subcommand("fatou-test", "check the Fatou coordinate functional equations");
  auto* sigma = app.add_subcommand("sigma", "select the Lavaurs phase and check its asymptotics");
  auto* ifs = app.add_subcommand("ifs", "build the IFS window, check separation and the derivative law");
  auto* dimension = app.add_subcommand("dimension", "convergence exponent, Moran bounds and persistence");
  auto* render = app.add_subcommand("render", "render a Julia or Julia-Lavaurs set and box-count it");
  auto* pipeline = app.add_subcommand("pipeline", "run every stage and write report.json");
  auto* config = app.add_subcommand("config", "print the resolved configuration");
  for (auto* cmd : {locate, fatou, sigma, ifs, dimension, render, pipeline, config}) add_config_flags(cmd, flags[cmd]);

  std::string kind = "imploded";
  double c_override = NAN;
  render->add_option("--kind", kind, "julia, parabolic, imploded, window or lavaurs")
      ->check(CLI::IsMember({"julia", "parabolic", "imploded", "window", "lavaurs"}));
  render->add_option("--c", c_override, "parameter for --kind julia");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(ErrorKind::Usage);
  }

  try {
    const RunConfig cfg = resolve(flags.at(app.get_subcommands().front()));
    if (*config) {
      std::cout << serialize_config(cfg);
      return 0;
    }
    if (*pipeline) {
      const auto run = run_pipeline(cfg);
      std::filesystem::create_directories(cfg.output_dir);
      std::ofstream(cfg.output_dir + "/report.json") << run.report.dump(2) << '\n';
      Json brief{{"status", run.report["status"]}};
      if (run.report.contains("summary")) brief["summary"] = run.report["summary"];
      if (run.report.contains("failure")) brief["failure"] = run.report["failure"];
      brief["report"] = cfg.output_dir + "/report.json";
      std::cout << brief.dump(2) << '\n';
      return run.exit_code;
    }
    if (*render) return render_command(cfg, kind, c_override);

    Pipeline p(cfg);
    if (*locate) return emit(p.locate());
    if (*fatou) return emit(Json::array({p.local_form(), p.fatou()}));
    if (*sigma) return emit(p.sigma());
    if (*ifs) return emit(p.ifs());
    if (*dimension) return emit(Json::array({p.theta(), p.moran(), p.persistence()}));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  }
  return 0;
}
