#include "pdim/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>

#include "pdim/error.hpp"
#include "pdim/image_io.hpp"

namespace pdim {

namespace {

using Clock = std::chrono::steady_clock;

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json box_json(const BoxCount& bc) {
  return {{"dimension", bc.dimension}, {"std_error", bc.std_error}, {"sizes", bc.sizes}, {"counts", bc.counts}};
}

std::vector<IfsBranch> within(const std::vector<IfsBranch>& branches, int n_max, int r_max) {
  std::vector<IfsBranch> out;
  for (const auto& b : branches)
    if (b.n <= n_max && std::abs(b.r) <= r_max) out.push_back(b);
  return out;
}

}  // namespace

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_);
  if (cfg_.moran_windows.back() > std::min(cfg_.window_n, cfg_.window_r))
    throw UsageError("config key 'moran_windows': largest window must fit inside 'window'");
}

Json& Pipeline::record(const std::string& name, Json body, double seconds) {
  Json rec{{"stage", name}};
  for (auto& [k, v] : body.items()) rec[k] = v;
  done_.emplace_back(name, std::move(rec));
  seconds_.emplace_back(name, seconds);
  return done_.back().second;
}

const std::vector<std::string>& Pipeline::stage_names() {
  static const std::vector<std::string> names{"locate", "local_form", "fatou", "sigma", "implosion",
                                              "ifs", "theta", "moran", "persistence", "render"};
  return names;
}

Json Pipeline::stage(const std::string& name) {
  static const std::vector<std::pair<std::string, Json (Pipeline::*)()>> table{
      {"locate", &Pipeline::locate}, {"local_form", &Pipeline::local_form}, {"fatou", &Pipeline::fatou},
      {"sigma", &Pipeline::sigma},   {"implosion", &Pipeline::implosion},   {"ifs", &Pipeline::ifs},
      {"theta", &Pipeline::theta},   {"moran", &Pipeline::moran},           {"persistence", &Pipeline::persistence},
      {"render", &Pipeline::render}};
  for (const auto& [n, fn] : table)
    if (n == name) return (this->*fn)();
  throw UsageError("unknown stage '" + name + "'");
}

Json Pipeline::records() const {
  Json out = Json::array();
  for (const auto& [n, rec] : done_) out.push_back(rec);
  return out;
}

Json Pipeline::timings() const {
  Json out = Json::object();
  for (const auto& [n, s] : seconds_) out[n] = s;
  return out;
}

#define PDIM_CACHED(name)                           \
  for (const auto& [n, rec] : done_)                \
    if (n == name) return rec;                      \
  const auto t0 = Clock::now();                     \
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Json Pipeline::locate() {
  PDIM_CACHED("locate");
  LocateOptions opts;
  opts.tol = cfg_.locate_tol;
  located_ = locate_parabolic(cfg_.d, cfg_.k, {cfg_.bracket_lo, cfg_.bracket_hi}, opts);
  const auto& p = *located_;
  const bool pass = p.fixed_residual < 1e-10 && p.multiplier_residual < 1e-9 && p.alpha > 0;
  return record("locate",
                {{"pass", pass},
                 {"d", p.d},
                 {"k", p.k},
                 {"c0", p.c0},
                 {"alpha", p.alpha},
                 {"cycle", p.cycle},
                 {"fixed_residual", p.fixed_residual},
                 {"multiplier_residual", p.multiplier_residual},
                 {"tolerances", {{"newton", cfg_.locate_tol}, {"fixed", 1e-10}, {"multiplier", 1e-9}}}},
                elapsed());
}

Json Pipeline::local_form() {
  PDIM_CACHED("local_form");
  locate();
  pd_ = pdim::local_form(*located_);
  const auto& p = *pd_;
  double spread = 0;
  for (double x : p.cycle) spread = std::max(spread, std::abs(normal_form_at(p, x).A - p.A));
  const bool pass = p.a_coef > 0 && p.A > 0 && spread < 1e-8;
  return record("local_form",
                {{"pass", pass},
                 {"alpha", p.alpha},
                 {"orientation", p.orientation},
                 {"a", p.a_coef},
                 {"b", p.b_coef},
                 {"A", p.A},
                 {"A_spread_over_cycle", spread},
                 {"tolerances", {{"A_spread", 1e-8}}}},
                elapsed());
}

const ParabolicData& Pipeline::parabolic() {
  local_form();
  return *pd_;
}

std::shared_ptr<const FatouEvaluator> Pipeline::evaluator() {
  if (!ev_) {
    FatouOptions opts;
    opts.tol = cfg_.fatou_tol;
    ev_ = std::make_shared<FatouEvaluator>(parabolic(), opts);
  }
  return ev_;
}

Json Pipeline::fatou() {
  PDIM_CACHED("fatou");
  const auto ev = evaluator();
  const auto s = fatou_suite(*ev, cfg_.fatou_points, cfg_.seed);
  const bool pass = s.phi_equation < 1e-8 && s.psi_equation < 1e-8 && s.phi_symmetry < 1e-10 && s.psi_symmetry < 1e-10;
  return record("fatou",
                {{"pass", pass},
                 {"delta", ev->delta()},
                 {"points", s.points},
                 {"phi_equation", s.phi_equation},
                 {"psi_equation", s.psi_equation},
                 {"phi_symmetry", s.phi_symmetry},
                 {"psi_symmetry", s.psi_symmetry},
                 {"tolerances", {{"newton", cfg_.fatou_tol}, {"equation", 1e-8}, {"symmetry", 1e-10}}}},
                elapsed());
}

Json Pipeline::sigma() {
  PDIM_CACHED("sigma");
  const auto sols = find_sigma(evaluator(), cfg_.j_max);
  if (sols.empty())
    throw NotFoundError("no phase sigma with g_sigma(0) a preimage of alpha of depth <= " + std::to_string(cfg_.j_max));
  sol_ = sols.front();
  lav_ = std::make_shared<LavaursMap>(ev_, sol_->sigma);
  const auto horn = horn_translation(*lav_);
  const double round_trip = inverse_round_trip(*lav_, 200, cfg_.seed + 1);
  const double crit = critical_derivative(*lav_);
  const bool pass = sol_->residual < 1e-8 && crit < 1e-6 && horn.error < 1e-3 && round_trip < 1e-8;
  Json list = Json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(sols.size(), 10); ++i)
    list.push_back({{"sigma", sols[i].sigma}, {"j", sols[i].j}, {"x", sols[i].x_target}, {"residual", sols[i].residual}});
  return record("sigma",
                {{"pass", pass},
                 {"sigma", sol_->sigma},
                 {"j", sol_->j},
                 {"x_target", sol_->x_target},
                 {"residual", sol_->residual},
                 {"solutions_found", sols.size()},
                 {"first_solutions", list},
                 {"critical_derivative", crit},
                 {"horn_translation", complex_json(horn.translation)},
                 {"horn_expected", complex_json(Complex(sol_->sigma, -parabolic().A * std::numbers::pi))},
                 {"horn_error", horn.error},
                 {"horn_raw_error", horn.raw_error},
                 {"inverse_round_trip", round_trip},
                 {"tolerances", {{"residual", 1e-8}, {"critical_derivative", 1e-6}, {"horn", 1e-3}, {"round_trip", 1e-8}}}},
                elapsed());
}

const SigmaSolution& Pipeline::sigma_solution() {
  sigma();
  return *sol_;
}

std::shared_ptr<const LavaursMap> Pipeline::lavaurs() {
  sigma();
  return lav_;
}

Json Pipeline::implosion() {
  PDIM_CACHED("implosion");
  implosion_ = implosion_run(*lavaurs(), cfg_.implosion_n);
  const auto& run = *implosion_;
  bool decreasing = true;
  for (std::size_t i = 1; i < run.defects.size(); ++i) decreasing = decreasing && run.defects[i] < run.defects[i - 1];
  const bool pass = decreasing && run.defects.back() < 1e-3 && run.slope >= -2.2 && run.slope <= -1.8;
  Json fits = Json::array();
  for (std::size_t i = 0; i < run.fits.size(); ++i)
    fits.push_back({{"N", run.fits[i].N},
                    {"epsilon", run.fits[i].epsilon},
                    {"phase", run.fits[i].phase},
                    {"test_error", run.fits[i].test_error},
                    {"defect", run.defects[i]}});
  return record("implosion",
                {{"pass", pass},
                 {"fits", fits},
                 {"slope", run.slope},
                 {"defects_decreasing", decreasing},
                 {"tolerances", {{"final_defect", 1e-3}, {"slope_range", {-2.2, -1.8}}}}},
                elapsed());
}

const ImplosionRun& Pipeline::implosion_data() {
  implosion();
  return *implosion_;
}

const IteratedFunctionSystem& Pipeline::ifs_system() {
  if (!ifs_) {
    IfsOptions opts;
    opts.critical_orbit_len = cfg_.critical_orbit_len;
    ifs_ = std::make_unique<IteratedFunctionSystem>(lavaurs(), sigma_solution(), opts);
  }
  return *ifs_;
}

Json Pipeline::ifs() {
  PDIM_CACHED("ifs");
  const auto& sys = ifs_system();
  window_ = sys.build_window(cfg_.window_n, cfg_.window_r);
  const auto sep = separation_check(window_, sys.ball());
  const auto law = derivative_law(window_, sys.label_step(), cfg_.d);
  const bool pass = sep.valid() && law.c1_fitted < 10;

  std::filesystem::create_directories(cfg_.output_dir);
  {
    std::ofstream csv(cfg_.output_dir + "/branches.csv");
    csv.precision(17);
    csv << "n,r,deriv_min,deriv_max,center_re,center_im,radius\n";
    for (const auto& b : window_)
      csv << b.n << ',' << b.r << ',' << b.deriv_min << ',' << b.deriv_max << ',' << b.image_center.real() << ','
          << b.image_center.imag() << ',' << b.image_radius << '\n';
  }
  return record("ifs",
                {{"pass", pass},
                 {"window", {cfg_.window_n, cfg_.window_r}},
                 {"n0", sys.n0()},
                 {"base_radius", sys.ball().radius},
                 {"postcritical_distance", sys.ball().postcritical_distance},
                 {"preimage_center", complex_json(sys.preimage_center())},
                 {"label_step", complex_json(sys.label_step())},
                 {"h_radius", sys.h().radius()},
                 {"h_leading_coefficient", sys.h().leading_coefficient_abs()},
                 {"branches", window_.size()},
                 {"separated", sep.valid()},
                 {"disjoint", sep.disjoint},
                 {"contained", sep.contained},
                 {"min_gap", sep.min_gap},
                 {"max_image_radius", sep.max_radius},
                 {"derivative_scale", law.scale},
                 {"c1_fitted", law.c1_fitted},
                 {"c1_raw", law.c1_raw},
                 {"distortion", law.distortion},
                 {"table", "branches.csv"},
                 {"tolerances", {{"c1", 10.0}, {"derivative_margin", sys.options().margin}}}},
                elapsed());
}

const std::vector<IfsBranch>& Pipeline::window_branches() {
  ifs();
  return window_;
}

Json Pipeline::theta() {
  PDIM_CACHED("theta");
  const auto& sys = ifs_system();
  const auto branches = sys.build_window(cfg_.theta_n, cfg_.theta_r);
  const auto tau = sys.label_step();
  const double target = 2.0 * cfg_.d / (cfg_.d + 1);
  const auto real = theta_estimate(upper_ratios(branches, tau), 0.5, 2.5, cfg_.theta_width);
  const auto model =
      theta_estimate(lattice_model(sys.n0(), cfg_.theta_n, cfg_.theta_r, tau, 1.0 + 1.0 / cfg_.d), 0.5, 2.5, cfg_.theta_width);
  const double agreement = std::abs(real.estimate() - model.estimate());
  const bool pass = std::abs(real.estimate() - target) <= 0.05 && agreement <= cfg_.theta_width;
  return record("theta",
                {{"pass", pass},
                 {"window", {cfg_.theta_n, cfg_.theta_r}},
                 {"branches", branches.size()},
                 {"theta_bracket", {real.lower, real.upper}},
                 {"theta", real.estimate()},
                 {"model_bracket", {model.lower, model.upper}},
                 {"model_theta", model.estimate()},
                 {"target", target},
                 {"tolerances", {{"target", 0.05}, {"bracket_width", cfg_.theta_width}}}},
                elapsed());
}

Json Pipeline::moran() {
  PDIM_CACHED("moran");
  const auto& all = window_branches();
  const double target = 2.0 * cfg_.d / (cfg_.d + 1);
  Json traj = Json::array();
  bool increasing = true;
  double prev = -INFINITY;
  MoranBounds last{};
  for (int w : cfg_.moran_windows) {
    auto sub = within(all, w, w);
    std::sort(sub.begin(), sub.end(), [](const IfsBranch& a, const IfsBranch& b) { return a.deriv_min > b.deriv_min; });
    last = moran_bounds(sub);
    increasing = increasing && last.t_lower > prev;
    prev = last.t_lower;
    traj.push_back({{"window", w}, {"branches", last.branches}, {"t_lower", last.t_lower}, {"t_upper", last.t_upper}});
  }
  return record("moran",
                {{"pass", increasing},
                 {"trajectory", traj},
                 {"t_lower_increasing", increasing},
                 {"t_lower", last.t_lower},
                 {"t_upper", last.t_upper},
                 {"target", target},
                 {"crosses_target", last.t_lower > target},
                 {"tolerances", {{"moran_root", 1e-6}}}},
                elapsed());
}

Json Pipeline::persistence() {
  PDIM_CACHED("persistence");
  auto subset = window_branches();
  std::sort(subset.begin(), subset.end(), [](const IfsBranch& a, const IfsBranch& b) { return a.deriv_min > b.deriv_min; });
  subset.resize(std::min<std::size_t>(subset.size(), cfg_.persistence_branches));
  const auto& run = implosion_data();
  Json rows = Json::array();
  std::vector<PersistenceReport> reps;
  for (const auto& fit : run.fits) {
    reps.push_back(persistence_check(ifs_system(), sigma_solution().j, subset, fit.N, fit.epsilon));
    const auto& p = reps.back();
    rows.push_back({{"N", p.N},
                    {"epsilon", p.epsilon},
                    {"max_defect", p.max_defect},
                    {"min_expansion", p.min_expansion},
                    {"t_lower_perturbed", p.t_lower_perturbed},
                    {"t_lower_unperturbed", p.t_lower_unperturbed}});
  }
  bool expanding = true;
  for (const auto& p : reps) expanding = expanding && p.min_expansion > 1;
  const bool shrinking = reps.back().max_defect < reps.front().max_defect;
  const bool close = std::abs(reps.back().t_lower_perturbed - reps.back().t_lower_unperturbed) < 0.05;
  Json labels = Json::array();
  for (const auto& b : subset) labels.push_back({b.n, b.r});
  return record("persistence",
                {{"pass", expanding && shrinking && close},
                 {"branches", labels},
                 {"runs", rows},
                 {"defect_shrinks", shrinking},
                 {"expanding", expanding},
                 {"t_lower_close", close},
                 {"tolerances", {{"t_lower_gap", 0.05}, {"shooting_residual", 1e-6}}}},
                elapsed());
}

Json Pipeline::render() {
  PDIM_CACHED("render");
  const auto& pd = parabolic();
  const auto& run = implosion_data();
  RenderOptions ropts;
  ropts.max_iter = cfg_.max_iter;
  std::filesystem::create_directories(cfg_.output_dir);

  auto emit = [&](const std::string& name, double c, const Grid& g, const std::vector<int>& sizes) {
    write_png_gray(cfg_.output_dir + "/" + name + ".png", g.spec.width, g.spec.height, grayscale(g));
    write_ppm(cfg_.output_dir + "/" + name + ".ppm", g.spec.width, g.spec.height, palette_rgb(g));
    const auto mask = g.member_mask();
    if (cfg_.write_masks) write_mask_csv(cfg_.output_dir + "/" + name + ".csv", mask);
    const auto bc = box_counting(mask, sizes);
    Json j{{"name", name},
           {"c", c},
           {"pixels", g.spec.width},
           {"pixel_size", g.spec.pixel_size},
           {"members", mask.count()},
           {"undetermined_fraction", g.undetermined_fraction()},
           {"box", box_json(bc)}};
    return std::pair{j, bc};
  };

  const auto sizes = dyadic_sizes(cfg_.box_smallest, cfg_.box_scales);
  const auto spec = GridSpec::centered(cfg_.grid_center, cfg_.half_width, cfg_.grid_size);
  const double c_imploded = pd.c0 + run.fits.front().epsilon;
  const double c_window = window_center(pd);
  const auto [imploded, bc_imp] = emit("julia_imploded", c_imploded, render_julia(Family(pd.d, c_imploded), spec, ropts), sizes);
  const auto [window, bc_win] = emit("julia_window", c_window, render_julia(Family(pd.d, c_window), spec, ropts), sizes);

  // Same plane scales at the coarser Lavaurs resolution.
  int shift = 0;
  while ((cfg_.lavaurs_grid << (shift + 1)) <= cfg_.grid_size) ++shift;
  const int small = std::max(1, cfg_.box_smallest >> shift);
  const auto lsizes = dyadic_sizes(small, std::max(4, cfg_.box_scales - shift));
  const auto lspec = GridSpec::centered(cfg_.grid_center, cfg_.half_width, cfg_.lavaurs_grid);
  const auto [parabolic_j, bc_par] = emit("julia_parabolic", pd.c0, render_julia(pd.family(), lspec, ropts), lsizes);
  const auto [lavaurs_j, bc_lav] = emit("julia_lavaurs", pd.c0, render_julia_lavaurs(*lavaurs(), lspec, cfg_.m_max, ropts), lsizes);

  const bool jump = bc_imp.dimension - bc_imp.std_error > bc_win.dimension + bc_win.std_error;
  const bool lavaurs_gain = bc_lav.dimension >= bc_par.dimension + 0.05;
  return record("render",
                {{"pass", jump && lavaurs_gain},
                 {"images", {imploded, window, parabolic_j, lavaurs_j}},
                 {"implosion_N", run.fits.front().N},
                 {"dimension_jump", jump},
                 {"lavaurs_gain", bc_lav.dimension - bc_par.dimension},
                 {"tolerances", {{"lavaurs_gain", 0.05}, {"membership_distance", "pixel_size"}, {"max_iter", cfg_.max_iter}}}},
                elapsed());
}

#undef PDIM_CACHED

RunReport run_pipeline(const RunConfig& cfg) {
  const std::string started = utc_now();
  Json config = Json::object();
  for (const auto& key : config_keys()) config[key.name] = get_config_value(cfg, key.name);
  Json report{{"config", config}};
  int code = 0;
  std::unique_ptr<Pipeline> p;
  std::string failed;
  try {
    p = std::make_unique<Pipeline>(cfg);
    for (const auto& name : Pipeline::stage_names()) {
      failed = name;
      if (!p->stage(name)["pass"].get<bool>()) {
        code = static_cast<int>(ErrorKind::Mathematical);
        report["failure"] = {{"stage", name}, {"kind", "check failed"}};
        break;
      }
    }
  } catch (const Error& e) {
    code = static_cast<int>(e.kind());
    report["failure"] = {{"stage", failed}, {"kind", "error"}, {"message", e.what()}};
  }
  report["status"] = code == 0 ? "pass" : "fail";
  report["stages"] = p ? p->records() : Json::array();

  if (p) {
    Json summary{{"d", cfg.d}, {"k", cfg.k}};
    for (const auto& rec : report["stages"]) {
      const auto name = rec["stage"].get<std::string>();
      if (name == "local_form") summary["c0"] = p->parabolic().c0;
      if (name == "sigma") summary["sigma"] = rec["sigma"];
      if (name == "ifs") summary["window"] = rec["window"];
      if (name == "theta") summary["theta_bracket"] = rec["theta_bracket"];
      if (name == "moran") {
        summary["t_lower"] = rec["t_lower"];
        summary["t_upper"] = rec["t_upper"];
        summary["crosses_target"] = rec["crosses_target"];
      }
    }
    report["summary"] = summary;
  }
  report["timestamps"] = {{"started", started}, {"finished", utc_now()}, {"stage_seconds", p ? p->timings() : Json::object()}};
  return {report, code};
}

}  // namespace pdim
