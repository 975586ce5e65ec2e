#pragma once

#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pdim/checks.hpp"
#include "pdim/config.hpp"
#include "pdim/dimension.hpp"
#include "pdim/render.hpp"

namespace pdim {

using Json = nlohmann::ordered_json;

/// Stages of a run, each computed once and on demand. A stage record carries
/// "stage", "pass", the measured values and the tolerances they were judged by.
class Pipeline {
 public:
  explicit Pipeline(RunConfig cfg);

  const RunConfig& config() const { return cfg_; }

  Json locate();
  Json local_form();
  Json fatou();
  Json sigma();
  Json implosion();
  Json ifs();
  Json theta();
  Json moran();
  Json persistence();
  Json render();

  static const std::vector<std::string>& stage_names();
  Json stage(const std::string& name);

  const ParabolicData& parabolic();
  std::shared_ptr<const FatouEvaluator> evaluator();
  const SigmaSolution& sigma_solution();
  std::shared_ptr<const LavaursMap> lavaurs();
  const ImplosionRun& implosion_data();
  const IteratedFunctionSystem& ifs_system();
  const std::vector<IfsBranch>& window_branches();

  /// Records in the order they were computed.
  Json records() const;
  /// Wall-clock seconds per computed stage.
  Json timings() const;

 private:
  Json& record(const std::string& name, Json body, double seconds);

  RunConfig cfg_;
  std::vector<std::pair<std::string, Json>> done_;
  std::vector<std::pair<std::string, double>> seconds_;

  std::optional<ParabolicData> located_;
  std::optional<ParabolicData> pd_;
  std::shared_ptr<const FatouEvaluator> ev_;
  std::optional<SigmaSolution> sol_;
  std::shared_ptr<const LavaursMap> lav_;
  std::optional<ImplosionRun> implosion_;
  std::unique_ptr<IteratedFunctionSystem> ifs_;
  std::vector<IfsBranch> window_;
};

struct RunReport {
  Json report;
  int exit_code;  // 0, or the ErrorKind of the failure
};

/// Runs every stage in order and stops at the first failure. The report holds the
/// configuration, the stage records, a summary and (separately) the timestamps,
/// so two runs with the same configuration differ only under "timestamps".
RunReport run_pipeline(const RunConfig& cfg);

}  // namespace pdim
