#ifndef MINLAB_SCENARIOS_HPP
#define MINLAB_SCENARIOS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "minlab/generator.hpp"
#include "minlab/levels.hpp"

namespace minlab {

struct ScenarioConfig {
  double tol = 1e-6;
  std::uint64_t seed = 42;
  std::size_t mc_paths = 100000;
  std::size_t mc_max_jumps = 10000;
  bool monte_carlo = true;
  std::optional<LevelSchedule> levels;  // overrides each scenario's default
  std::filesystem::path data_dir = MINLAB_DATA_DIR;
};

/// One CSV line: level, t, i, j_or_k, value, lo, hi.
struct TraceRow {
  State level = 0;
  double t = 0.0;
  State i = 0;
  State j_or_k = 0;
  double value = 0.0;
  std::optional<double> lo;
  std::optional<double> hi;
};

struct ScenarioReport {
  std::string id;
  nlohmann::json inputs;
  nlohmann::json findings;
  std::map<std::string, std::vector<TraceRow>> traces;  // name -> rows
  std::string summary;

  /// Recomputed from `findings` on every call.
  bool pass() const;
  nlohmann::json to_json() const;
};

/// Expected-outcome check of a scenario, as a function of its findings only.
bool judge(std::string_view id, const nlohmann::json& findings);

/// Birth-death pair (i+1)^2 / (i+1)^2 against alpha (i+1)^2 / (i+1)^2.
ScenarioReport run_counterexample(double alpha, const ScenarioConfig& config = {});
/// Masked truncations of the alpha chain: honest rows at every level but a
/// non-monotone level sequence.
ScenarioReport run_footnote_example(double alpha, const ScenarioConfig& config = {});
ScenarioReport run_footnote_example(const QMatrix& q, const ScenarioConfig& config = {});
/// Transfer theorem on a bounded pair, a pair with Lyapunov-regular Q2 and
/// the counterexample pair.
ScenarioReport run_kirstein_demo(const ScenarioConfig& config = {});

/// Runs a scenario by id: "counterexample", "footnote" or "kirstein".
ScenarioReport run_scenario(std::string_view id, double alpha, const ScenarioConfig& config = {});

/// Writes <dir>/<id>_<trace>.csv for every trace; returns the paths.
std::vector<std::filesystem::path> write_traces(const ScenarioReport& report, const std::filesystem::path& dir);
std::string trace_csv(const std::vector<TraceRow>& rows);

}  // namespace minlab

#endif
