#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "minlab/dominance.hpp"
#include "minlab/error.hpp"
#include "minlab/minimal.hpp"
#include "minlab/montecarlo.hpp"
#include "minlab/regularity.hpp"
#include "minlab/report.hpp"
#include "minlab/scenarios.hpp"
#include "minlab/spec_io.hpp"
#include "minlab/truncation.hpp"
#include "minlab/uniformization.hpp"

namespace {

using namespace minlab;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::uint64_t seed = 42;
  double tol = 1e-6;
  std::string levels;
  std::string levels_geom;
  std::optional<double> alpha;
  std::string out;
  std::string data_dir = MINLAB_DATA_DIR;
};

ParameterMap overrides(const Globals& g) {
  ParameterMap p;
  if (g.alpha) p["alpha"] = *g.alpha;
  return p;
}

std::optional<LevelSchedule> schedule(const Globals& g) {
  if (!g.levels.empty() && !g.levels_geom.empty())
    throw CLI::ValidationError("--levels", "give either --levels or --levels-geom, not both");
  if (!g.levels.empty()) return LevelSchedule::parse_list(g.levels);
  if (!g.levels_geom.empty()) return LevelSchedule::parse_geometric(g.levels_geom);
  return std::nullopt;
}

std::vector<double> parse_times(const std::string& text) {
  std::vector<double> times;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    const std::string part = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size()) throw CLI::ValidationError("--t", "bad time '" + part + "'");
    times.push_back(v);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return times;
}

void print(const json& j) { std::cout << dump(j) << '\n'; }

void write_csv(const std::string& dir, const std::string& name, const std::vector<TraceRow>& rows) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream(std::filesystem::path(dir) / (name + ".csv")) << trace_csv(rows);
}

std::vector<TraceRow> bracket_rows(const BracketedValue& b, double t, State i, State jk) {
  std::vector<TraceRow> rows;
  for (std::size_t l = 0; l < b.trace.size() && l < b.levels.size(); ++l)
    rows.push_back(TraceRow{b.levels[l], t, i, jk, b.trace[l], std::nullopt, std::nullopt});
  if (!rows.empty()) {
    rows.back().lo = b.lo;
    rows.back().hi = b.hi;
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minlab: minimal Q-processes, truncations, dominance and regularity"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Monte Carlo seed");
  app.add_option("--tol", g.tol, "bracket tolerance")->check(CLI::PositiveNumber);
  app.add_option("--levels", g.levels, "truncation levels, e.g. 8,16,32");
  app.add_option("--levels-geom", g.levels_geom, "geometric levels start:factor:count");
  app.add_option("--alpha", g.alpha, "value bound to the parameter 'alpha' in specs");
  app.add_option("--out", g.out, "directory for CSV traces");
  app.add_option("--data-dir", g.data_dir, "directory with the built-in matrix specs");

  std::string spec, spec1, spec2;
  double t = 1.0;
  std::string t_list = "0.25,1,4";
  State i = 0, j = 0, k = 0, level = 32, mmax = 50, kmax = 60, probe_max = 1000;
  std::string scheme_name = "zero", kernel_method = "uniformization", reg_method = "auto", quantity = "entry";

  auto* validate = app.add_subcommand("validate", "check a matrix spec and print its row properties");
  validate->add_option("--spec", spec, "matrix spec JSON")->required();
  validate->add_option("--rows", level, "rows to validate")->capture_default_str();

  auto* transition = app.add_subcommand("transition", "P(t) of a truncation of a matrix");
  transition->add_option("--spec", spec, "matrix spec JSON")->required();
  transition->add_option("--t", t, "time")->capture_default_str();
  transition->add_option("--level", level, "truncation level (explicit specs default to their size)");
  transition->add_option("--scheme", scheme_name, "zero|absorb|mask|stop|general")->capture_default_str();
  transition->add_option("--method", kernel_method, "uniformization|ode")->capture_default_str();

  auto* minimal = app.add_subcommand("minimal", "bracket an entry, tail or mass of the minimal process");
  minimal->add_option("--spec", spec, "matrix spec JSON")->required();
  minimal->add_option("--i", i, "start state")->capture_default_str();
  minimal->add_option("--j", j, "target state (entry)")->capture_default_str();
  minimal->add_option("--k", k, "cutoff (tail)")->capture_default_str();
  minimal->add_option("--t", t, "time")->capture_default_str();
  minimal->add_option("--quantity", quantity, "entry|tail|mass")->capture_default_str();

  auto* compare = app.add_subcommand("compare", "generator and process dominance of two matrices");
  compare->add_option("--spec1", spec1, "dominated matrix")->required();
  compare->add_option("--spec2", spec2, "dominating matrix")->required();
  compare->add_option("--mmax", mmax, "largest start state")->capture_default_str();
  compare->add_option("--kmax", kmax, "largest cutoff")->capture_default_str();
  compare->add_option("--t", t_list, "comma-separated times")->capture_default_str();

  auto* monotone = app.add_subcommand("monotone", "monotonicity of a matrix's minimal process");
  State mono_mmax = 5, mono_kmax = 10;
  monotone->add_option("--spec", spec, "matrix spec JSON")->required();
  monotone->add_option("--mmax", mono_mmax, "largest start state")->capture_default_str();
  monotone->add_option("--kmax", mono_kmax, "largest cutoff")->capture_default_str();
  monotone->add_option("--t", t_list, "comma-separated times")->capture_default_str();

  auto* regular = app.add_subcommand("regular", "regularity (uniqueness) verdict");
  std::string phi = "i", probes = "0";
  double c = 0.0, lambda = 1.0, growth = 1.0;
  regular->add_option("--spec", spec, "matrix spec JSON")->required();
  regular->add_option("--method", reg_method, "deficiency|lyapunov|series|auto")->capture_default_str();
  regular->add_option("--phi", phi, "Lyapunov function of i")->capture_default_str();
  regular->add_option("--c", c, "Lyapunov constant")->capture_default_str();
  regular->add_option("--probe-max", probe_max, "rows checked by the Lyapunov test")->capture_default_str();
  regular->add_option("--growth-floor", growth, "required growth of phi over the probe")->capture_default_str();
  regular->add_option("--lambda", lambda, "resolvent parameter")->capture_default_str();
  regular->add_option("--probes", probes, "comma-separated probe states")->capture_default_str();

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of P_ij(t) and the defect");
  std::size_t paths = 100000, max_jumps = 1000000;
  simulate_cmd->add_option("--spec", spec, "matrix spec JSON")->required();
  simulate_cmd->add_option("--i", i, "start state")->capture_default_str();
  simulate_cmd->add_option("--t", t, "time")->capture_default_str();
  simulate_cmd->add_option("--paths", paths, "number of paths")->capture_default_str();
  simulate_cmd->add_option("--max-jumps", max_jumps, "jumps before a path counts as exploded")->capture_default_str();

  auto* scenario = app.add_subcommand("scenario", "built-in scenarios: counterexample, footnote, kirstein");
  std::string scenario_name;
  std::size_t sc_paths = 100000, sc_jumps = 10000;
  bool no_mc = false;
  scenario->add_option("name", scenario_name, "scenario id")
      ->required()
      ->check(CLI::IsMember({"counterexample", "footnote", "kirstein"}));
  scenario->add_option("--paths", sc_paths, "Monte Carlo paths")->capture_default_str();
  scenario->add_option("--max-jumps", sc_jumps, "Monte Carlo jump cap")->capture_default_str();
  scenario->add_flag("--no-mc", no_mc, "skip the Monte Carlo cross-check");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << '\n' << app.help();
    return kExitUsage;
  }

  try {
    const auto levels = schedule(g);
    const ParameterMap params = overrides(g);

    if (*validate) {
      const QMatrix q = load_matrix_file(spec, params);
      json j{{"name", q.name()}, {"family", to_string(q.family())}, {"rows_checked", level + 1}};
      std::vector<RowDefect> defects;
      try {
        defects = minlab::validate(q, level);
      } catch (const Error& e) {
        j["valid"] = false;
        j["error"] = to_string(e.code());
        j["message"] = e.what();
        print(j);
        return kExitFail;
      }
      json d = json::array();
      for (const auto& r : defects)
        if (r.defect > 0.0) d.push_back(json{{"i", r.state}, {"defect", num(r.defect)}});
      j["valid"] = true;
      j["defects"] = d;
      j["conservative"] = is_conservative(q, level);
      j["single_birth"] = is_single_birth(q, level);
      j["bounded"] = is_bounded(q);
      print(j);
      return kExitOk;
    }

    if (*transition) {
      const QMatrix q = load_matrix_file(spec, params);
      State n = level;
      if (transition->count("--level") == 0)
        if (auto rows = q.explicit_rows()) n = *rows == 0 ? 0 : *rows - 1;
      const FiniteQMatrix fq = truncate(q, scheme_from_string(scheme_name), n);
      TransitionKernel kern;
      if (kernel_method == "uniformization") kern = minlab::transition(fq, t);
      else if (kernel_method == "ode") kern = transition_ode(fq, t);
      else throw CLI::ValidationError("--method", "expected uniformization or ode");
      json j = to_json(kern);
      j["scheme"] = to_string(fq.provenance().scheme);
      j["level"] = n;
      print(j);
      return kExitOk;
    }

    if (*minimal) {
      const QMatrix q = load_matrix_file(spec, params);
      BracketConfig bc;
      bc.tol = g.tol;
      if (levels) bc.schedule = *levels;
      BracketedValue b;
      State jk = 0;
      if (quantity == "entry") b = minimal_entry(q, i, j, t, bc), jk = j;
      else if (quantity == "tail") b = minimal_tail(q, i, k, t, bc), jk = k;
      else if (quantity == "mass") b = minimal_mass(q, i, t, bc);
      else throw CLI::ValidationError("--quantity", "expected entry, tail or mass");
      json out = to_json(b, true);
      out["i"] = i;
      out["t"] = num(t);
      if (quantity == "entry") out["j"] = j;
      if (quantity == "tail") out["k"] = k;
      json flags = json::array();
      if (b.width_reached) flags.push_back("width-reached");
      if (b.numerical_limit) flags.push_back("numerical-limit");
      if (b.exact) flags.push_back("exact");
      if (!b.width_reached && !b.numerical_limit && !b.exact) flags.push_back("indeterminate-width");
      out["flags"] = flags;
      write_csv(g.out, "minimal_" + quantity, bracket_rows(b, t, i, jk));
      print(out);
      return kExitOk;
    }

    if (*compare) {
      const QMatrix q1 = load_matrix_file(spec1, params);
      const QMatrix q2 = load_matrix_file(spec2, params);
      DominanceConfig dc;
      dc.m_max = mmax;
      dc.k_max = kmax;
      dc.times = parse_times(t_list);
      dc.tol = g.tol;
      if (levels) dc.schedule = *levels;
      print(json{{"generator", to_json(generator_dominance(q1, q2, mmax))},
                 {"process", to_json(process_dominance(q1, q2, dc))}});
      return kExitOk;
    }

    if (*monotone) {
      const QMatrix q = load_matrix_file(spec, params);
      DominanceConfig dc;
      dc.m_max = mono_mmax;
      dc.k_max = mono_kmax;
      dc.times = parse_times(t_list);
      dc.tol = g.tol;
      if (levels) dc.schedule = *levels;
      if (is_single_birth(q, mono_mmax + mono_kmax)) {
        DeficiencyConfig def;
        def.tol = g.tol;
        print(to_json(single_birth_monotonicity(q, dc, def)));
      } else {
        print(json{{"monotone", to_json(is_monotone_process(q, dc))}});
      }
      return kExitOk;
    }

    if (*regular) {
      const QMatrix q = load_matrix_file(spec, params);
      std::vector<RegularityVerdict> verdicts;
      auto deficiency = [&] {
        DeficiencyConfig dc;
        dc.lambda = lambda;
        dc.tol = g.tol;
        dc.probes = LevelSchedule::parse_list(probes).levels();
        if (levels) dc.schedule = *levels;
        return deficiency_test(q, dc);
      };
      auto series = [&] {
        const auto& bd = q.birth_death();
        if (!bd) throw Error(ErrorCode::PreconditionFailed, "series method needs a birth-death spec");
        return birth_death_series(*bd);
      };
      if (reg_method == "deficiency") verdicts.push_back(deficiency());
      else if (reg_method == "lyapunov") verdicts.push_back(lyapunov_test(q, RateExpression::parse(phi), c, probe_max, growth));
      else if (reg_method == "series") verdicts.push_back(series());
      else if (reg_method == "auto") {
        verdicts.push_back(deficiency());
        if (q.birth_death() && q.birth_death()->birth.polynomial().nonnegative_from(0.0) &&
            q.birth_death()->birth(0) > 0.0)
          verdicts.push_back(series());
      } else {
        throw CLI::ValidationError("--method", "expected deficiency, lyapunov, series or auto");
      }
      json all = json::array();
      for (const auto& v : verdicts) all.push_back(to_json(v));
      print(verdicts.size() == 1 ? all[0] : json{{"verdicts", all}});
      return kExitOk;
    }

    if (*simulate_cmd) {
      const QMatrix q = load_matrix_file(spec, params);
      const SimulationResult r = minlab::simulate(q, i, t, SimulationConfig{paths, max_jumps, g.seed});
      print(to_json(r, 64));
      return kExitOk;
    }

    if (*scenario) {
      ScenarioConfig sc;
      sc.tol = g.tol;
      sc.seed = g.seed;
      sc.mc_paths = sc_paths;
      sc.mc_max_jumps = sc_jumps;
      sc.monte_carlo = !no_mc;
      sc.levels = levels;
      sc.data_dir = g.data_dir;
      const ScenarioReport r = run_scenario(scenario_name, g.alpha.value_or(2.0), sc);
      if (!g.out.empty()) write_traces(r, g.out);
      print(r.to_json());
      std::cerr << r.summary << '\n';
      return r.pass() ? kExitOk : kExitFail;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
