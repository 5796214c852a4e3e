#include "minlab/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "minlab/dominance.hpp"
#include "minlab/error.hpp"
#include "minlab/minimal.hpp"
#include "minlab/montecarlo.hpp"
#include "minlab/regularity.hpp"
#include "minlab/report.hpp"
#include "minlab/spec_io.hpp"

namespace minlab {

using nlohmann::json;

namespace {

QMatrix load(const ScenarioConfig& config, const char* file, const ParameterMap& overrides = {}) {
  return load_matrix_file(config.data_dir / file, overrides);
}

json inputs_json(const ScenarioConfig& config, const LevelSchedule& schedule) {
  return json{{"tol", num(config.tol)},
              {"seed", config.seed},
              {"mc_paths", config.monte_carlo ? config.mc_paths : 0},
              {"mc_max_jumps", config.mc_max_jumps},
              {"levels", schedule.levels()}};
}

// Scheme-zero mass bracket run level by level, recording every level.
BracketedValue traced_mass(const QMatrix& q, State i, double t, const BracketConfig& config,
                           std::vector<TraceRow>& rows) {
  MinimalProcess engine(q, {i}, {t}, config);
  std::optional<BracketedValue> best;
  while (engine.advance()) {
    BracketedValue b = engine.mass(0, 0);
    rows.push_back(TraceRow{b.level, t, i, 0, b.lo, b.lo, b.hi});
    const bool done = b.width_reached || b.numerical_limit || b.exact;
    best = std::move(b);
    if (done) break;
  }
  if (!best) throw Error(ErrorCode::InvalidArgument, "schedule never reaches the start state");
  return *best;
}

double defect_estimate(const BracketedValue& mass, double tol) {
  const Stabilization st = analyze_levels(mass.trace, tol);
  return 1.0 - (st.fired() ? st.extrapolated : mass.lo);
}

bool verdict_is(const json& j, std::string_view v) {
  return j.is_object() && j.contains("verdict") && j["verdict"] == v;
}

bool judge_counterexample(const json& f) {
  if (f.value("regime", "") != "counterexample") return false;
  const double tol = f.at("tol").get<double>();
  if (!verdict_is(f.at("generator"), "holds")) return false;
  if (!verdict_is(f.at("q1_regularity"), "regular-certified-up-to-tol")) return false;
  if (!verdict_is(f.at("q2_regularity"), "nonregular-numerical")) return false;
  if (f.at("mass_q1").at("lo").get<double>() < 1.0 - tol) return false;
  if (!(f.at("mass_q2").at("hi").get<double>() < 1.0)) return false;
  const json& proc = f.at("process");
  if (!verdict_is(proc, "fails") || proc.at("witness").is_null()) return false;
  const json& w = proc.at("witness");
  if (w.at("i") != 0 || w.at("m") != 0 || w.at("k") != 0 || w.at("t").get<double>() != 1.0) return false;
  if (!(w.at("left").at("lo").get<double>() > w.at("right").at("hi").get<double>() + tol)) return false;
  const json& mc = f.at("monte_carlo");
  if (!mc.is_null()) {
    const double freq = mc.at("explosion_frequency").get<double>();
    const double sigma = mc.at("explosion_sigma").get<double>();
    const double est = f.at("defect_estimate").get<double>();
    if (std::abs(freq - est) > std::max(4.0 * sigma, 2e-2)) return false;
  }
  return true;
}

bool judge_footnote(const json& f) {
  if (f.at("max_row_sum_error").get<double>() > 1e-9) return false;
  const std::string regime = f.value("regime", "");
  if (regime == "contradiction") {
    const json& mass = f.at("minimal_mass");
    if (f.at("witness").is_null()) return false;
    const json& w = f.at("witness");
    if (!(w.at("after").get<double>() < w.at("before").get<double>() - 1e-9)) return false;
    return mass.at("numerical_limit").get<bool>() && mass.at("hi").get<double>() < 1.0;
  }
  if (regime == "regular") return f.at("limit_matches_minimal").get<bool>();
  return false;
}

bool judge_kirstein(const json& f) {
  for (const char* name : {"bounded", "lyapunov"}) {
    const json& c = f.at(name);
    if (!verdict_is(c.at("generator"), "holds")) return false;
    if (c.at("predicted") != "holds" || !verdict_is(c.at("process"), "holds")) return false;
  }
  const json& c = f.at("counterexample");
  if (!verdict_is(c.at("generator"), "holds") || c.at("predicted") != "none") return false;
  if (!verdict_is(c.at("q2_regularity"), "nonregular-numerical")) return false;
  return verdict_is(c.at("process"), "fails");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

bool judge(std::string_view id, const json& findings) {
  try {
    if (id == "counterexample") return judge_counterexample(findings);
    if (id == "footnote") return judge_footnote(findings);
    if (id == "kirstein") return judge_kirstein(findings);
  } catch (const json::exception&) {
    return false;
  }
  return false;
}

bool ScenarioReport::pass() const { return judge(id, findings); }

json ScenarioReport::to_json() const {
  return json{{"report_version", kReportVersion},
              {"scenario", id},
              {"inputs", inputs},
              {"findings", findings},
              {"pass", pass()},
              {"summary", summary}};
}

ScenarioReport run_counterexample(double alpha, const ScenarioConfig& config) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::InvalidArgument, "alpha must be > 0");
  const QMatrix q1 = load(config, "q1.json");
  const QMatrix q2 = load(config, "q2.json", {{"alpha", alpha}});
  const LevelSchedule schedule = config.levels.value_or(default_transient_schedule());
  const BracketConfig bc{config.tol, schedule, true};

  ScenarioReport r;
  r.id = "counterexample";
  r.inputs = inputs_json(config, schedule);
  r.inputs["alpha"] = num(alpha);

  json& f = r.findings;
  f["regime"] = alpha > 1.0 ? "counterexample" : "outside-counterexample-regime";
  f["alpha"] = num(alpha);
  f["tol"] = num(config.tol);
  f["generator"] = to_json(generator_dominance(q1, q2, 50));
  DeficiencyConfig dc;
  dc.tol = config.tol;
  f["q1_regularity"] = to_json(deficiency_test(q1, dc));
  f["q2_regularity"] = to_json(deficiency_test(q2, dc));

  const BracketedValue m1 = traced_mass(q1, 0, 1.0, bc, r.traces["mass_q1"]);
  const BracketedValue m2 = traced_mass(q2, 0, 1.0, bc, r.traces["mass_q2"]);
  f["mass_q1"] = to_json(m1, true);
  f["mass_q2"] = to_json(m2, true);
  const double defect = defect_estimate(m2, config.tol);
  f["defect_estimate"] = num(defect);

  DominanceConfig pc;
  pc.m_max = 0;
  pc.k_max = 0;
  pc.times = {1.0};
  pc.tol = config.tol;
  pc.schedule = schedule;
  f["process"] = to_json(process_dominance(q1, q2, pc));

  if (config.monte_carlo) {
    SimulationConfig sc{config.mc_paths, config.mc_max_jumps, config.seed};
    f["monte_carlo"] = to_json(simulate(q2, 0, 1.0, sc));
  } else {
    f["monte_carlo"] = nullptr;
  }

  std::ostringstream s;
  s << "alpha=" << fmt(alpha) << ": generator dominance " << f["generator"]["verdict"].get<std::string>()
    << ", process dominance " << f["process"]["verdict"].get<std::string>() << "; mass from 0 at t=1: q1 ["
    << fmt(m1.lo) << ", " << fmt(m1.hi) << "], q2 [" << fmt(m2.lo) << ", " << fmt(m2.hi) << "], defect ~ "
    << fmt(defect);
  if (alpha <= 1.0) s << " (outside counterexample regime)";
  r.summary = s.str();
  return r;
}

ScenarioReport run_footnote_example(const QMatrix& q, const ScenarioConfig& config) {
  const LevelSchedule schedule = config.levels.value_or(LevelSchedule::geometric(8, 2, 6));
  const std::vector<double> times{0.25, 1.0, 4.0};
  const std::vector<State> starts{0, 1, 2, 3, 4};

  ScenarioReport r;
  r.id = "footnote";
  r.inputs = inputs_json(config, schedule);
  r.inputs["matrix"] = q.name();
  r.inputs["times"] = json::array({num(0.25), num(1.0), num(4.0)});
  r.inputs["starts"] = starts;
  json& f = r.findings;

  const SchemeScan scan = scan_scheme(q, Scheme::MaskRows, schedule, starts, times);
  double worst = 0.0;
  json row_sums = json::array();
  for (std::size_t l = 0; l < scan.levels.size(); ++l) {
    double level_worst = 0.0;
    for (double e : scan.row_sum_error[l]) level_worst = std::max(level_worst, e);
    worst = std::max(worst, level_worst);
    row_sums.push_back(json{{"level", scan.levels[l]}, {"max_error", num(level_worst)}});
  }
  f["row_sums"] = row_sums;
  f["max_row_sum_error"] = num(worst);

  const auto decrease = find_level_decrease(scan, 1e-9);
  if (decrease) {
    f["witness"] = json{{"level_from", decrease->level_from}, {"level_to", decrease->level_to},
                        {"i", decrease->i},                   {"j", decrease->j},
                        {"t", num(decrease->t)},              {"before", num(decrease->before)},
                        {"after", num(decrease->after)}};
    auto& rows = r.traces["witness_entry"];
    const std::size_t ti = static_cast<std::size_t>(std::find(times.begin(), times.end(), decrease->t) - times.begin());
    const std::size_t si = static_cast<std::size_t>(std::find(starts.begin(), starts.end(), decrease->i) - starts.begin());
    for (std::size_t l = 0; l < scan.levels.size(); ++l) {
      const auto& evo = scan.rows[l];
      const double v = decrease->j < evo.window ? evo.values[ti][si][decrease->j] : 0.0;
      rows.push_back(TraceRow{scan.levels[l], decrease->t, decrease->i, decrease->j, v, std::nullopt, std::nullopt});
    }
  } else {
    f["witness"] = nullptr;
    f["hint"] = "no decrease found; extend the level grid";
  }

  DeficiencyConfig dc;
  dc.tol = config.tol;
  const RegularityVerdict reg = deficiency_test(q, dc);
  f["regularity"] = to_json(reg);
  const BracketConfig bc{config.tol, default_transient_schedule(), true};
  if (reg.verdict == RegularityClass::Regular) {
    f["regime"] = "regular";
    const ConvergenceProbe probe = scheme_convergence_probe(q, Scheme::MaskRows, 0, 0, 1.0,
                                                            default_transient_schedule(), config.tol);
    f["limit_matches_minimal"] = probe.matches_minimal;
    f["masked_limit"] = probe.values.empty() ? json(nullptr) : num(probe.values.back());
    f["minimal_entry"] = to_json(probe.minimal);
    f["minimal_mass"] = to_json(minimal_mass(q, 0, 1.0, bc));
  } else {
    f["regime"] = reg.verdict == RegularityClass::NonregularNumerical ? "contradiction" : "indeterminate";
    f["minimal_mass"] = to_json(traced_mass(q, 0, 1.0, bc, r.traces["mass"]), true);
  }

  std::ostringstream s;
  s << q.name() << ": masked levels " << schedule.levels().front() << ".." << schedule.back()
    << ", worst row-sum error " << fmt(worst) << ", ";
  if (decrease)
    s << "decrease P(" << decrease->i << "," << decrease->j << ";t=" << fmt(decrease->t) << ") from "
      << fmt(decrease->before) << " at n=" << decrease->level_from << " to " << fmt(decrease->after) << " at n="
      << decrease->level_to;
  else
    s << "no level decrease";
  s << "; regime " << f["regime"].get<std::string>();
  r.summary = s.str();
  return r;
}

ScenarioReport run_footnote_example(double alpha, const ScenarioConfig& config) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::InvalidArgument, "alpha must be > 0");
  ScenarioReport r = run_footnote_example(load(config, "q2.json", {{"alpha", alpha}}), config);
  r.inputs["alpha"] = num(alpha);
  return r;
}

ScenarioReport run_kirstein_demo(const ScenarioConfig& config) {
  const LevelSchedule schedule = config.levels.value_or(default_transient_schedule());
  KirsteinConfig kc;
  kc.dominance.m_max = 10;
  kc.dominance.k_max = 15;
  kc.dominance.times = {0.5, 1.0, 2.0};
  kc.dominance.tol = config.tol;
  kc.dominance.schedule = schedule;
  kc.deficiency.tol = config.tol;

  ScenarioReport r;
  r.id = "kirstein";
  r.inputs = inputs_json(config, schedule);
  r.inputs["m_max"] = kc.dominance.m_max;
  r.inputs["k_max"] = kc.dominance.k_max;
  r.inputs["times"] = json::array({num(0.5), num(1.0), num(2.0)});
  json& f = r.findings;

  const KirsteinReport bounded = kirstein_transfer(load(config, "bounded_low.json"), load(config, "bounded_high.json"), kc);
  f["bounded"] = to_json(bounded);

  const QMatrix lin_low = load(config, "linear_low.json");
  const QMatrix lin_high = load(config, "linear_high.json");
  KirsteinConfig lc = kc;
  lc.q2_evidence = lyapunov_test(lin_high, RateExpression::parse("i"), 1.0, 1000);
  const KirsteinReport lyap = kirstein_transfer(lin_low, lin_high, lc);
  f["lyapunov"] = to_json(lyap);

  const KirsteinReport counter = kirstein_transfer(load(config, "q1.json"), load(config, "q2.json", {{"alpha", 2.0}}), kc);
  f["counterexample"] = to_json(counter);

  std::ostringstream s;
  s << "bounded pair: process " << to_string(bounded.process.verdict) << " (predicted "
    << to_string(bounded.predicted) << "); lyapunov pair: process " << to_string(lyap.process.verdict)
    << " (predicted " << to_string(lyap.predicted) << "); counterexample: generator "
    << to_string(counter.generator.verdict) << ", process " << to_string(counter.process.verdict)
    << ", no prediction";
  r.summary = s.str();
  return r;
}

ScenarioReport run_scenario(std::string_view id, double alpha, const ScenarioConfig& config) {
  if (id == "counterexample") return run_counterexample(alpha, config);
  if (id == "footnote") return run_footnote_example(alpha, config);
  if (id == "kirstein") return run_kirstein_demo(config);
  throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + std::string(id) + "'");
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream out;
  out << "level,t,i,j_or_k,value,lo,hi\n";
  for (const auto& r : rows) {
    out << r.level << ',' << fmt(r.t) << ',' << r.i << ',' << r.j_or_k << ',' << fmt(r.value) << ','
        << (r.lo ? fmt(*r.lo) : "") << ',' << (r.hi ? fmt(*r.hi) : "") << '\n';
  }
  return out.str();
}

std::vector<std::filesystem::path> write_traces(const ScenarioReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [name, rows] : report.traces) {
    const auto path = dir / (report.id + "_" + name + ".csv");
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
    out << trace_csv(rows);
    written.push_back(path);
  }
  return written;
}

}  // namespace minlab
