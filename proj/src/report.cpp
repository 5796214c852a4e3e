#include "minlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace minlab {

using nlohmann::json;

json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

namespace {

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

}  // namespace

json to_json(const BracketedValue& b, bool with_trace) {
  json j{{"quantity", to_string(b.quantity)},
         {"lo", num(b.lo)},
         {"hi", num(b.hi)},
         {"level", b.level},
         {"width_reached", b.width_reached},
         {"numerical_limit", b.numerical_limit},
         {"exact", b.exact}};
  if (with_trace) {
    j["levels"] = b.levels;
    j["trace"] = nums(b.trace);
  }
  return j;
}

json to_json(const DominanceWitness& w) {
  return json{{"i", w.i}, {"m", w.m}, {"k", w.k}, {"t", num(w.t)}, {"left", to_json(w.left)}, {"right", to_json(w.right)}};
}

json to_json(const DominanceReport& r) {
  json j{{"verdict", to_string(r.verdict)},
         {"reduction_used", to_string(r.reduction)},
         {"m_max", r.m_max},
         {"k_max", r.k_max},
         {"times", nums(r.times)},
         {"cells", r.cells},
         {"undecided", r.undecided},
         {"level", r.level},
         {"schedule_extended", r.schedule_extended},
         {"family_certified", r.family_certified},
         {"numerical_limit", r.numerical_limit},
         {"flags", r.flags}};
  j["witness"] = r.witness ? to_json(*r.witness) : json(nullptr);
  return j;
}

json to_json(const KirsteinReport& r) {
  json j{{"generator", to_json(r.generator)},
         {"process", to_json(r.process)},
         {"bounded", r.bounded},
         {"predicted", to_string(r.predicted)},
         {"confirmed", r.confirmed},
         {"verdict", to_string(r.verdict)},
         {"flags", r.flags}};
  j["q2_regularity"] = r.q2_regularity ? to_json(*r.q2_regularity) : json(nullptr);
  return j;
}

json to_json(const SingleBirthReport& r) {
  return json{{"monotone", to_json(r.monotone)},
              {"unique", to_json(r.unique)},
              {"self_generator", to_json(r.self_generator)},
              {"consistent", r.consistent}};
}

json to_json(const RegularityVerdict& v) {
  json j{{"verdict", to_string(v.verdict)}, {"method", to_string(v.method)}, {"flags", v.flags}};
  json evidence = json::object();
  if (v.deficiency) {
    const auto& d = *v.deficiency;
    json z = json::array();
    for (const auto& row : d.z) z.push_back(nums(row));
    std::vector<bool> stab(d.stabilized.begin(), d.stabilized.end());
    evidence["deficiency"] = json{{"lambda", num(d.lambda)}, {"probes", d.probes}, {"levels", d.levels},
                                  {"z", z},                  {"estimates", nums(d.estimates)},
                                  {"stabilized", stab}};
  }
  if (v.lyapunov) {
    const auto& c = *v.lyapunov;
    json cert{{"phi", c.phi_source},         {"c", num(c.c)},
              {"probe_max", c.probe_max},    {"growth_floor", num(c.growth_floor)},
              {"nondecreasing", c.nondecreasing}, {"growth_ok", c.growth_ok},
              {"valid", c.valid}};
    cert["first_violation"] = c.first_violation ? json(*c.first_violation) : json(nullptr);
    double worst = c.margin.empty() ? 0.0 : c.margin.front();
    for (double m : c.margin) worst = std::min(worst, m);
    cert["min_margin"] = num(worst);
    evidence["lyapunov"] = cert;
  }
  if (v.series) {
    const auto& s = *v.series;
    evidence["series"] = json{{"checkpoints", s.checkpoints},
                              {"log_partial_sums", nums(s.log_partial)},
                              {"total", num(s.total)},
                              {"terms", s.terms}};
  }
  j["evidence"] = evidence;
  return j;
}

json to_json(const TruncatedComparison& c) {
  json rows = json::array();
  for (const auto& r : c.rows)
    rows.push_back(json{{"t", num(r.t)},
                        {"i", r.i},
                        {"tail1", num(r.tail1)},
                        {"tail2", num(r.tail2)},
                        {"ordered", r.ordered},
                        {"localization_gap", num(r.localization_gap)}});
  return json{{"n", c.n},
              {"all_ordered", c.all_ordered},
              {"max_localization_gap", num(c.max_localization_gap)},
              {"rows", rows}};
}

json to_json(const SimulationResult& r, State max_state) {
  json p = json::object();
  json s = json::object();
  for (const auto& [state, count] : r.counts) {
    if (state > max_state) continue;
    p[std::to_string(state)] = num(r.probability(state));
    s[std::to_string(state)] = num(r.sigma(state));
  }
  return json{{"start", r.start},
              {"t", num(r.t)},
              {"paths", r.config.paths},
              {"max_jumps", r.config.max_jumps},
              {"seed", r.config.seed},
              {"probabilities", p},
              {"sigma", s},
              {"exploded", r.exploded},
              {"killed", r.killed},
              {"explosion_frequency", num(r.explosion_frequency())},
              {"explosion_sigma", num(r.explosion_sigma())},
              {"defect", num(r.defect())},
              {"defect_sigma", num(r.defect_sigma())},
              {"total_jumps", r.total_jumps}};
}

json to_json(const TransitionKernel& k) {
  json rows = json::array();
  for (State i = 0; i < k.size; ++i) {
    json row = json::array();
    for (State j = 0; j < k.size; ++j) row.push_back(num(k(i, j)));
    rows.push_back(row);
  }
  return json{{"size", k.size},
              {"t", num(k.time)},
              {"method", to_string(k.method)},
              {"p", rows},
              {"row_sums", nums(k.row_sums)},
              {"lost_mass", nums(k.lost_mass)}};
}

std::string dump(const json& j) { return j.dump(2); }

}  // namespace minlab
