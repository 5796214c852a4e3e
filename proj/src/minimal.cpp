#include "minlab/minimal.hpp"

#include <algorithm>
#include <cmath>

#include "minlab/error.hpp"

namespace minlab {

std::string_view to_string(Quantity q) noexcept {
  switch (q) {
    case Quantity::Entry: return "entry";
    case Quantity::Tail: return "tail";
    case Quantity::Mass: return "mass";
    case Quantity::ResolventEntry: return "resolvent-entry";
    case Quantity::Deficiency: return "deficiency";
  }
  return "entry";
}

MinimalProcess::MinimalProcess(QMatrix q, std::vector<State> starts, std::vector<double> times, BracketConfig config)
    : q_(std::move(q)), starts_(std::move(starts)), times_(std::move(times)), config_(std::move(config)) {
  if (starts_.empty() || times_.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one start and time");
  if (!(config_.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be > 0");
  for (double t : times_)
    if (!std::isfinite(t) || t < 0.0) throw Error(ErrorCode::NonFiniteInput, "time must be finite and >= 0");
}

State MinimalProcess::level() const {
  if (levels_run_.empty()) throw Error(ErrorCode::InvalidArgument, "no level computed yet");
  return levels_run_.back();
}

void MinimalProcess::extend_schedule() { config_.schedule = config_.schedule.extended(); }

bool MinimalProcess::advance() {
  const State needed = *std::max_element(starts_.begin(), starts_.end());
  while (!exhausted() && config_.schedule.levels()[next_level_] < needed) ++next_level_;
  if (exhausted()) return false;
  const State n = config_.schedule.levels()[next_level_++];

  const FiniteQMatrix fq = truncate_zero(q_, n);
  if (auto rows = q_.explicit_rows(); rows && n + 1 >= *rows) {
    bool closed = true;
    for (State i = 0; i < *rows && closed; ++i) closed = q_.row(i).max_target(i) <= n;
    exact_ = closed;
  }
  RowEvolution evo = propagate_rows(fq, starts_, times_);

  if (!history_.empty()) {
    const RowEvolution& prev = history_.back();
    for (std::size_t t = 0; t < times_.size(); ++t)
      for (std::size_t s = 0; s < starts_.size(); ++s)
        for (State j = 0; j < prev.window; ++j) {
          const double before = prev.values[t][s][j];
          const double after = evo.values[t][s][j];
          if (after < before - kMonotoneTol)
            throw Error(ErrorCode::MonotonicityViolation,
                        "P(" + std::to_string(starts_[s]) + "," + std::to_string(j) + ") fell from " +
                            std::to_string(before) + " to " + std::to_string(after) + " at level " + std::to_string(n));
        }
  }
  history_.push_back(std::move(evo));
  levels_run_.push_back(n);
  return true;
}

std::vector<double> MinimalProcess::mass_trace(std::size_t start, std::size_t time) const {
  std::vector<double> trace;
  trace.reserve(history_.size());
  for (const auto& h : history_) trace.push_back(h.mass(time, start));
  return trace;
}

std::pair<double, bool> MinimalProcess::mass_upper(std::size_t start, std::size_t time) const {
  const double lo = latest().mass(time, start);
  if (exact_) return {lo, false};
  if (!config_.use_stabilization || 1.0 - lo <= config_.tol) return {1.0, false};
  const auto trace = mass_trace(start, time);
  const Stabilization st = analyze_levels(trace, config_.tol);
  const double gap = 1.0 - st.extrapolated;
  if (gap > config_.tol && st.settles(gap)) {
    const double margin = std::max(2.0 * st.projected_remaining, config_.tol);
    return {std::min(1.0, lo + margin), true};
  }
  return {1.0, false};
}

BracketedValue MinimalProcess::make(Quantity what, std::size_t, std::size_t, double lo, double hi, bool heuristic,
                                    std::vector<double> trace) const {
  BracketedValue b;
  b.quantity = what;
  b.lo = std::clamp(lo, 0.0, 1.0);
  b.hi = std::clamp(std::max(hi, b.lo), 0.0, 1.0);
  b.level = level();
  b.numerical_limit = heuristic;
  b.exact = exact_;
  b.width_reached = b.width() <= config_.tol;
  b.levels = levels_run_;
  b.trace = std::move(trace);
  return b;
}

BracketedValue MinimalProcess::mass(std::size_t start, std::size_t time) const {
  const auto [hi, heuristic] = mass_upper(start, time);
  return make(Quantity::Mass, start, time, latest().mass(time, start), hi, heuristic, mass_trace(start, time));
}

BracketedValue MinimalProcess::entry(std::size_t start, State j, std::size_t time) const {
  std::vector<double> trace;
  for (const auto& h : history_) trace.push_back(j < h.window ? h.values[time][start][j] : 0.0);
  const double lo = trace.back();
  const double mass_lo = latest().mass(time, start);
  const auto [mass_hi, heuristic] = mass_upper(start, time);
  return make(Quantity::Entry, start, time, lo, std::min(1.0, lo + (mass_hi - mass_lo)), heuristic, std::move(trace));
}

BracketedValue MinimalProcess::tail(std::size_t start, State k, std::size_t time) const {
  std::vector<double> trace;
  double head = 0.0;
  for (const auto& h : history_) {
    const auto& row = h.values[time][start];
    double upper = 0.0;
    head = 0.0;
    for (State j = 0; j < row.size(); ++j) (j >= k ? upper : head) += row[j];
    trace.push_back(upper);
  }
  const auto [mass_hi, heuristic] = mass_upper(start, time);
  const double lo = trace.back();
  return make(Quantity::Tail, start, time, lo, std::min(1.0, mass_hi - head), heuristic, std::move(trace));
}

MinimalProcess::TailBounds MinimalProcess::tail_bounds(std::size_t start, std::size_t time, State k_max) const {
  const auto& row = latest().values[time][start];
  const auto [mass_hi, heuristic] = mass_upper(start, time);
  TailBounds out;
  out.heuristic = heuristic;
  out.lo.assign(k_max + 1, 0.0);
  out.hi.assign(k_max + 1, 0.0);
  // suffix[k] for k inside the window, 0 past it
  std::vector<double> suffix(row.size() + 1, 0.0);
  for (std::size_t j = row.size(); j-- > 0;) suffix[j] = suffix[j + 1] + row[j];
  double head = 0.0;
  for (State k = 0; k <= k_max; ++k) {
    if (k > 0 && k - 1 < row.size()) head += row[k - 1];
    const double lo = k < row.size() ? suffix[k] : 0.0;
    out.lo[k] = std::clamp(lo, 0.0, 1.0);
    out.hi[k] = std::clamp(std::min(1.0, mass_hi - head), out.lo[k], 1.0);
  }
  return out;
}

namespace {

template <typename Pick>
BracketedValue run_until_settled(const QMatrix& q, State i, double t, const BracketConfig& config, Pick pick) {
  MinimalProcess engine(q, {i}, {t}, config);
  std::optional<BracketedValue> best;
  while (engine.advance()) {
    BracketedValue b = pick(engine);
    const bool done = b.width_reached || b.numerical_limit || b.exact;
    best = std::move(b);
    if (done) break;
  }
  if (!best) throw Error(ErrorCode::InvalidArgument, "schedule never reaches start state " + std::to_string(i));
  return *best;
}

}  // namespace

BracketedValue minimal_entry(const QMatrix& q, State i, State j, double t, const BracketConfig& config) {
  return run_until_settled(q, i, t, config, [j](const MinimalProcess& e) { return e.entry(0, j, 0); });
}

BracketedValue minimal_mass(const QMatrix& q, State i, double t, const BracketConfig& config) {
  return run_until_settled(q, i, t, config, [](const MinimalProcess& e) { return e.mass(0, 0); });
}

BracketedValue minimal_tail(const QMatrix& q, State i, State k, double t, const BracketConfig& config) {
  return run_until_settled(q, i, t, config, [k](const MinimalProcess& e) { return e.tail(0, k, 0); });
}

SchemeScan scan_scheme(const QMatrix& q, Scheme scheme, const LevelSchedule& schedule, std::span<const State> starts,
                       std::span<const double> times) {
  SchemeScan scan;
  scan.scheme = scheme;
  const State needed = starts.empty() ? 0 : *std::max_element(starts.begin(), starts.end());
  for (State n : schedule.levels()) {
    const FiniteQMatrix fq = truncate(q, scheme, n);
    if (fq.size() <= needed) continue;
    RowEvolution evo = propagate_rows(fq, starts, times);
    std::vector<double> errors;
    for (std::size_t t = 0; t < times.size(); ++t)
      for (std::size_t s = 0; s < starts.size(); ++s) errors.push_back(std::abs(evo.mass(t, s) - 1.0));
    scan.levels.push_back(n);
    scan.rows.push_back(std::move(evo));
    scan.row_sum_error.push_back(std::move(errors));
  }
  return scan;
}

std::optional<LevelDecrease> find_level_decrease(const SchemeScan& scan, double threshold) {
  for (std::size_t l = 1; l < scan.rows.size(); ++l) {
    const RowEvolution& a = scan.rows[l - 1];
    const RowEvolution& b = scan.rows[l];
    for (std::size_t t = 0; t < a.times.size(); ++t)
      for (std::size_t s = 0; s < a.starts.size(); ++s)
        for (State j = 0; j < a.window; ++j) {
          const double before = a.values[t][s][j];
          const double after = j < b.window ? b.values[t][s][j] : 0.0;
          if (after < before - threshold)
            return LevelDecrease{scan.levels[l - 1], scan.levels[l], a.starts[s], j, a.times[t], before, after};
        }
  }
  return std::nullopt;
}

ConvergenceProbe scheme_convergence_probe(const QMatrix& q, Scheme scheme, State i, State j, double t,
                                          const LevelSchedule& schedule, double tol) {
  ConvergenceProbe p;
  p.scheme = scheme;
  p.i = i;
  p.j = j;
  p.t = t;
  const State starts[] = {i};
  const double times[] = {t};
  const SchemeScan scan = scan_scheme(q, scheme, schedule, starts, times);
  p.levels = scan.levels;
  for (const auto& evo : scan.rows) {
    p.values.push_back(j < evo.window ? evo.values[0][0][j] : 0.0);
    p.row_sums.push_back(evo.mass(0, 0));
  }
  for (std::size_t k = 1; k < p.values.size(); ++k)
    if (p.values[k] < p.values[k - 1] - kMonotoneTol) {
      p.monotone = false;
      p.first_decrease = k;
      break;
    }
  p.minimal = minimal_entry(q, i, j, t, BracketConfig{tol, schedule, true});
  if (!p.values.empty()) {
    p.fatou_floor = p.values.back() >= p.minimal.lo - tol;
    p.matches_minimal = p.minimal.contains(p.values.back(), tol);
  }
  return p;
}

}  // namespace minlab
