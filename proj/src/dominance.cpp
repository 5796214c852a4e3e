#include "minlab/dominance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "minlab/error.hpp"

namespace minlab {

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Holds: return "holds";
    case Verdict::Fails: return "fails";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

std::string_view to_string(Reduction r) noexcept { return r == Reduction::Full ? "full" : "conservative"; }

std::string_view to_string(Prediction p) noexcept {
  switch (p) {
    case Prediction::Holds: return "holds";
    case Prediction::Fails: return "fails";
    case Prediction::None: return "none";
  }
  return "none";
}

namespace {

// sum_{j>=k} q_ij with q_ii = -q_i included when k <= i.
double tail_sum(const Row& row, State self, State k) {
  double s = 0.0;
  for (const auto& e : row.entries)
    if (e.target >= k) s += e.rate;
  if (self >= k) s -= row.total_rate;
  return s;
}

// sum_{j<=k} q_ij for k < self (no diagonal term).
double head_sum(const Row& row, State k) {
  double s = 0.0;
  for (const auto& e : row.entries)
    if (e.target <= k) s += e.rate;
  return s;
}

bool leq(double a, double b) { return a <= b + 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

BracketedValue exact_value(double v) {
  BracketedValue b;
  b.quantity = Quantity::Tail;
  b.lo = b.hi = v;
  b.exact = true;
  b.width_reached = true;
  return b;
}

struct GeneratorScan {
  bool holds = true;
  std::optional<DominanceWitness> witness;
  std::size_t cells = 0;
  State k_max = 0;
};

GeneratorScan scan_full(const std::vector<Row>& r1, const std::vector<Row>& r2) {
  GeneratorScan out;
  const State m_max = r1.size() - 1;
  for (State i = 0; i <= m_max; ++i)
    for (State m = i; m <= m_max; ++m) {
      const State support = std::max(r1[i].max_target(i), r2[m].max_target(m)) + 1;
      std::vector<State> ks(i + 1);
      std::iota(ks.begin(), ks.end(), State{0});
      for (State k = m + 1; k <= support; ++k) ks.push_back(k);
      for (State k : ks) {
        ++out.cells;
        out.k_max = std::max(out.k_max, k);
        const double left = tail_sum(r1[i], i, k);
        const double right = tail_sum(r2[m], m, k);
        if (!leq(left, right)) {
          out.holds = false;
          out.witness = DominanceWitness{i, m, k, 0.0, exact_value(left), exact_value(right)};
          return out;
        }
      }
    }
  return out;
}

// Two-sided conservative form: upper tails for k >= m+1, lower heads
// sum_{j<=k} for k <= i-1. A head violation at k is reported as the
// equivalent full-form cell k+1.
GeneratorScan scan_conservative(const std::vector<Row>& r1, const std::vector<Row>& r2) {
  GeneratorScan out;
  const State m_max = r1.size() - 1;
  for (State i = 0; i <= m_max; ++i)
    for (State m = i; m <= m_max; ++m) {
      for (State k = 0; k + 1 <= i; ++k) {
        ++out.cells;
        const double left = head_sum(r1[i], k);
        const double right = head_sum(r2[m], k);
        if (!leq(right, left)) {
          out.holds = false;
          out.witness = DominanceWitness{i, m, k + 1, 0.0, exact_value(tail_sum(r1[i], i, k + 1)),
                                         exact_value(tail_sum(r2[m], m, k + 1))};
          return out;
        }
      }
      const State support = std::max(r1[i].max_target(i), r2[m].max_target(m)) + 1;
      for (State k = m + 1; k <= support; ++k) {
        ++out.cells;
        out.k_max = std::max(out.k_max, k);
        const double left = tail_sum(r1[i], i, k);
        const double right = tail_sum(r2[m], m, k);
        if (!leq(left, right)) {
          out.holds = false;
          out.witness = DominanceWitness{i, m, k, 0.0, exact_value(left), exact_value(right)};
          return out;
        }
      }
    }
  return out;
}

std::vector<Row> rows_up_to(const QMatrix& q, State m_max) {
  std::vector<Row> rows;
  rows.reserve(m_max + 1);
  for (State i = 0; i <= m_max; ++i) rows.push_back(q.row(i));
  return rows;
}

bool rows_conservative(const std::vector<Row>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.defect() <= kConservativeTol; });
}

// Birth-death pairs satisfy the condition iff b1 <= b2 and a1 >= a2
// pointwise. With polynomial rates this extends past m_max when both
// differences are nonnegative polynomials on [m_max + 1, inf).
bool family_extends(const QMatrix& q1, const QMatrix& q2, State m_max) {
  const auto& s1 = q1.birth_death();
  const auto& s2 = q2.birth_death();
  if (!s1 || !s2) return false;
  const double from = static_cast<double>(m_max) + 1.0;
  return (s2->birth.polynomial() - s1->birth.polynomial()).nonnegative_from(from) &&
         (s1->death.polynomial() - s2->death.polynomial()).nonnegative_from(from);
}

}  // namespace

DominanceReport generator_dominance(const QMatrix& q1, const QMatrix& q2, State m_max) {
  const auto r1 = rows_up_to(q1, m_max);
  const auto r2 = rows_up_to(q2, m_max);
  DominanceReport report;
  report.m_max = m_max;
  const bool conservative = rows_conservative(r1) && rows_conservative(r2);
  report.reduction = conservative ? Reduction::Conservative : Reduction::Full;
  const GeneratorScan scan = conservative ? scan_conservative(r1, r2) : scan_full(r1, r2);
  report.cells = scan.cells;
  report.k_max = scan.k_max;
  report.verdict = scan.holds ? Verdict::Holds : Verdict::Fails;
  report.witness = scan.witness;
  if (scan.holds && family_extends(q1, q2, m_max)) {
    report.family_certified = true;
    report.flags.push_back("family-certified");
  }
  return report;
}

bool conservative_reduction_check(const QMatrix& q1, const QMatrix& q2, State m_max) {
  const auto r1 = rows_up_to(q1, m_max);
  const auto r2 = rows_up_to(q2, m_max);
  if (!rows_conservative(r1) || !rows_conservative(r2))
    throw Error(ErrorCode::NotConservative, "two-sided form needs conservative rows 0.." + std::to_string(m_max));
  const bool reduced = scan_conservative(r1, r2).holds;
  const bool full = scan_full(r1, r2).holds;
  if (reduced != full) throw std::logic_error("conservative and full dominance forms disagree");
  return reduced;
}

DominanceReport process_dominance(const QMatrix& q1, const QMatrix& q2, const DominanceConfig& config) {
  if (config.times.empty()) throw Error(ErrorCode::InvalidArgument, "time grid is empty");
  std::vector<State> starts(config.m_max + 1);
  std::iota(starts.begin(), starts.end(), State{0});
  const BracketConfig bc{config.tol, config.schedule, true};
  MinimalProcess p1(q1, starts, config.times, bc);
  MinimalProcess p2(q2, starts, config.times, bc);

  DominanceReport report;
  report.m_max = config.m_max;
  report.k_max = config.k_max;
  report.times = config.times;
  const std::size_t nt = config.times.size();
  const std::size_t ns = starts.size();

  for (;;) {
    const bool more1 = p1.advance();
    const bool more2 = p2.advance();
    if (!more1 || !more2) {
      if (report.schedule_extended) break;
      p1.extend_schedule();
      p2.extend_schedule();
      report.schedule_extended = true;
      continue;
    }
    report.level = p1.level();

    std::vector<MinimalProcess::TailBounds> b1, b2;  // [t * ns + s]
    for (std::size_t t = 0; t < nt; ++t)
      for (std::size_t s = 0; s < ns; ++s) {
        b1.push_back(p1.tail_bounds(s, t, config.k_max));
        b2.push_back(p2.tail_bounds(s, t, config.k_max));
      }

    std::size_t undecided = 0, cells = 0;
    bool heuristic = false;
    std::optional<DominanceWitness> witness;
    for (State i = 0; i < ns && !witness; ++i)
      for (State m = i; m < ns && !witness; ++m)
        for (State k = 0; k <= config.k_max && !witness; ++k)
          for (std::size_t t = 0; t < nt; ++t) {
            ++cells;
            const auto& left = b1[t * ns + i];
            const auto& right = b2[t * ns + m];
            if (left.lo[k] > right.hi[k] + config.tol) {
              witness = DominanceWitness{i, m, k, config.times[t], p1.tail(i, k, t), p2.tail(m, k, t)};
              heuristic = heuristic || right.heuristic;
              break;
            }
            if (left.hi[k] <= right.lo[k] + config.tol) {
              heuristic = heuristic || left.heuristic;
            } else {
              ++undecided;
            }
          }

    report.cells = cells;
    report.undecided = undecided;
    report.numerical_limit = heuristic;
    if (witness) {
      report.verdict = Verdict::Fails;
      report.witness = std::move(witness);
      break;
    }
    if (undecided == 0) {
      report.verdict = Verdict::Holds;
      break;
    }
    report.verdict = Verdict::Indeterminate;
  }
  if (report.numerical_limit) report.flags.push_back("numerical-limit");
  if (report.schedule_extended) report.flags.push_back("schedule-extended");
  return report;
}

bool is_bounded(const QMatrix& q) {
  if (q.explicit_rows()) return true;
  if (const auto& bd = q.birth_death()) return bd->birth.is_constant() && bd->death.is_constant();
  return false;
}

KirsteinReport kirstein_transfer(const QMatrix& q1, const QMatrix& q2, const KirsteinConfig& config) {
  KirsteinReport report;
  report.generator = generator_dominance(q1, q2, config.dominance.m_max);
  report.bounded = is_bounded(q1) && is_bounded(q2);

  if (report.generator.verdict == Verdict::Fails) {
    report.predicted = Prediction::Fails;
  } else {
    if (!report.bounded)
      report.q2_regularity = config.q2_evidence ? *config.q2_evidence : deficiency_test(q2, config.deficiency);
    if (report.bounded || (report.q2_regularity && report.q2_regularity->regular()))
      report.predicted = Prediction::Holds;
    else
      report.flags.push_back("q2-not-certified-regular");
  }

  report.process = process_dominance(q1, q2, config.dominance);
  switch (report.predicted) {
    case Prediction::Fails:
      report.confirmed = report.process.verdict == Verdict::Fails;
      report.verdict = Verdict::Fails;
      break;
    case Prediction::Holds:
      report.confirmed = report.process.verdict == Verdict::Holds;
      report.verdict = Verdict::Holds;
      break;
    case Prediction::None:
      report.verdict = Verdict::Indeterminate;
      if (report.process.verdict == Verdict::Fails) report.flags.push_back("generator-holds-process-fails");
      break;
  }
  if (report.predicted != Prediction::None && !report.confirmed) report.flags.push_back("prediction-not-confirmed");
  return report;
}

DominanceReport is_monotone_process(const QMatrix& q, const DominanceConfig& config) {
  return process_dominance(q, q, config);
}

SingleBirthReport single_birth_monotonicity(const QMatrix& q, const DominanceConfig& config,
                                            const DeficiencyConfig& deficiency) {
  if (!is_single_birth(q, config.m_max + config.k_max))
    throw Error(ErrorCode::NotSingleBirth, "some checked row jumps up by more than one state");
  SingleBirthReport report;
  report.monotone = is_monotone_process(q, config);
  report.unique = deficiency_test(q, deficiency);
  report.self_generator = generator_dominance(q, q, config.m_max);

  const Verdict mono = report.monotone.verdict;
  const RegularityClass uniq = report.unique.verdict;
  const Verdict self = report.self_generator.verdict;
  if (mono == Verdict::Holds)
    report.consistent = uniq != RegularityClass::NonregularNumerical && self != Verdict::Fails;
  else if (mono == Verdict::Fails)
    report.consistent = !(uniq == RegularityClass::Regular && self == Verdict::Holds);
  else
    report.consistent = true;
  return report;
}

}  // namespace minlab
