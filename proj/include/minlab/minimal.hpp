#ifndef MINLAB_MINIMAL_HPP
#define MINLAB_MINIMAL_HPP

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "minlab/levels.hpp"
#include "minlab/truncation.hpp"
#include "minlab/uniformization.hpp"

namespace minlab {

enum class Quantity { Entry, Tail, Mass, ResolventEntry, Deficiency };
std::string_view to_string(Quantity q) noexcept;

/// A closed interval certified to contain a quantity of the minimal process.
///
/// `lo` always comes from a finite truncation and is rigorous up to
/// floating point. `hi` is rigorous unless `numerical_limit` is set, in which
/// case it was tightened using the stabilization heuristic on the mass.
struct BracketedValue {
  Quantity quantity = Quantity::Entry;
  double lo = 0.0;
  double hi = 1.0;
  State level = 0;
  bool width_reached = false;    // hi - lo <= tol
  bool numerical_limit = false;  // hi relies on a stabilized limit estimate
  bool exact = false;            // truncation was exact (finite support)
  std::vector<State> levels;     // trace of lo over the levels run
  std::vector<double> trace;

  double width() const noexcept { return hi - lo; }
  bool contains(double value, double slack = 0.0) const noexcept {
    return value >= lo - slack && value <= hi + slack;
  }
};

struct BracketConfig {
  double tol = 1e-6;
  LevelSchedule schedule = default_transient_schedule();
  bool use_stabilization = true;
};

/// Entry-wise decrease between consecutive scheme-(2.1) levels above this is
/// reported as MonotonicityViolation.
inline constexpr double kMonotoneTol = 1e-12;

/// Increasing scheme-zero truncations of one Q-matrix, evaluated for a set
/// of start states and times with one uniformization pass per level.
class MinimalProcess {
 public:
  MinimalProcess(QMatrix q, std::vector<State> starts, std::vector<double> times, BracketConfig config = {});

  /// Runs the next level of the schedule. Returns false once exhausted.
  bool advance();
  bool exhausted() const noexcept { return next_level_ >= config_.schedule.size(); }
  void extend_schedule();

  State level() const;
  bool exact() const noexcept { return exact_; }
  const BracketConfig& config() const noexcept { return config_; }
  const std::vector<State>& starts() const noexcept { return starts_; }
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<RowEvolution>& history() const noexcept { return history_; }
  const std::vector<State>& levels_run() const noexcept { return levels_run_; }

  BracketedValue mass(std::size_t start, std::size_t time) const;
  BracketedValue entry(std::size_t start, State j, std::size_t time) const;
  BracketedValue tail(std::size_t start, State k, std::size_t time) const;

  /// [lo, hi] of the tail sums for k = 0..k_max at the latest level, without
  /// traces. Cheaper than tail() when sweeping a grid.
  struct TailBounds {
    std::vector<double> lo, hi;
    bool heuristic = false;
  };
  TailBounds tail_bounds(std::size_t start, std::size_t time, State k_max) const;

  /// Upper end of the mass bracket and whether it is heuristic.
  std::pair<double, bool> mass_upper(std::size_t start, std::size_t time) const;
  /// Trace of the in-window mass over the levels run.
  std::vector<double> mass_trace(std::size_t start, std::size_t time) const;

 private:
  const RowEvolution& latest() const { return history_.back(); }
  BracketedValue make(Quantity what, std::size_t start, std::size_t time, double lo, double hi, bool heuristic,
                      std::vector<double> trace) const;

  QMatrix q_;
  std::vector<State> starts_;
  std::vector<double> times_;
  BracketConfig config_;
  std::size_t next_level_ = 0;
  bool exact_ = false;
  std::vector<RowEvolution> history_;
  std::vector<State> levels_run_;
};

/// Runs levels until hi - lo <= tol, the mass limit stabilizes, or the
/// schedule is exhausted (width_reached stays false).
BracketedValue minimal_entry(const QMatrix& q, State i, State j, double t, const BracketConfig& config = {});
BracketedValue minimal_mass(const QMatrix& q, State i, double t, const BracketConfig& config = {});
BracketedValue minimal_tail(const QMatrix& q, State i, State k, double t, const BracketConfig& config = {});

/// Level values P^(n)_ij(t) of an arbitrary scheme next to the scheme-zero
/// bracket of the same entry.
struct ConvergenceProbe {
  Scheme scheme = Scheme::ZeroOutside;
  State i = 0;
  State j = 0;
  double t = 0.0;
  std::vector<State> levels;
  std::vector<double> values;
  std::vector<double> row_sums;
  bool monotone = true;
  std::optional<std::size_t> first_decrease;  // index into levels
  BracketedValue minimal;
  bool fatou_floor = false;      // final value >= minimal.lo - tol
  bool matches_minimal = false;  // final value inside the bracket +- tol
};

ConvergenceProbe scheme_convergence_probe(const QMatrix& q, Scheme scheme, State i, State j, double t,
                                          const LevelSchedule& schedule, double tol = 1e-6);

/// Rows of every level of a scheme for a grid of start states and times.
struct SchemeScan {
  Scheme scheme = Scheme::ZeroOutside;
  std::vector<State> levels;
  std::vector<RowEvolution> rows;  // one per level
  std::vector<std::vector<double>> row_sum_error;  // [level][t*starts + s] |sum_j P_ij - 1|
};

SchemeScan scan_scheme(const QMatrix& q, Scheme scheme, const LevelSchedule& schedule, std::span<const State> starts,
                       std::span<const double> times);

/// P^(n')_ij(t) < P^(n)_ij(t) - threshold for consecutive scan levels n < n'.
struct LevelDecrease {
  State level_from = 0;
  State level_to = 0;
  State i = 0;
  State j = 0;
  double t = 0.0;
  double before = 0.0;
  double after = 0.0;
};

/// First decrease in (level, t, i, j) order, if any.
std::optional<LevelDecrease> find_level_decrease(const SchemeScan& scan, double threshold);

}  // namespace minlab

#endif
