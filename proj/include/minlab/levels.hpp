#ifndef MINLAB_LEVELS_HPP
#define MINLAB_LEVELS_HPP

#include <span>
#include <string_view>
#include <vector>

#include "minlab/generator.hpp"

namespace minlab {

/// Strictly increasing truncation levels.
class LevelSchedule {
 public:
  LevelSchedule() = default;
  explicit LevelSchedule(std::vector<State> levels);

  static LevelSchedule geometric(State start, State factor, std::size_t count);
  /// "8,16,32"
  static LevelSchedule parse_list(std::string_view text);
  /// "start:factor:count"
  static LevelSchedule parse_geometric(std::string_view text);

  /// Appends one level with the max level doubled.
  LevelSchedule extended() const;

  const std::vector<State>& levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return levels_.size(); }
  State back() const { return levels_.back(); }

 private:
  std::vector<State> levels_;
};

/// 8, 16, ..., 1024: the transient (uniformization) default.
LevelSchedule default_transient_schedule();
/// 8, 16, ..., 2^22: resolvent solves are linear in the window size.
LevelSchedule default_resolvent_schedule();

/// Heuristic limit estimate for a monotone sequence of level values.
///
/// Fires either when the last increment is below tol/100, or when the last
/// two increment ratios are geometric (0 < rho <= 0.8); in the latter case
/// the remaining change is projected as |delta| * rho / (1 - rho).
struct Stabilization {
  bool increment_rule = false;
  bool geometric_rule = false;
  double last_increment = 0.0;
  double ratio = 0.0;
  double projected_remaining = 0.0;
  double extrapolated = 0.0;

  bool fired() const noexcept { return increment_rule || geometric_rule; }
  /// True when the projected remaining change is small next to `gap`, the
  /// distance the limit would have to move to change the verdict.
  bool settles(double gap) const noexcept {
    return increment_rule || (geometric_rule && projected_remaining <= 0.1 * gap);
  }
};

Stabilization analyze_levels(std::span<const double> values, double tol);

}  // namespace minlab

#endif
