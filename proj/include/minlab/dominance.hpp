#ifndef MINLAB_DOMINANCE_HPP
#define MINLAB_DOMINANCE_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minlab/minimal.hpp"
#include "minlab/regularity.hpp"

namespace minlab {

enum class Verdict { Holds, Fails, Indeterminate };
enum class Reduction { Full, Conservative };
std::string_view to_string(Verdict v) noexcept;
std::string_view to_string(Reduction r) noexcept;

/// A cell (i, m, k, t) where the left tail sum is certified larger than the
/// right one. Generator witnesses have t = 0 and exact (lo == hi) sums.
struct DominanceWitness {
  State i = 0;
  State m = 0;
  State k = 0;
  double t = 0.0;
  BracketedValue left;
  BracketedValue right;

  double separation() const noexcept { return left.lo - right.hi; }
};

struct DominanceReport {
  Verdict verdict = Verdict::Indeterminate;
  Reduction reduction = Reduction::Full;
  State m_max = 0;
  State k_max = 0;  // largest k examined
  std::vector<double> times;
  std::optional<DominanceWitness> witness;
  std::size_t cells = 0;
  std::size_t undecided = 0;
  State level = 0;  // last truncation level used (process dominance)
  bool schedule_extended = false;
  bool family_certified = false;  // verdict extends to every i, m
  bool numerical_limit = false;   // some bracket used a heuristic upper end
  std::vector<std::string> flags;
};

struct DominanceConfig {
  State m_max = 50;
  State k_max = 60;
  std::vector<double> times{0.25, 1.0, 4.0};
  double tol = 1e-6;
  LevelSchedule schedule = default_transient_schedule();
};

/// Generator condition: sum_{j>=k} q1_ij <= sum_{j>=k} q2_mj for all
/// i <= m <= m_max and k in {0..i} u {m+1, ...}. The sums include the
/// diagonal when k <= i. k past both rows' supports is vacuous. Uses the
/// two-sided conservative form when both matrices are conservative on the
/// checked rows.
DominanceReport generator_dominance(const QMatrix& q1, const QMatrix& q2, State m_max = 50);

/// Evaluates the two-sided conservative form directly, checks that it agrees
/// with the full condition on the same range and returns its value.
/// Throws NotConservative.
bool conservative_reduction_check(const QMatrix& q1, const QMatrix& q2, State m_max = 50);

/// Tail-sum ordering of the minimal processes, decided from scheme-zero
/// brackets: holds when left.hi <= right.lo + tol on every cell, fails as
/// soon as some left.lo > right.hi. An indeterminate sweep doubles the
/// largest level once.
DominanceReport process_dominance(const QMatrix& q1, const QMatrix& q2, const DominanceConfig& config = {});

/// Rates bounded on the whole state space, as far as can be told from the
/// representation (constant birth-death rates or explicit rows).
bool is_bounded(const QMatrix& q);

enum class Prediction { Holds, Fails, None };
std::string_view to_string(Prediction p) noexcept;

struct KirsteinReport {
  DominanceReport generator;
  DominanceReport process;
  bool bounded = false;
  std::optional<RegularityVerdict> q2_regularity;
  Prediction predicted = Prediction::None;
  bool confirmed = false;  // numeric process verdict equals the prediction
  Verdict verdict = Verdict::Indeterminate;
  std::vector<std::string> flags;
};

struct KirsteinConfig {
  DominanceConfig dominance;
  /// Used instead of running the deficiency test on Q2.
  std::optional<RegularityVerdict> q2_evidence;
  DeficiencyConfig deficiency;
};

/// Generator dominance, then the process-level consequence the theorem
/// predicts: failure transfers always, success transfers when both
/// matrices are bounded or Q2 is regular. Otherwise the process verdict is
/// recorded but no prediction is made.
KirsteinReport kirstein_transfer(const QMatrix& q1, const QMatrix& q2, const KirsteinConfig& config = {});

/// Process dominance of Q against itself.
DominanceReport is_monotone_process(const QMatrix& q, const DominanceConfig& config = {});

struct SingleBirthReport {
  DominanceReport monotone;
  RegularityVerdict unique;
  DominanceReport self_generator;
  bool consistent = false;  // monotone <=> unique and self-dominant, where decided
};

/// Throws NotSingleBirth if some row 0..m_max jumps up by more than one.
SingleBirthReport single_birth_monotonicity(const QMatrix& q, const DominanceConfig& config = {},
                                            const DeficiencyConfig& deficiency = {});

}  // namespace minlab

#endif
