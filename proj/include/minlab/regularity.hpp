#ifndef MINLAB_REGULARITY_HPP
#define MINLAB_REGULARITY_HPP

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minlab/generator.hpp"
#include "minlab/levels.hpp"

namespace minlab {

enum class RegularityClass { Regular, NonregularNumerical, Indeterminate };
enum class RegularityMethod { Deficiency, Lyapunov, BirthDeathSeries, Comparison };
std::string_view to_string(RegularityClass c) noexcept;
std::string_view to_string(RegularityMethod m) noexcept;

struct DeficiencyEvidence {
  double lambda = 1.0;
  std::vector<State> probes;
  std::vector<State> levels;
  std::vector<std::vector<double>> z;  // [level][probe], upper bounds on z_i(lambda)
  std::vector<double> estimates;       // limit estimate per probe (last value if not stabilized)
  std::vector<bool> stabilized;
};

struct LyapunovCertificate {
  std::string phi_source;
  double c = 0.0;
  State probe_max = 0;
  double growth_floor = 0.0;
  std::vector<double> phi;
  std::vector<double> drift;   // sum_j q_ij (phi_j - phi_i)
  std::vector<double> margin;  // c (1 + phi_i) - drift_i
  std::optional<State> first_violation;
  bool nondecreasing = true;
  bool growth_ok = false;  // phi(probe_max) > phi(0) + growth_floor
  bool valid = false;
};

struct SeriesEvidence {
  std::vector<State> checkpoints;   // n at each doubling
  std::vector<double> log_partial;  // log of the partial sum up to each checkpoint
  double total = 0.0;               // partial sum at the last checkpoint (may be inf)
  std::size_t terms = 0;
};

struct RegularityVerdict {
  RegularityClass verdict = RegularityClass::Indeterminate;
  RegularityMethod method = RegularityMethod::Deficiency;
  std::optional<DeficiencyEvidence> deficiency;
  std::optional<LyapunovCertificate> lyapunov;
  std::optional<SeriesEvidence> series;
  std::vector<std::string> flags;

  bool regular() const noexcept { return verdict == RegularityClass::Regular; }
};

struct DeficiencyConfig {
  double lambda = 1.0;
  std::vector<State> probes{0};
  double tol = 1e-6;
  LevelSchedule schedule = default_resolvent_schedule();
};

/// Scheme-zero resolvent deficiencies z^(n)_i(lambda), which decrease to
/// z_i(lambda) as n grows. Regular once every probe is below tol;
/// nonregular-numerical once every probe's limit estimate has stabilized
/// above 10 tol.
RegularityVerdict deficiency_test(const QMatrix& q, const DeficiencyConfig& config = {});

/// Drift condition sum_j q_ij (phi_j - phi_i) <= c (1 + phi_i) on rows
/// 0..probe_max. A finite probe cannot show phi is unbounded; instead
/// phi(probe_max) must exceed phi(0) + growth_floor.
RegularityVerdict lyapunov_test(const QMatrix& q, const std::function<double(State)>& phi, double c, State probe_max,
                                double growth_floor = 1.0, std::string phi_source = "phi");
RegularityVerdict lyapunov_test(const QMatrix& q, const RateExpression& phi, double c, State probe_max,
                                double growth_floor = 1.0);

struct SeriesConfig {
  std::size_t max_terms = std::size_t{1} << 22;
  double divergence_threshold = 1e6;
};

/// Classical birth-death criterion: the process is unique iff
/// sum_n (1 / (b_n pi_n)) sum_{k<=n} pi_k diverges. Evaluated in the log
/// domain at doubling checkpoints.
RegularityVerdict birth_death_series(const BirthDeathSpec& spec, const SeriesConfig& config = {});

/// If Q2 is regular and Q1 is dominated by Q2 in the generator sense, Q1 is
/// regular. Both must be conservative on rows 0..m_max.
RegularityVerdict regularity_by_comparison(const QMatrix& q1, const QMatrix& q2, const RegularityVerdict& q2_evidence,
                                           State m_max = 50, const DeficiencyConfig& spot_check = {});

struct TruncatedComparisonRow {
  double t = 0.0;
  State i = 0;
  double tail1 = 0.0;  // sum_{j>=n} P^(n,1)_ij(t), absorbing boundary
  double tail2 = 0.0;
  bool ordered = false;
  double head_absorb1 = 0.0, head_mask1 = 0.0;
  double head_absorb2 = 0.0, head_mask2 = 0.0;
  double localization_gap = 0.0;  // max |head_absorb - head_mask| over both chains
};

struct TruncatedComparison {
  State n = 0;
  std::vector<TruncatedComparisonRow> rows;
  bool all_ordered = false;
  double max_localization_gap = 0.0;
};

/// Compares absorbing-boundary truncations of Q1 and Q2 at level n and the
/// head sums of the absorbing and masked kernels of each.
TruncatedComparison truncated_comparison_probe(const QMatrix& q1, const QMatrix& q2, State n,
                                               const std::vector<double>& times);

}  // namespace minlab

#endif
