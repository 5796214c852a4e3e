#ifndef MINLAB_TRUNCATION_HPP
#define MINLAB_TRUNCATION_HPP

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "minlab/generator.hpp"

namespace minlab {

enum class Scheme {
  ZeroOutside,      // q_ij kept for i, j in {0..n}, everything else dropped
  AbsorbBoundary,   // outflow past n-1 lumped into an absorbing state n
  MaskRows,         // rows outside E_n zeroed, kept rows untouched
  StopRows,         // rows past n behave like row n
  GeneralBoundary,  // kept block plus user-chosen boundary rates
};

std::string_view to_string(Scheme s) noexcept;
Scheme scheme_from_string(std::string_view name);

struct Provenance {
  std::string source;
  Scheme scheme = Scheme::ZeroOutside;
  State level = 0;
};

/// A Q-matrix restricted to the window {0, ..., size()-1}. Every listed
/// target lies inside the window. Row defects are what a computation routes
/// into the cemetery state.
class FiniteQMatrix {
 public:
  FiniteQMatrix(std::vector<Row> rows, Provenance provenance);

  std::size_t size() const noexcept { return rows_.size(); }
  const Row& row(State i) const { return rows_.at(i); }
  double total_rate(State i) const { return rows_.at(i).total_rate; }
  double defect(State i) const { return rows_.at(i).defect(); }
  double entry(State i, State j) const;
  double max_rate() const noexcept;
  std::size_t nonzeros() const noexcept;
  bool is_conservative(double tol = kConservativeTol) const noexcept;
  const Provenance& provenance() const noexcept { return provenance_; }

  /// Row-major dense generator including the diagonal.
  std::vector<double> dense() const;

 private:
  std::vector<Row> rows_;
  Provenance provenance_;
};

/// Entrywise equality of two finite generators, padding the smaller window
/// with zero rows.
bool equivalent(const FiniteQMatrix& a, const FiniteQMatrix& b, double tol = 1e-12);

/// Boundary rates for the general scheme: given a kept row i of E_n =
/// {0..last} and its original row, returns rates into states > last.
using BoundaryOracle = std::function<std::vector<Transition>(State i, const Row& original, State last)>;

BoundaryOracle zero_boundary();
/// Lumps all outflow past `last` into the single state last + 1.
BoundaryOracle lump_boundary();

FiniteQMatrix truncate_zero(const QMatrix& q, State n);
FiniteQMatrix truncate_absorb(const QMatrix& q, State n);
/// `kept` lists E_n; need not be sorted. Rows outside E_n are zero.
FiniteQMatrix truncate_mask(const QMatrix& q, std::vector<State> kept, State level = 0);
FiniteQMatrix truncate_stop(const QMatrix& q, State n, State window_cap);
/// E_n = {0..last}; the boundary oracle must keep rates >= 0 and rows
/// sub-conservative, otherwise BoundaryViolation.
FiniteQMatrix truncate_general(const QMatrix& q, State last, const BoundaryOracle& boundary);

/// {0..n}
std::vector<State> window_states(State n);
/// {i <= search_cap : q_i <= n}
std::vector<State> states_with_rate_at_most(const QMatrix& q, double n, State search_cap);

/// Dispatch used by level schedules. MaskRows uses E_n = {0..n}; StopRows
/// caps the window at the largest target of rows 0..n; GeneralBoundary uses
/// E_n = {0..n} with the lumping oracle.
FiniteQMatrix truncate(const QMatrix& q, Scheme scheme, State n);

}  // namespace minlab

#endif
