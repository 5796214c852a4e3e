#ifndef MINLAB_GENERATOR_HPP
#define MINLAB_GENERATOR_HPP

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "minlab/expression.hpp"

namespace minlab {

/// Index into the state space E = {0, 1, 2, ...}.
using State = std::size_t;

/// Absolute tolerance on row sums when deciding conservativity.
inline constexpr double kConservativeTol = 1e-12;

/// Rows with more listed targets than this are treated as unbounded.
inline constexpr std::size_t kMaxRowSupport = std::size_t{1} << 20;

struct Transition {
  State target;
  double rate;
};

/// One row of a Q-matrix: off-diagonal rates plus q_i = -q_ii.
struct Row {
  std::vector<Transition> entries;  // sorted by target, no diagonal, no duplicates
  double total_rate = 0.0;          // q_i

  double off_diagonal_sum() const noexcept;
  double defect() const noexcept;  // q_i minus the off-diagonal sum, clamped at 0
  double rate_to(State j) const noexcept;
  State max_target(State self) const noexcept;
};

struct RowDefect {
  State state;
  double defect;
};

enum class Family { BirthDeath, SingleBirth, PureBirth, Explicit, Custom };

std::string_view to_string(Family f) noexcept;

/// Birth rates b_i (to i+1) and death rates a_i (to i-1). The death rate is
/// ignored at i = 0 so the generated matrix is conservative.
struct BirthDeathSpec {
  RateExpression birth;
  RateExpression death;

  double birth_rate(State i) const noexcept { return birth(i); }
  double death_rate(State i) const noexcept { return i == 0 ? 0.0 : death(i); }
};

using RowOracle = std::function<Row(State)>;

/// A totally stable Q-matrix on the countable state space, given lazily
/// row by row. Immutable and cheap to copy; every row handed out by row()
/// has passed validation.
class QMatrix {
 public:
  static QMatrix from_oracle(RowOracle oracle, Family family = Family::Custom, std::string name = "custom");

  /// Rows listed explicitly; rows past the list are zero (absorbing).
  static QMatrix from_rows(std::vector<Row> rows, std::string name = "explicit");

  static QMatrix zero();

  Row row(State i) const;
  double total_rate(State i) const { return row(i).total_rate; }
  double rate(State i, State j) const;
  RowDefect defect(State i) const;

  Family family() const noexcept;
  const std::string& name() const noexcept;
  const std::optional<BirthDeathSpec>& birth_death() const noexcept;

  /// For explicit matrices: number of listed rows. Rows at or past this
  /// index are identically zero.
  std::optional<State> explicit_rows() const noexcept;

 private:
  friend QMatrix make_birth_death(const BirthDeathSpec& spec, std::string name);
  struct Impl;
  explicit QMatrix(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

/// Sorts, merges duplicate targets and checks the row invariants. Throws
/// NegativeRate, SuperConservative, InfiniteSupport or NonFiniteInput.
void normalize_row(State i, Row& row);

/// Builds q_{i,i-1} = a_i, q_{i,i+1} = b_i, q_i = a_i + b_i.
QMatrix make_birth_death(const BirthDeathSpec& spec, std::string name = "birth-death");

/// Forces validation of rows 0..up_to and returns their defects.
std::vector<RowDefect> validate(const QMatrix& q, State up_to);

bool is_conservative(const QMatrix& q, State up_to);
bool is_single_birth(const QMatrix& q, State up_to);

}  // namespace minlab

#endif
