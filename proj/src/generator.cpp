#include "minlab/generator.hpp"

#include <algorithm>
#include <cmath>

#include "minlab/error.hpp"

namespace minlab {

double Row::off_diagonal_sum() const noexcept {
  double s = 0.0;
  for (const auto& e : entries) s += e.rate;
  return s;
}

double Row::defect() const noexcept { return std::max(0.0, total_rate - off_diagonal_sum()); }

double Row::rate_to(State j) const noexcept {
  auto it = std::lower_bound(entries.begin(), entries.end(), j,
                             [](const Transition& e, State s) { return e.target < s; });
  return it != entries.end() && it->target == j ? it->rate : 0.0;
}

State Row::max_target(State self) const noexcept {
  return entries.empty() ? self : std::max(self, entries.back().target);
}

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::BirthDeath: return "birth-death";
    case Family::SingleBirth: return "single-birth";
    case Family::PureBirth: return "pure-birth";
    case Family::Explicit: return "explicit";
    case Family::Custom: return "custom";
  }
  return "custom";
}

void normalize_row(State i, Row& row) {
  if (row.entries.size() > kMaxRowSupport)
    throw Error(ErrorCode::InfiniteSupport, "row " + std::to_string(i) + " lists " +
                                                std::to_string(row.entries.size()) + " targets");
  std::sort(row.entries.begin(), row.entries.end(),
            [](const Transition& a, const Transition& b) { return a.target < b.target; });
  std::vector<Transition> merged;
  merged.reserve(row.entries.size());
  for (const auto& e : row.entries) {
    if (!std::isfinite(e.rate))
      throw Error(ErrorCode::NonFiniteInput, "row " + std::to_string(i) + ": non-finite rate");
    if (e.rate < 0.0)
      throw Error(ErrorCode::NegativeRate, "q(" + std::to_string(i) + "," + std::to_string(e.target) +
                                               ") = " + std::to_string(e.rate));
    if (e.target == i)
      throw Error(ErrorCode::MalformedSpec, "row " + std::to_string(i) + " lists its own diagonal");
    if (e.rate == 0.0) continue;
    if (!merged.empty() && merged.back().target == e.target)
      merged.back().rate += e.rate;
    else
      merged.push_back(e);
  }
  row.entries = std::move(merged);
  if (!std::isfinite(row.total_rate) || row.total_rate < 0.0)
    throw Error(ErrorCode::NonFiniteInput, "row " + std::to_string(i) + ": q_i must be finite and >= 0");

  const double off = row.off_diagonal_sum();
  if (off > row.total_rate + kConservativeTol * std::max(1.0, row.total_rate))
    throw Error(ErrorCode::SuperConservative, "row " + std::to_string(i) + ": off-diagonal sum " +
                                                  std::to_string(off) + " exceeds q_i " +
                                                  std::to_string(row.total_rate));
}

struct QMatrix::Impl {
  RowOracle oracle;
  Family family = Family::Custom;
  std::string name;
  std::optional<BirthDeathSpec> birth_death;
  std::optional<State> explicit_rows;
};

QMatrix QMatrix::from_oracle(RowOracle oracle, Family family, std::string name) {
  auto impl = std::make_shared<Impl>();
  impl->oracle = std::move(oracle);
  impl->family = family;
  impl->name = std::move(name);
  return QMatrix(std::move(impl));
}

QMatrix QMatrix::from_rows(std::vector<Row> rows, std::string name) {
  for (State i = 0; i < rows.size(); ++i) normalize_row(i, rows[i]);
  auto shared = std::make_shared<const std::vector<Row>>(std::move(rows));
  auto impl = std::make_shared<Impl>();
  impl->oracle = [shared](State i) { return i < shared->size() ? (*shared)[i] : Row{}; };
  impl->family = Family::Explicit;
  impl->name = std::move(name);
  impl->explicit_rows = shared->size();
  return QMatrix(std::move(impl));
}

QMatrix QMatrix::zero() { return from_rows({}, "zero"); }

Row QMatrix::row(State i) const {
  Row r = impl_->oracle(i);
  if (impl_->family != Family::Explicit) normalize_row(i, r);
  return r;
}

double QMatrix::rate(State i, State j) const {
  Row r = row(i);
  return i == j ? -r.total_rate : r.rate_to(j);
}

RowDefect QMatrix::defect(State i) const { return {i, row(i).defect()}; }

Family QMatrix::family() const noexcept { return impl_->family; }
const std::string& QMatrix::name() const noexcept { return impl_->name; }
const std::optional<BirthDeathSpec>& QMatrix::birth_death() const noexcept { return impl_->birth_death; }
std::optional<State> QMatrix::explicit_rows() const noexcept { return impl_->explicit_rows; }

QMatrix make_birth_death(const BirthDeathSpec& spec, std::string name) {
  auto impl = std::make_shared<QMatrix::Impl>();
  impl->oracle = [spec](State i) {
    Row r;
    const double a = spec.death_rate(i);
    const double b = spec.birth_rate(i);
    if (a != 0.0) r.entries.push_back({i - 1, a});
    if (b != 0.0) r.entries.push_back({i + 1, b});
    r.total_rate = a + b;
    return r;
  };
  const bool no_deaths = spec.death.polynomial().degree() < 0;
  impl->family = no_deaths ? Family::PureBirth : Family::BirthDeath;
  impl->name = std::move(name);
  impl->birth_death = spec;
  return QMatrix(std::move(impl));
}

std::vector<RowDefect> validate(const QMatrix& q, State up_to) {
  State last = up_to;
  if (auto n = q.explicit_rows()) last = std::min(up_to, *n == 0 ? 0 : *n - 1);
  std::vector<RowDefect> out;
  out.reserve(last + 1);
  for (State i = 0; i <= last; ++i) out.push_back(q.defect(i));
  return out;
}

bool is_conservative(const QMatrix& q, State up_to) {
  for (const auto& d : validate(q, up_to))
    if (d.defect > kConservativeTol) return false;
  return true;
}

bool is_single_birth(const QMatrix& q, State up_to) {
  for (State i = 0; i <= up_to; ++i) {
    const Row r = q.row(i);
    if (r.rate_to(i + 1) <= 0.0) return false;
    if (r.max_target(i) > i + 1) return false;
  }
  return true;
}

}  // namespace minlab
