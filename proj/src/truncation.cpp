#include "minlab/truncation.hpp"

#include <algorithm>
#include <cmath>

#include "minlab/error.hpp"

namespace minlab {

std::string_view to_string(Scheme s) noexcept {
  switch (s) {
    case Scheme::ZeroOutside: return "zero";
    case Scheme::AbsorbBoundary: return "absorb";
    case Scheme::MaskRows: return "mask";
    case Scheme::StopRows: return "stop";
    case Scheme::GeneralBoundary: return "general";
  }
  return "zero";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "zero") return Scheme::ZeroOutside;
  if (name == "absorb") return Scheme::AbsorbBoundary;
  if (name == "mask") return Scheme::MaskRows;
  if (name == "stop") return Scheme::StopRows;
  if (name == "general") return Scheme::GeneralBoundary;
  throw Error(ErrorCode::InvalidArgument, "unknown scheme '" + std::string(name) + "'");
}

FiniteQMatrix::FiniteQMatrix(std::vector<Row> rows, Provenance provenance)
    : rows_(std::move(rows)), provenance_(std::move(provenance)) {
  for (State i = 0; i < rows_.size(); ++i) {
    normalize_row(i, rows_[i]);
    if (!rows_[i].entries.empty() && rows_[i].entries.back().target >= rows_.size())
      throw Error(ErrorCode::WindowTooSmall, "row " + std::to_string(i) + " jumps outside the window of size " +
                                                 std::to_string(rows_.size()));
  }
}

double FiniteQMatrix::entry(State i, State j) const {
  const Row& r = rows_.at(i);
  return i == j ? -r.total_rate : r.rate_to(j);
}

double FiniteQMatrix::max_rate() const noexcept {
  double m = 0.0;
  for (const auto& r : rows_) m = std::max(m, r.total_rate);
  return m;
}

std::size_t FiniteQMatrix::nonzeros() const noexcept {
  std::size_t n = 0;
  for (const auto& r : rows_) n += r.entries.size();
  return n;
}

bool FiniteQMatrix::is_conservative(double tol) const noexcept {
  return std::all_of(rows_.begin(), rows_.end(), [tol](const Row& r) { return r.defect() <= tol; });
}

std::vector<double> FiniteQMatrix::dense() const {
  const auto n = size();
  std::vector<double> out(n * n, 0.0);
  for (State i = 0; i < n; ++i) {
    out[i * n + i] = -rows_[i].total_rate;
    for (const auto& e : rows_[i].entries) out[i * n + e.target] = e.rate;
  }
  return out;
}

bool equivalent(const FiniteQMatrix& a, const FiniteQMatrix& b, double tol) {
  const auto n = std::max(a.size(), b.size());
  auto value = [](const FiniteQMatrix& m, State i, State j) {
    return i < m.size() ? m.entry(i, j) : 0.0;
  };
  for (State i = 0; i < n; ++i) {
    std::vector<State> cols{i};
    if (i < a.size())
      for (const auto& e : a.row(i).entries) cols.push_back(e.target);
    if (i < b.size())
      for (const auto& e : b.row(i).entries) cols.push_back(e.target);
    for (State j : cols)
      if (std::abs(value(a, i, j) - value(b, i, j)) > tol) return false;
  }
  return true;
}

BoundaryOracle zero_boundary() {
  return [](State, const Row&, State) { return std::vector<Transition>{}; };
}

BoundaryOracle lump_boundary() {
  return [](State, const Row& original, State last) {
    double out = 0.0;
    for (const auto& e : original.entries)
      if (e.target > last) out += e.rate;
    std::vector<Transition> t;
    if (out > 0.0) t.push_back({last + 1, out});
    return t;
  };
}

namespace {

Row keep_inside(const Row& r, State last) {
  Row out;
  out.total_rate = r.total_rate;
  for (const auto& e : r.entries)
    if (e.target <= last) out.entries.push_back(e);
  return out;
}

}  // namespace

FiniteQMatrix truncate_zero(const QMatrix& q, State n) {
  std::vector<Row> rows(n + 1);
  for (State i = 0; i <= n; ++i) rows[i] = keep_inside(q.row(i), n);
  return FiniteQMatrix(std::move(rows), {q.name(), Scheme::ZeroOutside, n});
}

FiniteQMatrix truncate_absorb(const QMatrix& q, State n) {
  std::vector<Row> rows(n + 1);
  for (State i = 0; i < n; ++i) {
    const Row original = q.row(i);
    Row r = keep_inside(original, n - 1);
    double lumped = 0.0;
    for (const auto& e : original.entries)
      if (e.target >= n) lumped += e.rate;
    if (lumped > 0.0) r.entries.push_back({n, lumped});
    rows[i] = std::move(r);
  }
  return FiniteQMatrix(std::move(rows), {q.name(), Scheme::AbsorbBoundary, n});
}

FiniteQMatrix truncate_mask(const QMatrix& q, std::vector<State> kept, State level) {
  std::sort(kept.begin(), kept.end());
  kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
  std::vector<std::pair<State, Row>> kept_rows;
  State extent = 0;
  for (State i : kept) {
    Row r = q.row(i);
    extent = std::max(extent, r.max_target(i) + 1);
    kept_rows.emplace_back(i, std::move(r));
  }
  std::vector<Row> rows(extent);
  for (auto& [i, r] : kept_rows) rows[i] = std::move(r);
  return FiniteQMatrix(std::move(rows), {q.name(), Scheme::MaskRows, level});
}

FiniteQMatrix truncate_stop(const QMatrix& q, State n, State window_cap) {
  if (window_cap < n)
    throw Error(ErrorCode::WindowTooSmall, "window cap " + std::to_string(window_cap) + " below level " +
                                               std::to_string(n));
  std::vector<Row> rows(window_cap + 1);
  for (State i = 0; i <= n; ++i) {
    rows[i] = q.row(i);
    if (rows[i].max_target(i) > window_cap)
      throw Error(ErrorCode::WindowTooSmall, "row " + std::to_string(i) + " jumps past window cap " +
                                                 std::to_string(window_cap));
  }
  // Row i > n is row n with the roles of i and n exchanged: jumps of row n
  // keep their targets, and a jump of row n onto i becomes a jump onto n.
  const Row& frozen = rows[n];
  for (State i = n + 1; i <= window_cap; ++i) {
    Row r;
    r.total_rate = frozen.total_rate;
    for (const auto& e : frozen.entries) r.entries.push_back({e.target == i ? n : e.target, e.rate});
    rows[i] = std::move(r);
  }
  return FiniteQMatrix(std::move(rows), {q.name(), Scheme::StopRows, n});
}

FiniteQMatrix truncate_general(const QMatrix& q, State last, const BoundaryOracle& boundary) {
  std::vector<Row> rows(last + 1);
  State extent = last + 1;
  for (State i = 0; i <= last; ++i) {
    const Row original = q.row(i);
    Row r = keep_inside(original, last);
    const double inside = r.off_diagonal_sum();
    double outside = 0.0;
    for (const auto& t : boundary(i, original, last)) {
      if (!std::isfinite(t.rate) || t.rate < 0.0)
        throw Error(ErrorCode::BoundaryViolation, "negative boundary rate in row " + std::to_string(i));
      if (t.target <= last)
        throw Error(ErrorCode::BoundaryViolation, "boundary target " + std::to_string(t.target) +
                                                      " lies inside the window");
      outside += t.rate;
      extent = std::max(extent, t.target + 1);
      r.entries.push_back(t);
    }
    if (inside + outside > r.total_rate + kConservativeTol * std::max(1.0, r.total_rate))
      throw Error(ErrorCode::BoundaryViolation, "row " + std::to_string(i) + " becomes super-conservative");
    rows[i] = std::move(r);
  }
  rows.resize(extent);
  return FiniteQMatrix(std::move(rows), {q.name(), Scheme::GeneralBoundary, last});
}

std::vector<State> window_states(State n) {
  std::vector<State> s(n + 1);
  for (State i = 0; i <= n; ++i) s[i] = i;
  return s;
}

std::vector<State> states_with_rate_at_most(const QMatrix& q, double n, State search_cap) {
  std::vector<State> s;
  for (State i = 0; i <= search_cap; ++i)
    if (q.total_rate(i) <= n) s.push_back(i);
  return s;
}

FiniteQMatrix truncate(const QMatrix& q, Scheme scheme, State n) {
  switch (scheme) {
    case Scheme::ZeroOutside: return truncate_zero(q, n);
    case Scheme::AbsorbBoundary: return truncate_absorb(q, n);
    case Scheme::MaskRows: return truncate_mask(q, window_states(n), n);
    case Scheme::StopRows: {
      State cap = n;
      for (State i = 0; i <= n; ++i) cap = std::max(cap, q.row(i).max_target(i));
      return truncate_stop(q, n, cap);
    }
    case Scheme::GeneralBoundary: return truncate_general(q, n, lump_boundary());
  }
  return truncate_zero(q, n);
}

}  // namespace minlab
