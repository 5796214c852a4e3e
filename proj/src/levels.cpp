#include "minlab/levels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "minlab/error.hpp"

namespace minlab {

LevelSchedule::LevelSchedule(std::vector<State> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw Error(ErrorCode::InvalidArgument, "level schedule is empty");
  for (std::size_t k = 1; k < levels_.size(); ++k)
    if (levels_[k] <= levels_[k - 1]) throw Error(ErrorCode::InvalidArgument, "levels must be strictly increasing");
}

LevelSchedule LevelSchedule::geometric(State start, State factor, std::size_t count) {
  if (start == 0 || factor < 2 || count == 0)
    throw Error(ErrorCode::InvalidArgument, "geometric schedule needs start >= 1, factor >= 2, count >= 1");
  std::vector<State> levels;
  State n = start;
  for (std::size_t k = 0; k < count; ++k, n *= factor) levels.push_back(n);
  return LevelSchedule(std::move(levels));
}

namespace {

std::size_t parse_size(std::string_view s) {
  std::size_t v = 0;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw Error(ErrorCode::InvalidArgument, "bad integer '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

}  // namespace

LevelSchedule LevelSchedule::parse_list(std::string_view text) {
  std::vector<State> levels;
  for (auto part : split(text, ',')) levels.push_back(parse_size(part));
  return LevelSchedule(std::move(levels));
}

LevelSchedule LevelSchedule::parse_geometric(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw Error(ErrorCode::InvalidArgument, "expected start:factor:count");
  return geometric(parse_size(parts[0]), parse_size(parts[1]), parse_size(parts[2]));
}

LevelSchedule LevelSchedule::extended() const {
  std::vector<State> levels = levels_;
  levels.push_back(levels_.back() * 2);
  return LevelSchedule(std::move(levels));
}

LevelSchedule default_transient_schedule() { return LevelSchedule::geometric(8, 2, 8); }

LevelSchedule default_resolvent_schedule() { return LevelSchedule::geometric(8, 2, 20); }

Stabilization analyze_levels(std::span<const double> values, double tol) {
  Stabilization s;
  const std::size_t n = values.size();
  if (n == 0) return s;
  s.extrapolated = values.back();
  if (n < 2) return s;
  const double d2 = values[n - 1] - values[n - 2];
  s.last_increment = d2;
  s.projected_remaining = std::abs(d2);
  if (n >= 3 && std::abs(d2) < tol * 1e-2) {
    // Only trust the plain rule once the sequence has actually slowed down.
    const double d1 = values[n - 2] - values[n - 3];
    if (std::abs(d2) <= std::abs(d1) || d1 == 0.0) {
      s.increment_rule = true;
      return s;
    }
  }
  if (n < 4) return s;
  const double d1 = values[n - 2] - values[n - 3];
  const double d0 = values[n - 3] - values[n - 4];
  if (d0 == 0.0 || d1 == 0.0) return s;
  const double r1 = d1 / d0;
  const double r2 = d2 / d1;
  const double rho = std::max(r1, r2);
  if (r1 > 0.0 && r2 > 0.0 && rho <= 0.8) {
    s.geometric_rule = true;
    s.ratio = rho;
    s.projected_remaining = std::abs(d2) * rho / (1.0 - rho);
    s.extrapolated = values.back() + d2 * rho / (1.0 - rho);
  }
  return s;
}

}  // namespace minlab
