#include "minlab/montecarlo.hpp"

#include <cmath>
#include <random>
#include <unordered_map>

#include "minlab/error.hpp"

namespace minlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double binomial_sigma(double p, std::size_t n) { return std::sqrt(p * (1.0 - p) / static_cast<double>(n)); }

// Rows are validated once per state and reused across paths.
class RowCache {
 public:
  explicit RowCache(const QMatrix& q) : q_(q) {}
  const Row& get(State i) {
    if (i < dense_limit) {
      if (i >= dense_.size()) dense_.resize(i + 1);
      auto& slot = dense_[i];
      if (!slot.filled) {
        slot.row = q_.row(i);
        slot.filled = true;
      }
      return slot.row;
    }
    auto it = sparse_.find(i);
    if (it == sparse_.end()) it = sparse_.emplace(i, q_.row(i)).first;
    return it->second;
  }

 private:
  static constexpr State dense_limit = State{1} << 22;
  struct Slot {
    Row row;
    bool filled = false;
  };
  const QMatrix& q_;
  std::vector<Slot> dense_;
  std::unordered_map<State, Row> sparse_;
};

PathSample run_path(RowCache& rows, State i, double t, std::size_t max_jumps, std::uint64_t seed,
                    std::uint64_t index) {
  PathSample p;
  p.seed = seed;
  p.index = index;
  p.start = i;
  p.t = t;
  std::mt19937_64 rng(path_seed(seed, index));
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  State s = i;
  double clock = 0.0;
  for (;;) {
    const Row& row = rows.get(s);
    if (row.total_rate <= 0.0) break;
    clock += std::exponential_distribution<double>(row.total_rate)(rng);
    if (clock > t) break;
    if (p.jumps >= max_jumps) {
      p.outcome = PathOutcome::Exploded;
      return p;
    }
    ++p.jumps;
    double u = unif(rng) * row.total_rate;
    const double defect = row.defect();
    if (u < defect) {
      p.outcome = PathOutcome::Killed;
      return p;
    }
    u -= defect;
    State next = row.entries.back().target;
    for (const auto& e : row.entries) {
      if (u < e.rate) {
        next = e.target;
        break;
      }
      u -= e.rate;
    }
    s = next;
  }
  p.outcome = PathOutcome::AtState;
  p.state = s;
  return p;
}

}  // namespace

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

PathSample simulate_path(const QMatrix& q, State i, double t, std::size_t max_jumps, std::uint64_t seed,
                         std::uint64_t index) {
  RowCache rows(q);
  return run_path(rows, i, t, max_jumps, seed, index);
}

SimulationResult simulate(const QMatrix& q, State i, double t, const SimulationConfig& config) {
  if (config.paths == 0) throw Error(ErrorCode::InvalidArgument, "need at least one path");
  if (!std::isfinite(t) || t < 0.0) throw Error(ErrorCode::NonFiniteInput, "time must be finite and >= 0");
  SimulationResult out;
  out.start = i;
  out.t = t;
  out.config = config;
  RowCache rows(q);
  for (std::uint64_t k = 0; k < config.paths; ++k) {
    const PathSample p = run_path(rows, i, t, config.max_jumps, config.seed, k);
    out.total_jumps += p.jumps;
    switch (p.outcome) {
      case PathOutcome::AtState: ++out.counts[p.state]; break;
      case PathOutcome::Exploded: ++out.exploded; break;
      case PathOutcome::Killed: ++out.killed; break;
    }
  }
  return out;
}

double SimulationResult::probability(State j) const {
  const auto it = counts.find(j);
  return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(config.paths);
}

double SimulationResult::sigma(State j) const { return binomial_sigma(probability(j), config.paths); }

double SimulationResult::explosion_frequency() const {
  return static_cast<double>(exploded) / static_cast<double>(config.paths);
}

double SimulationResult::explosion_sigma() const { return binomial_sigma(explosion_frequency(), config.paths); }

double SimulationResult::defect() const {
  return static_cast<double>(exploded + killed) / static_cast<double>(config.paths);
}

double SimulationResult::defect_sigma() const { return binomial_sigma(defect(), config.paths); }

}  // namespace minlab
