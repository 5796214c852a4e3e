#ifndef MINLAB_MONTECARLO_HPP
#define MINLAB_MONTECARLO_HPP

#include <cstdint>
#include <map>

#include "minlab/generator.hpp"

namespace minlab {

enum class PathOutcome { AtState, Exploded, Killed };

struct PathSample {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  State start = 0;
  double t = 0.0;
  PathOutcome outcome = PathOutcome::AtState;
  State state = 0;  // meaningful for AtState
  std::size_t jumps = 0;
};

struct SimulationConfig {
  std::size_t paths = 100000;
  /// Paths that reach this many jumps before t count as exploded, which can
  /// only overstate the defect of the minimal process.
  std::size_t max_jumps = 1000000;
  std::uint64_t seed = 42;
};

struct SimulationResult {
  State start = 0;
  double t = 0.0;
  SimulationConfig config;
  std::map<State, std::size_t> counts;  // final state of surviving paths
  std::size_t exploded = 0;
  std::size_t killed = 0;
  std::size_t total_jumps = 0;

  double probability(State j) const;  // empirical P_ij(t)
  double sigma(State j) const;        // binomial standard error
  double explosion_frequency() const;
  double explosion_sigma() const;
  double defect() const;  // exploded + killed
  double defect_sigma() const;
};

/// Seeds path `index` from (seed, index) alone, so any subset of paths can
/// be regenerated.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// One path of the minimal process: exponential holding times, jump
/// targets proportional to off-diagonal rates, killing with probability
/// d_i / q_i at each jump.
PathSample simulate_path(const QMatrix& q, State i, double t, std::size_t max_jumps, std::uint64_t seed,
                         std::uint64_t index);

SimulationResult simulate(const QMatrix& q, State i, double t, const SimulationConfig& config = {});

}  // namespace minlab

#endif
