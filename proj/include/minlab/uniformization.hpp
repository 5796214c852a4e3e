#ifndef MINLAB_UNIFORMIZATION_HPP
#define MINLAB_UNIFORMIZATION_HPP

#include <span>
#include <string_view>
#include <vector>

#include "minlab/truncation.hpp"

namespace minlab {

/// Poisson(mean) weights restricted to [left, right]; the dropped tails
/// carry at most `omitted` total probability.
struct PoissonWindow {
  std::size_t left = 0;
  std::size_t right = 0;
  std::vector<double> weights;  // weights[k - left]
  double omitted = 0.0;

  double weight(std::size_t k) const noexcept {
    return k < left || k > right ? 0.0 : weights[k - left];
  }
};

/// Total omitted Poisson mass per row of a uniformization pass.
inline constexpr double kPoissonTailBound = 1e-13;

PoissonWindow poisson_window(double mean, double epsilon = kPoissonTailBound);

/// Rows of P(t) = exp(tQ) for selected start states and times.
/// values[t][s] is the distribution at time times[t] started from
/// starts[s]; lost[t][s] is the mass absorbed by the cemetery state that
/// collects row defects.
struct RowEvolution {
  std::vector<State> starts;
  std::vector<double> times;
  std::size_t window = 0;
  std::vector<std::vector<std::vector<double>>> values;
  std::vector<std::vector<double>> lost;
  double uniformization_rate = 0.0;
  std::size_t steps = 0;

  double mass(std::size_t t, std::size_t s) const;
};

/// Uniformization with one shared pass over all requested times.
RowEvolution propagate_rows(const FiniteQMatrix& q, std::span<const State> starts, std::span<const double> times);

enum class KernelMethod { Uniformization, OdeCheck };
std::string_view to_string(KernelMethod m) noexcept;

/// Full sub-stochastic kernel P(t) on the window.
struct TransitionKernel {
  std::size_t size = 0;
  double time = 0.0;
  KernelMethod method = KernelMethod::Uniformization;
  std::vector<double> p;          // row-major
  std::vector<double> row_sums;
  std::vector<double> lost_mass;  // cemetery column

  double operator()(State i, State j) const { return p[i * size + j]; }
};

TransitionKernel transition(const FiniteQMatrix& q, double t);

/// Independent route: integrates the forward equation P' = PQ with an
/// adaptive Dormand-Prince stepper.
TransitionKernel transition_ode(const FiniteQMatrix& q, double t, double tolerance = 1e-13);

}  // namespace minlab

#endif
