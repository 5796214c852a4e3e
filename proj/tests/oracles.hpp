#ifndef MINLAB_TESTS_ORACLES_HPP
#define MINLAB_TESTS_ORACLES_HPP

// Reference computations that share no code with the library.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "minlab/generator.hpp"
#include "minlab/truncation.hpp"

namespace oracle {

using Dense = std::vector<long double>;

inline Dense matmul(const Dense& a, const Dense& b, std::size_t n) {
  Dense c(n * n, 0.0L);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const long double aik = a[i * n + k];
      if (aik == 0.0L) continue;
      for (std::size_t j = 0; j < n; ++j) c[i * n + j] += aik * b[k * n + j];
    }
  return c;
}

// exp(tQ) by scaling and squaring with a long Taylor series in long double.
inline std::vector<double> expm(const std::vector<double>& q, std::size_t n, double t) {
  long double norm = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    long double row = 0.0L;
    for (std::size_t j = 0; j < n; ++j) row += std::fabs(static_cast<long double>(q[i * n + j]) * t);
    norm = std::max(norm, row);
  }
  int squarings = 0;
  while (norm > 0.125L) {
    norm /= 2.0L;
    ++squarings;
  }
  const long double scale = std::ldexp(static_cast<long double>(t), -squarings);
  Dense a(n * n);
  for (std::size_t k = 0; k < n * n; ++k) a[k] = q[k] * scale;
  Dense result(n * n, 0.0L), term(n * n, 0.0L);
  for (std::size_t i = 0; i < n; ++i) result[i * n + i] = term[i * n + i] = 1.0L;
  for (int k = 1; k <= 30; ++k) {
    term = matmul(term, a, n);
    for (auto& x : term) x /= k;
    for (std::size_t m = 0; m < n * n; ++m) result[m] += term[m];
  }
  for (int s = 0; s < squarings; ++s) result = matmul(result, result, n);
  return {result.begin(), result.end()};
}

inline double poisson_pmf(double mean, unsigned k) {
  return std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
}

inline double two_state_p00(double a, double b, double t) {
  // a: rate 0 -> 1, b: rate 1 -> 0
  return (b + a * std::exp(-(a + b) * t)) / (a + b);
}

// Random conservative (or not) n-state generator with integer-free rates.
inline minlab::FiniteQMatrix random_generator(std::mt19937_64& rng, std::size_t n, bool conservative = true) {
  std::uniform_real_distribution<double> rate(0.0, 3.0);
  std::bernoulli_distribution present(0.7);
  std::vector<minlab::Row> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !present(rng)) continue;
      const double r = rate(rng);
      rows[i].entries.push_back({j, r});
      sum += r;
    }
    rows[i].total_rate = conservative ? sum : sum + rate(rng) * 0.5;
  }
  return minlab::FiniteQMatrix(std::move(rows), {"random", minlab::Scheme::ZeroOutside, n - 1});
}

}  // namespace oracle

#endif
