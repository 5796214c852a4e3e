#ifndef MINLAB_RESOLVENT_HPP
#define MINLAB_RESOLVENT_HPP

#include <span>
#include <vector>

#include "minlab/truncation.hpp"

namespace minlab {

/// Banded LU factorization of A = lambda*I - Q for a finite generator Q.
///
/// A is a row diagonally dominant M-matrix with row sums lambda + d_i > 0.
/// Elimination tracks row sums instead of forming diagonal differences
/// (the Grassmann-Taksar-Heyman device), so factorization and both solves
/// only ever add nonnegative numbers. Solutions of nonnegative right-hand
/// sides keep full relative accuracy even when rates reach 1e12.
class MMatrixFactorization {
 public:
  MMatrixFactorization(const FiniteQMatrix& q, double lambda);

  std::size_t size() const noexcept { return n_; }

  /// A x = b for b >= 0.
  std::vector<double> solve(std::span<const double> b) const;
  /// A^T x = b for b >= 0.
  std::vector<double> solve_transposed(std::span<const double> b) const;

 private:
  double& lower(std::size_t i, std::size_t j) { return lower_[i * kl_ + (i - j - 1)]; }
  double lower(std::size_t i, std::size_t j) const { return lower_[i * kl_ + (i - j - 1)]; }
  double& upper(std::size_t i, std::size_t j) { return upper_[i * ku_ + (j - i - 1)]; }
  double upper(std::size_t i, std::size_t j) const { return upper_[i * ku_ + (j - i - 1)]; }

  std::size_t n_ = 0;
  std::size_t kl_ = 0;
  std::size_t ku_ = 0;
  std::vector<double> lower_;  // multipliers after factorization
  std::vector<double> upper_;  // magnitudes of the off-diagonal U entries
  std::vector<double> pivot_;
};

/// Row i of R(lambda) = (lambda*I - Q)^{-1} with its deficiency.
struct ResolventSlice {
  double lambda = 0.0;
  State row = 0;
  std::vector<double> values;  // R_ij(lambda) over the window
  double deficiency = 0.0;     // z_i(lambda) = 1 - lambda * sum_j R_ij
};

ResolventSlice resolvent_row(const FiniteQMatrix& q, double lambda, State i);

/// z(lambda) for every state of the window, computed as R d where d is the
/// row-defect vector (no cancellation against 1).
std::vector<double> deficiency_vector(const FiniteQMatrix& q, double lambda);

}  // namespace minlab

#endif
