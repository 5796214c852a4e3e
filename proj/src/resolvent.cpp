#include "minlab/resolvent.hpp"

#include <algorithm>
#include <cmath>

#include "minlab/error.hpp"

namespace minlab {

MMatrixFactorization::MMatrixFactorization(const FiniteQMatrix& q, double lambda) : n_(q.size()) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(ErrorCode::BadLambda, "lambda must be finite and > 0");
  for (State i = 0; i < n_; ++i)
    for (const auto& e : q.row(i).entries) {
      if (e.target < i) kl_ = std::max(kl_, i - e.target);
      else ku_ = std::max(ku_, e.target - i);
    }
  lower_.assign(n_ * kl_, 0.0);
  upper_.assign(n_ * ku_, 0.0);
  pivot_.assign(n_, 0.0);

  // rowsum[i] is the current sum of row i of the partially reduced matrix.
  std::vector<double> rowsum(n_);
  for (State i = 0; i < n_; ++i) {
    const Row& r = q.row(i);
    rowsum[i] = lambda + r.defect();
    for (const auto& e : r.entries) {
      if (e.target < i) lower(i, e.target) = e.rate;
      else upper(i, e.target) = e.rate;
    }
  }

  for (std::size_t k = 0; k < n_; ++k) {
    const std::size_t hi = std::min(n_ - 1, k + ku_);
    double pivot = rowsum[k];
    for (std::size_t j = k + 1; j <= hi; ++j) pivot += upper(k, j);
    if (!(pivot > 0.0) || !std::isfinite(pivot))
      throw Error(ErrorCode::SingularSystem, "zero pivot at row " + std::to_string(k));
    pivot_[k] = pivot;
    const std::size_t last_row = std::min(n_ - 1, k + kl_);
    for (std::size_t i = k + 1; i <= last_row; ++i) {
      const double l = lower(i, k);
      if (l == 0.0) continue;
      const double m = l / pivot;
      lower(i, k) = m;
      rowsum[i] += m * rowsum[k];
      for (std::size_t j = k + 1; j <= hi; ++j) {
        const double u = upper(k, j);
        if (u == 0.0 || j == i) continue;
        if (j < i) lower(i, j) += m * u;
        else upper(i, j) += m * u;
      }
    }
  }
}

std::vector<double> MMatrixFactorization::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t lo = i > kl_ ? i - kl_ : 0;
    for (std::size_t k = lo; k < i; ++k) x[i] += lower(i, k) * x[k];
  }
  for (std::size_t i = n_; i-- > 0;) {
    const std::size_t hi = std::min(n_ - 1, i + ku_);
    double s = x[i];
    for (std::size_t j = i + 1; j <= hi; ++j) s += upper(i, j) * x[j];
    x[i] = s / pivot_[i];
  }
  return x;
}

std::vector<double> MMatrixFactorization::solve_transposed(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t j = 0; j < n_; ++j) {
    const std::size_t lo = j > ku_ ? j - ku_ : 0;
    double s = x[j];
    for (std::size_t i = lo; i < j; ++i) s += upper(i, j) * x[i];
    x[j] = s / pivot_[j];
  }
  for (std::size_t k = n_; k-- > 0;) {
    const std::size_t hi = std::min(n_ - 1, k + kl_);
    for (std::size_t i = k + 1; i <= hi; ++i) x[k] += lower(i, k) * x[i];
  }
  return x;
}

ResolventSlice resolvent_row(const FiniteQMatrix& q, double lambda, State i) {
  if (i >= q.size()) throw Error(ErrorCode::InvalidArgument, "row outside window");
  const MMatrixFactorization lu(q, lambda);
  std::vector<double> unit(q.size(), 0.0);
  unit[i] = 1.0;
  ResolventSlice slice;
  slice.lambda = lambda;
  slice.row = i;
  slice.values = lu.solve_transposed(unit);
  double killed = 0.0;
  for (State j = 0; j < q.size(); ++j) killed += slice.values[j] * q.defect(j);
  slice.deficiency = killed;
  return slice;
}

std::vector<double> deficiency_vector(const FiniteQMatrix& q, double lambda) {
  const MMatrixFactorization lu(q, lambda);
  std::vector<double> d(q.size());
  for (State j = 0; j < q.size(); ++j) d[j] = q.defect(j);
  return lu.solve(d);
}

}  // namespace minlab
