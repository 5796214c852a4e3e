#include "minlab/uniformization.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

#include "minlab/error.hpp"

namespace minlab {

PoissonWindow poisson_window(double mean, double epsilon) {
  if (!std::isfinite(mean) || mean < 0.0) throw Error(ErrorCode::NonFiniteInput, "Poisson mean must be finite and >= 0");
  PoissonWindow w;
  if (mean == 0.0) {
    w.weights = {1.0};
    return w;
  }
  const auto mode = static_cast<std::size_t>(std::floor(mean));
  const double log_mode = -mean + static_cast<double>(mode) * std::log(mean) - std::lgamma(static_cast<double>(mode) + 1.0);

  // Walk right from the mode until the geometric bound on the remaining
  // tail drops below epsilon / 2.
  std::vector<double> right{std::exp(log_mode)};
  double right_tail = 0.0;
  for (std::size_t k = mode;; ++k) {
    const double ratio = mean / static_cast<double>(k + 1);
    const double next = right.back() * ratio;
    if (ratio < 1.0) {
      right_tail = next / (1.0 - ratio);
      if (right_tail <= epsilon / 2) break;
    }
    right.push_back(next);
  }
  std::vector<double> left;
  double left_tail = 0.0;
  double current = right.front();
  for (std::size_t k = mode; k > 0; --k) {
    const double ratio = static_cast<double>(k) / mean;  // w_{k-1} = w_k * k / mean
    const double prev = current * ratio;
    left_tail = prev / (1.0 - ratio);
    if (ratio < 1.0 && left_tail <= epsilon / 2) break;
    left.push_back(prev);
    current = prev;
    left_tail = 0.0;
  }
  w.left = mode - left.size();
  w.right = mode + right.size() - 1;
  w.weights.assign(left.rbegin(), left.rend());
  w.weights.insert(w.weights.end(), right.begin(), right.end());
  // The mode weight carries the rounding of lgamma at large means (relative
  // error ~1e-9 near 1e6); the window sum does not.
  double total = 0.0;
  for (double x : w.weights) total += x;
  w.omitted = (left_tail + right_tail) / total;
  for (double& x : w.weights) x /= total;
  w.omitted = std::min(w.omitted, epsilon);
  return w;
}

double RowEvolution::mass(std::size_t t, std::size_t s) const {
  double m = 0.0;
  for (double v : values[t][s]) m += v;
  return m;
}

std::string_view to_string(KernelMethod m) noexcept {
  return m == KernelMethod::Uniformization ? "uniformization" : "ode-check";
}

namespace {

// next = v M for a banded M given by its diagonals; band[d][j] is the weight
// of the edge (j - offsets[d]) -> j.
template <std::size_t D>
void band_step_fixed(const std::vector<std::ptrdiff_t>& offsets, const std::vector<std::vector<double>>& band,
                     const std::vector<double>& stay, const std::vector<double>& v, std::vector<double>& next,
                     std::size_t n) {
  std::ptrdiff_t lo = 0, hi = 0;
  for (auto off : offsets) lo = std::max(lo, off), hi = std::max(hi, -off);  // keep j - off inside [0, n)
  const double* w[D];
  std::ptrdiff_t off[D];
  for (std::size_t d = 0; d < D; ++d) w[d] = band[d].data(), off[d] = offsets[d];
  const auto sn = static_cast<std::ptrdiff_t>(n);
  auto edge = [&](std::ptrdiff_t j) {
    double x = stay[j] * v[j];
    for (std::size_t d = 0; d < D; ++d) {
      const std::ptrdiff_t src = j - off[d];
      if (src >= 0 && src < sn) x += w[d][j] * v[src];
    }
    next[j] = x;
  };
  for (std::ptrdiff_t j = 0; j < std::min(lo, sn); ++j) edge(j);
  for (std::ptrdiff_t j = lo; j < sn - hi; ++j) {
    double x = stay[j] * v[j];
    for (std::size_t d = 0; d < D; ++d) x += w[d][j] * v[j - off[d]];
    next[j] = x;
  }
  for (std::ptrdiff_t j = std::max(lo, sn - hi); j < sn; ++j) edge(j);
}

void band_step(const std::vector<std::ptrdiff_t>& offsets, const std::vector<std::vector<double>>& band,
               const std::vector<double>& stay, const std::vector<double>& v, std::vector<double>& next,
               std::size_t n, std::size_t r) {
  if (r == 1) {
    switch (offsets.size()) {
      case 0: for (std::size_t j = 0; j < n; ++j) next[j] = stay[j] * v[j]; return;
      case 1: band_step_fixed<1>(offsets, band, stay, v, next, n); return;
      case 2: band_step_fixed<2>(offsets, band, stay, v, next, n); return;
      case 3: band_step_fixed<3>(offsets, band, stay, v, next, n); return;
      default: band_step_fixed<4>(offsets, band, stay, v, next, n); return;
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t c = 0; c < r; ++c) next[j * r + c] = stay[j] * v[j * r + c];
  for (std::size_t d = 0; d < offsets.size(); ++d) {
    const std::ptrdiff_t off = offsets[d];
    const std::size_t first = off > 0 ? static_cast<std::size_t>(off) : 0;
    const std::size_t last = off < 0 ? n - static_cast<std::size_t>(-off) : n;
    const double* w = band[d].data();
    for (std::size_t j = first; j < last; ++j) {
      const double* src = &v[(j - static_cast<std::size_t>(off)) * r];
      for (std::size_t c = 0; c < r; ++c) next[j * r + c] += w[j] * src[c];
    }
  }
}

}  // namespace

RowEvolution propagate_rows(const FiniteQMatrix& q, std::span<const State> starts, std::span<const double> times) {
  const std::size_t n = q.size();
  const std::size_t r = starts.size();
  for (double t : times)
    if (!std::isfinite(t) || t < 0.0) throw Error(ErrorCode::NonFiniteInput, "time must be finite and >= 0");
  for (State s : starts)
    if (s >= n) throw Error(ErrorCode::InvalidArgument, "start state " + std::to_string(s) + " outside window");

  RowEvolution out;
  out.starts.assign(starts.begin(), starts.end());
  out.times.assign(times.begin(), times.end());
  out.window = n;
  out.values.assign(times.size(), std::vector<std::vector<double>>(r, std::vector<double>(n, 0.0)));
  out.lost.assign(times.size(), std::vector<double>(r, 0.0));

  // A power-of-two rate makes q_ij / rate and 1 - q_i / rate exact for
  // integer or dyadic rates, so the step matrix has no per-step bias; with
  // ~10^6 steps a rounded coefficient drifts entries by ~1e-10.
  const double max_rate = q.max_rate();
  const double rate = max_rate == 0.0 ? 0.0 : std::exp2(std::ceil(std::log2(max_rate)));
  out.uniformization_rate = rate;

  std::vector<PoissonWindow> windows;
  std::size_t last_step = 0;
  for (double t : times) {
    windows.push_back(poisson_window(rate * t));
    last_step = std::max(last_step, windows.back().right);
  }

  std::vector<double> stay(n, 1.0), kill(n, 0.0);
  if (rate > 0.0)
    for (State i = 0; i < n; ++i) {
      stay[i] = (rate - q.total_rate(i)) / rate;
      kill[i] = q.defect(i) / rate;
    }
  std::vector<State> killing;
  for (State i = 0; i < n; ++i)
    if (kill[i] > 0.0) killing.push_back(i);

  // Narrow bands get a diagonal-by-diagonal gather; everything else goes
  // through incoming-edge lists. Either way one step is v <- v M.
  std::size_t below = 0, above = 0;
  for (State i = 0; i < n; ++i)
    for (const auto& e : q.row(i).entries) {
      if (e.target < i) below = std::max(below, i - e.target);
      else above = std::max(above, e.target - i);
    }
  const bool banded = below + above <= 4;

  // band[d][j]: weight of the edge (j - offset_d) -> j.
  std::vector<std::ptrdiff_t> offsets;
  std::vector<std::vector<double>> band;
  std::vector<std::size_t> in_ptr;
  std::vector<State> in_src;
  std::vector<double> in_w;
  if (banded) {
    for (std::ptrdiff_t d = -static_cast<std::ptrdiff_t>(below); d <= static_cast<std::ptrdiff_t>(above); ++d)
      if (d != 0) offsets.push_back(d);
    band.assign(offsets.size(), std::vector<double>(n, 0.0));
    for (State i = 0; i < n; ++i)
      for (const auto& e : q.row(i).entries) {
        const std::ptrdiff_t d = static_cast<std::ptrdiff_t>(e.target) - static_cast<std::ptrdiff_t>(i);
        const auto it = std::find(offsets.begin(), offsets.end(), d);
        band[static_cast<std::size_t>(it - offsets.begin())][e.target] = e.rate / rate;
      }
  } else {
    in_ptr.assign(n + 1, 0);
    for (State i = 0; i < n; ++i)
      for (const auto& e : q.row(i).entries) ++in_ptr[e.target + 1];
    for (State j = 0; j < n; ++j) in_ptr[j + 1] += in_ptr[j];
    in_src.resize(in_ptr[n]);
    in_w.resize(in_ptr[n]);
    std::vector<std::size_t> fill(in_ptr.begin(), in_ptr.end() - 1);
    for (State i = 0; i < n; ++i)
      for (const auto& e : q.row(i).entries) {
        in_src[fill[e.target]] = i;
        in_w[fill[e.target]++] = e.rate / rate;
      }
  }

  std::vector<double> v(n * r, 0.0), next(n * r, 0.0), cemetery(r, 0.0);
  for (std::size_t c = 0; c < r; ++c) v[starts[c] * r + c] = 1.0;
  std::vector<std::vector<double>> acc(times.size(), std::vector<double>(n * r, 0.0));

  for (std::size_t k = 0;; ++k) {
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      const double w = windows[ti].weight(k);
      if (w == 0.0) continue;
      auto& a = acc[ti];
      for (std::size_t x = 0; x < n * r; ++x) a[x] += w * v[x];
      for (std::size_t c = 0; c < r; ++c) out.lost[ti][c] += w * cemetery[c];
    }
    if (k >= last_step || rate == 0.0) break;
    for (State i : killing)
      for (std::size_t c = 0; c < r; ++c) cemetery[c] += kill[i] * v[i * r + c];
    if (banded) {
      band_step(offsets, band, stay, v, next, n, r);
    } else {
      for (State j = 0; j < n; ++j) {
        double* dst = &next[j * r];
        const double* self = &v[j * r];
        for (std::size_t c = 0; c < r; ++c) dst[c] = stay[j] * self[c];
        for (std::size_t e = in_ptr[j]; e < in_ptr[j + 1]; ++e) {
          const double* src = &v[in_src[e] * r];
          const double w = in_w[e];
          for (std::size_t c = 0; c < r; ++c) dst[c] += w * src[c];
        }
      }
    }
    v.swap(next);
  }
  out.steps = rate == 0.0 ? 0 : last_step;

  for (std::size_t ti = 0; ti < times.size(); ++ti)
    for (std::size_t c = 0; c < r; ++c)
      for (State j = 0; j < n; ++j) out.values[ti][c][j] = std::clamp(acc[ti][j * r + c], 0.0, 1.0);
  return out;
}

namespace {

TransitionKernel finish_kernel(TransitionKernel k) {
  k.row_sums.assign(k.size, 0.0);
  for (State i = 0; i < k.size; ++i) {
    for (State j = 0; j < k.size; ++j) {
      double& p = k.p[i * k.size + j];
      p = std::clamp(p, 0.0, 1.0);
      k.row_sums[i] += p;
    }
  }
  return k;
}

}  // namespace

TransitionKernel transition(const FiniteQMatrix& q, double t) {
  TransitionKernel k;
  k.size = q.size();
  k.time = t;
  k.p.assign(k.size * k.size, 0.0);
  k.lost_mass.assign(k.size, 0.0);
  if (t == 0.0) {
    for (State i = 0; i < k.size; ++i) k.p[i * k.size + i] = 1.0;
    return finish_kernel(std::move(k));
  }
  std::vector<State> all(k.size);
  for (State i = 0; i < k.size; ++i) all[i] = i;
  const double times[] = {t};
  const RowEvolution rows = propagate_rows(q, all, times);
  for (State i = 0; i < k.size; ++i) {
    std::copy(rows.values[0][i].begin(), rows.values[0][i].end(), k.p.begin() + static_cast<std::ptrdiff_t>(i * k.size));
    k.lost_mass[i] = rows.lost[0][i];
  }
  return finish_kernel(std::move(k));
}

TransitionKernel transition_ode(const FiniteQMatrix& q, double t, double tolerance) {
  namespace odeint = boost::numeric::odeint;
  if (!std::isfinite(t) || t < 0.0) throw Error(ErrorCode::NonFiniteInput, "time must be finite and >= 0");
  const std::size_t n = q.size();
  const std::vector<double> gen = q.dense();

  // State: n*n kernel entries followed by the n cemetery entries.
  std::vector<double> state(n * n + n, 0.0);
  for (State i = 0; i < n; ++i) state[i * n + i] = 1.0;
  std::vector<double> defect(n);
  for (State i = 0; i < n; ++i) defect[i] = q.defect(i);

  auto rhs = [&](const std::vector<double>& x, std::vector<double>& dx, double) {
    for (State i = 0; i < n; ++i) {
      double lost = 0.0;
      for (State j = 0; j < n; ++j) {
        double s = 0.0;
        for (State m = 0; m < n; ++m) s += x[i * n + m] * gen[m * n + j];
        dx[i * n + j] = s;
        lost += x[i * n + j] * defect[j];
      }
      dx[n * n + i] = lost;
    }
  };
  if (t > 0.0) {
    auto stepper = odeint::make_controlled(tolerance, tolerance, odeint::runge_kutta_dopri5<std::vector<double>>());
    odeint::integrate_adaptive(stepper, rhs, state, 0.0, t, std::min(t, 1e-3));
  }

  TransitionKernel k;
  k.size = n;
  k.time = t;
  k.method = KernelMethod::OdeCheck;
  k.p.assign(state.begin(), state.begin() + static_cast<std::ptrdiff_t>(n * n));
  k.lost_mass.assign(state.begin() + static_cast<std::ptrdiff_t>(n * n), state.end());
  return finish_kernel(std::move(k));
}

}  // namespace minlab
