#include "minlab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minlab/dominance.hpp"
#include "minlab/error.hpp"
#include "minlab/resolvent.hpp"
#include "minlab/truncation.hpp"
#include "minlab/uniformization.hpp"

namespace minlab {

std::string_view to_string(RegularityClass c) noexcept {
  switch (c) {
    case RegularityClass::Regular: return "regular-certified-up-to-tol";
    case RegularityClass::NonregularNumerical: return "nonregular-numerical";
    case RegularityClass::Indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

std::string_view to_string(RegularityMethod m) noexcept {
  switch (m) {
    case RegularityMethod::Deficiency: return "deficiency";
    case RegularityMethod::Lyapunov: return "lyapunov";
    case RegularityMethod::BirthDeathSeries: return "birth-death-series";
    case RegularityMethod::Comparison: return "comparison";
  }
  return "deficiency";
}

RegularityVerdict deficiency_test(const QMatrix& q, const DeficiencyConfig& config) {
  if (!(config.lambda > 0.0) || !std::isfinite(config.lambda))
    throw Error(ErrorCode::BadLambda, "lambda must be finite and > 0");
  if (config.probes.empty()) throw Error(ErrorCode::InvalidArgument, "no probe states");
  if (!(config.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be > 0");

  RegularityVerdict out;
  out.method = RegularityMethod::Deficiency;
  DeficiencyEvidence ev;
  ev.lambda = config.lambda;
  ev.probes = config.probes;
  const std::size_t np = config.probes.size();
  ev.estimates.assign(np, 1.0);
  ev.stabilized.assign(np, false);
  const State needed = *std::max_element(config.probes.begin(), config.probes.end());

  for (State n : config.schedule.levels()) {
    if (n < needed) continue;
    const std::vector<double> z = deficiency_vector(truncate_zero(q, n), config.lambda);
    std::vector<double> row(np);
    for (std::size_t p = 0; p < np; ++p) row[p] = std::clamp(z[config.probes[p]], 0.0, 1.0);
    if (!ev.z.empty())
      for (std::size_t p = 0; p < np; ++p)
        if (row[p] > ev.z.back()[p] + 1e-12)
          throw Error(ErrorCode::MonotonicityViolation, "deficiency at state " + std::to_string(config.probes[p]) +
                                                            " rose between levels at n = " + std::to_string(n));
    ev.levels.push_back(n);
    ev.z.push_back(row);

    if (std::all_of(row.begin(), row.end(), [&](double v) { return v < config.tol; })) {
      ev.estimates = row;
      ev.stabilized.assign(np, true);
      out.verdict = RegularityClass::Regular;
      break;
    }
    bool all_settled = true;
    for (std::size_t p = 0; p < np; ++p) {
      std::vector<double> trace;
      for (const auto& r : ev.z) trace.push_back(r[p]);
      const Stabilization st = analyze_levels(trace, config.tol);
      ev.estimates[p] = st.fired() ? st.extrapolated : trace.back();
      const double gap = st.extrapolated - 10.0 * config.tol;
      ev.stabilized[p] = gap > 0.0 && st.settles(gap);
      all_settled = all_settled && ev.stabilized[p];
    }
    if (all_settled) {
      out.verdict = RegularityClass::NonregularNumerical;
      out.flags.push_back("numerical-limit");
      break;
    }
  }
  if (ev.levels.empty()) throw Error(ErrorCode::InvalidArgument, "schedule never reaches the probe states");
  out.deficiency = std::move(ev);
  return out;
}

RegularityVerdict lyapunov_test(const QMatrix& q, const std::function<double(State)>& phi, double c, State probe_max,
                                double growth_floor, std::string phi_source) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, "c must be finite and >= 0");
  LyapunovCertificate cert;
  cert.phi_source = std::move(phi_source);
  cert.c = c;
  cert.probe_max = probe_max;
  cert.growth_floor = growth_floor;

  // phi is needed one step past the probe range for the drift of the last rows
  auto phi_at = [&](State j) {
    const double v = phi(j);
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteInput, "phi(" + std::to_string(j) + ") is not finite");
    if (v < 0.0) throw Error(ErrorCode::NegativePhi, "phi(" + std::to_string(j) + ") < 0");
    return v;
  };
  for (State i = 0; i <= probe_max; ++i) {
    const Row row = q.row(i);
    if (row.defect() > kConservativeTol)
      throw Error(ErrorCode::NotConservative, "row " + std::to_string(i) + " is not conservative");
    const double pi = phi_at(i);
    double drift = 0.0;
    for (const auto& e : row.entries) drift += e.rate * (phi_at(e.target) - pi);
    cert.phi.push_back(pi);
    cert.drift.push_back(drift);
    cert.margin.push_back(c * (1.0 + pi) - drift);
    if (cert.margin.back() < -1e-10 && !cert.first_violation) cert.first_violation = i;
    if (i > 0 && pi < cert.phi[i - 1]) cert.nondecreasing = false;
  }
  cert.growth_ok = cert.phi.back() > cert.phi.front() + growth_floor;
  cert.valid = !cert.first_violation && cert.nondecreasing && cert.growth_ok;

  RegularityVerdict out;
  out.method = RegularityMethod::Lyapunov;
  out.verdict = cert.valid ? RegularityClass::Regular : RegularityClass::Indeterminate;
  if (!cert.growth_ok) out.flags.push_back("phi-growth-not-shown");
  if (!cert.nondecreasing) out.flags.push_back("phi-not-monotone");
  if (cert.first_violation) out.flags.push_back("drift-violated");
  out.lyapunov = std::move(cert);
  return out;
}

RegularityVerdict lyapunov_test(const QMatrix& q, const RateExpression& phi, double c, State probe_max,
                                double growth_floor) {
  return lyapunov_test(
      q, [&phi](State i) { return phi(i); }, c, probe_max, growth_floor, phi.source());
}

namespace {

// log(exp(a) + exp(b))
double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace

RegularityVerdict birth_death_series(const BirthDeathSpec& spec, const SeriesConfig& config) {
  // With S_n = sum_{k<=n} pi_k / pi_n the n-th term is S_n / b_n and
  // S_n = 1 + S_{n-1} a_n / b_{n-1}.
  RegularityVerdict out;
  out.method = RegularityMethod::BirthDeathSeries;
  SeriesEvidence ev;
  const double log_threshold = std::log(config.divergence_threshold);

  double log_s = 0.0;
  double log_total = -std::numeric_limits<double>::infinity();
  double prev_b = 0.0;
  std::size_t next_checkpoint = 1;
  for (State n = 0; n < config.max_terms; ++n) {
    const double b = spec.birth_rate(n);
    if (!std::isfinite(b)) throw Error(ErrorCode::NonFiniteInput, "birth rate not finite at " + std::to_string(n));
    if (!(b > 0.0)) throw Error(ErrorCode::ZeroBirthRate, "birth rate must be > 0 at " + std::to_string(n));
    if (n > 0) {
      const double a = spec.death_rate(n);
      if (a < 0.0 || !std::isfinite(a)) throw Error(ErrorCode::NegativeRate, "bad death rate at " + std::to_string(n));
      log_s = a == 0.0 ? 0.0 : log_add(0.0, log_s + std::log(a) - std::log(prev_b));
    }
    prev_b = b;
    log_total = log_add(log_total, log_s - std::log(b));
    ev.terms = n + 1;

    if (n + 1 != next_checkpoint) continue;
    next_checkpoint *= 2;
    ev.checkpoints.push_back(n + 1);
    ev.log_partial.push_back(log_total);
    const std::size_t c = ev.log_partial.size();
    if (c < 4 || n + 1 < 64) continue;

    // Increments over the last three doublings, scaled by the current total
    // so huge sums stay finite.
    const double scale = log_total;
    const double p3 = 1.0, p2 = std::exp(ev.log_partial[c - 2] - scale), p1 = std::exp(ev.log_partial[c - 3] - scale),
                 p0 = std::exp(ev.log_partial[c - 4] - scale);
    const double d2 = p3 - p2, d1 = p2 - p1, d0 = p1 - p0;
    if (log_total > log_threshold && d2 > 0.01) {
      out.verdict = RegularityClass::Regular;
      break;
    }
    if (d0 > 0.0 && d1 > 0.0 && d1 / d0 >= 0.95 && d2 / d1 >= 0.95 && d2 > 0.01) {
      out.verdict = RegularityClass::Regular;
      out.flags.push_back("sustained-growth");
      break;
    }
    if (d0 > 0.0 && d1 > 0.0) {
      const double rho = std::max(d1 / d0, d2 / d1);
      if (rho <= 0.75 && d2 * rho / (1.0 - rho) < 1e-4) {
        out.verdict = RegularityClass::NonregularNumerical;
        out.flags.push_back("numerical-limit");
        break;
      }
    } else if (d2 == 0.0 && d1 == 0.0) {
      out.verdict = RegularityClass::NonregularNumerical;
      out.flags.push_back("numerical-limit");
      break;
    }
  }
  ev.total = std::exp(log_total);
  out.series = std::move(ev);
  return out;
}

RegularityVerdict regularity_by_comparison(const QMatrix& q1, const QMatrix& q2, const RegularityVerdict& q2_evidence,
                                           State m_max, const DeficiencyConfig& spot_check) {
  if (!is_conservative(q1, m_max) || !is_conservative(q2, m_max))
    throw Error(ErrorCode::NotConservative, "comparison needs conservative rows 0.." + std::to_string(m_max));
  if (!q2_evidence.regular())
    throw Error(ErrorCode::PreconditionFailed, "no regularity evidence for the dominating matrix");
  const DominanceReport dom = generator_dominance(q1, q2, m_max);
  if (dom.verdict != Verdict::Holds)
    throw Error(ErrorCode::PreconditionFailed, "generator dominance does not hold on rows 0.." + std::to_string(m_max));

  RegularityVerdict out;
  out.method = RegularityMethod::Comparison;
  out.verdict = RegularityClass::Regular;
  RegularityVerdict check = deficiency_test(q1, spot_check);
  if (check.verdict == RegularityClass::NonregularNumerical) out.flags.push_back("spot-check-contradicts");
  else if (check.verdict == RegularityClass::Regular) out.flags.push_back("spot-check-regular");
  else out.flags.push_back("spot-check-indeterminate");
  out.deficiency = std::move(check.deficiency);
  return out;
}

TruncatedComparison truncated_comparison_probe(const QMatrix& q1, const QMatrix& q2, State n,
                                               const std::vector<double>& times) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "level must be >= 1");
  if (generator_dominance(q1, q2, n).verdict != Verdict::Holds)
    throw Error(ErrorCode::PreconditionFailed, "generator dominance fails on rows 0.." + std::to_string(n));

  std::vector<State> starts(n);
  for (State i = 0; i < n; ++i) starts[i] = i;
  std::vector<State> kept = starts;

  const RowEvolution a1 = propagate_rows(truncate_absorb(q1, n), starts, times);
  const RowEvolution a2 = propagate_rows(truncate_absorb(q2, n), starts, times);
  const RowEvolution m1 = propagate_rows(truncate_mask(q1, kept, n), starts, times);
  const RowEvolution m2 = propagate_rows(truncate_mask(q2, kept, n), starts, times);

  auto head = [n](const RowEvolution& e, std::size_t t, std::size_t s) {
    double h = 0.0;
    for (State j = 0; j < n && j < e.window; ++j) h += e.values[t][s][j];
    return h;
  };
  auto tail = [n](const RowEvolution& e, std::size_t t, std::size_t s) {
    double h = 0.0;
    for (State j = n; j < e.window; ++j) h += e.values[t][s][j];
    return h;
  };

  TruncatedComparison out;
  out.n = n;
  out.all_ordered = true;
  for (std::size_t t = 0; t < times.size(); ++t)
    for (State i = 0; i < n; ++i) {
      TruncatedComparisonRow r;
      r.t = times[t];
      r.i = i;
      r.tail1 = tail(a1, t, i);
      r.tail2 = tail(a2, t, i);
      r.ordered = r.tail1 <= r.tail2 + 1e-12;
      r.head_absorb1 = head(a1, t, i);
      r.head_mask1 = head(m1, t, i);
      r.head_absorb2 = head(a2, t, i);
      r.head_mask2 = head(m2, t, i);
      r.localization_gap =
          std::max(std::abs(r.head_absorb1 - r.head_mask1), std::abs(r.head_absorb2 - r.head_mask2));
      out.all_ordered = out.all_ordered && r.ordered;
      out.max_localization_gap = std::max(out.max_localization_gap, r.localization_gap);
      out.rows.push_back(r);
    }
  return out;
}

}  // namespace minlab
