#include <gtest/gtest.h>

#include <random>

#include "minlab/dominance.hpp"
#include "minlab/error.hpp"

using namespace minlab;

namespace {

QMatrix bd(const std::string& b, const std::string& a) {
  return make_birth_death({RateExpression::parse(b), RateExpression::parse(a)});
}

const QMatrix kQ1 = bd("(i+1)^2", "(i+1)^2");
const QMatrix kQ2 = bd("2*(i+1)^2", "(i+1)^2");

// sum_{j >= k} q_ij with the diagonal -q_i, straight from the rows.
double tail_sum(const QMatrix& q, State i, State k) {
  Row r = q.row(i);
  double s = k <= i ? -r.total_rate : 0.0;
  for (const auto& e : r.entries)
    if (e.target >= k) s += e.rate;
  return s;
}

bool brute_dominance(const QMatrix& q1, const QMatrix& q2, State m_max) {
  for (State m = 0; m <= m_max; ++m)
    for (State i = 0; i <= m; ++i) {
      std::vector<State> ks;
      for (State k = 0; k <= i; ++k) ks.push_back(k);
      for (State k = m + 1; k <= m + 3; ++k) ks.push_back(k);
      for (State k : ks)
        if (tail_sum(q1, i, k) > tail_sum(q2, m, k) + 1e-12 * (1.0 + std::abs(tail_sum(q2, m, k)))) return false;
    }
  return true;
}

DominanceConfig small_grid() {
  DominanceConfig c;
  c.m_max = 3;
  c.k_max = 6;
  c.times = {0.5, 1.0};
  return c;
}

}  // namespace

TEST(GeneratorDominance, CounterexamplePairHolds) {
  auto r = generator_dominance(kQ1, kQ2, 50);
  EXPECT_EQ(r.verdict, Verdict::Holds);
  EXPECT_EQ(r.reduction, Reduction::Conservative);
  EXPECT_TRUE(r.family_certified);
  EXPECT_TRUE(conservative_reduction_check(kQ1, kQ2, 50));
}

TEST(GeneratorDominance, Reflexive) {
  EXPECT_EQ(generator_dominance(kQ1, kQ1, 30).verdict, Verdict::Holds);
  EXPECT_TRUE(conservative_reduction_check(kQ1, kQ1, 30));
}

TEST(GeneratorDominance, SwappedPairFails) {
  auto r = generator_dominance(kQ2, kQ1, 50);
  ASSERT_EQ(r.verdict, Verdict::Fails);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->i, r.witness->m);
  EXPECT_EQ(r.witness->k, r.witness->m + 1);
  EXPECT_EQ(r.witness->i, 0u);
  EXPECT_GT(r.witness->separation(), 0.0);
}

TEST(GeneratorDominance, NonConservativeUsesFullForm) {
  QMatrix kill = QMatrix::from_rows({Row{{{1, 1.0}}, 2.0}, Row{{{0, 1.0}}, 1.0}});
  auto r = generator_dominance(kill, kill, 1);
  EXPECT_EQ(r.reduction, Reduction::Full);
  EXPECT_THROW(conservative_reduction_check(kill, kill, 1), Error);
}

TEST(GeneratorDominance, RandomPairsAgreeWithBruteForce) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coef(0, 3);
  int holds = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto poly = [&] {
      return std::to_string(coef(rng)) + "+" + std::to_string(coef(rng)) + "*i";
    };
    auto lift = [&](std::string p) { return "1+" + p; };  // keep birth rates positive
    QMatrix a = bd(lift(poly()), poly());
    QMatrix b = bd(lift(poly()), poly());
    const bool reduced = conservative_reduction_check(a, b, 20);
    const auto full = generator_dominance(a, b, 20);
    EXPECT_EQ(reduced, full.verdict == Verdict::Holds) << trial;
    EXPECT_EQ(brute_dominance(a, b, 20), full.verdict == Verdict::Holds) << trial;
    holds += reduced;
  }
  EXPECT_GT(holds, 5);
  EXPECT_LT(holds, 95);
}

TEST(ProcessDominance, CounterexampleFailsAtOrigin) {
  DominanceConfig c;
  c.m_max = 0;
  c.k_max = 0;
  c.times = {1.0};
  auto r = process_dominance(kQ1, kQ2, c);
  ASSERT_EQ(r.verdict, Verdict::Fails);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_EQ(r.witness->i, 0u);
  EXPECT_EQ(r.witness->m, 0u);
  EXPECT_EQ(r.witness->k, 0u);
  EXPECT_EQ(r.witness->t, 1.0);
  EXPECT_GT(r.witness->left.lo, r.witness->right.hi + 1e-6);
}

TEST(ProcessDominance, TwoStateSelf) {
  QMatrix two = QMatrix::from_rows({Row{{{1, 1.0}}, 1.0}, Row{{{0, 1.0}}, 1.0}});
  EXPECT_EQ(is_monotone_process(two, small_grid()).verdict, Verdict::Holds);
}

TEST(ProcessDominance, BoundedPairHolds) {
  auto r = process_dominance(bd("1", "1"), bd("2", "1"), small_grid());
  EXPECT_EQ(r.verdict, Verdict::Holds);
  EXPECT_EQ(r.undecided, 0u);
}

TEST(ProcessDominance, PoissonMonotone) {
  EXPECT_EQ(is_monotone_process(bd("1", "0"), small_grid()).verdict, Verdict::Holds);
}

TEST(ProcessDominance, Q2NotMonotone) {
  EXPECT_EQ(is_monotone_process(kQ2, small_grid()).verdict, Verdict::Fails);
}

TEST(Bounded, Detection) {
  EXPECT_TRUE(is_bounded(bd("1", "2")));
  EXPECT_FALSE(is_bounded(kQ1));
  EXPECT_TRUE(is_bounded(QMatrix::from_rows({Row{{{1, 1.0}}, 1.0}, Row{}})));
}

TEST(Kirstein, BoundedPairPredictsHolds) {
  KirsteinConfig c;
  c.dominance = small_grid();
  auto r = kirstein_transfer(bd("1", "1"), bd("2", "1"), c);
  EXPECT_TRUE(r.bounded);
  EXPECT_EQ(r.predicted, Prediction::Holds);
  EXPECT_EQ(r.process.verdict, Verdict::Holds);
  EXPECT_TRUE(r.confirmed);
}

TEST(Kirstein, ViolatingPairFailsBothWays) {
  KirsteinConfig c;
  c.dominance = small_grid();
  auto r = kirstein_transfer(bd("2", "1"), bd("1", "1"), c);
  EXPECT_EQ(r.generator.verdict, Verdict::Fails);
  EXPECT_EQ(r.predicted, Prediction::Fails);
  EXPECT_EQ(r.process.verdict, Verdict::Fails);
  EXPECT_TRUE(r.process.witness.has_value());
  EXPECT_TRUE(r.confirmed);
}

TEST(Kirstein, CounterexampleDocumentsGap) {
  KirsteinConfig c;
  c.dominance.m_max = 0;
  c.dominance.k_max = 0;
  c.dominance.times = {1.0};
  auto r = kirstein_transfer(kQ1, kQ2, c);
  EXPECT_EQ(r.generator.verdict, Verdict::Holds);
  EXPECT_EQ(r.predicted, Prediction::None);
  ASSERT_TRUE(r.q2_regularity.has_value());
  EXPECT_EQ(r.q2_regularity->verdict, RegularityClass::NonregularNumerical);
  EXPECT_EQ(r.process.verdict, Verdict::Fails);
  EXPECT_NE(std::find(r.flags.begin(), r.flags.end(), "generator-holds-process-fails"), r.flags.end());
}

TEST(SingleBirth, Poisson) {
  auto r = single_birth_monotonicity(bd("1", "0"), small_grid());
  EXPECT_EQ(r.monotone.verdict, Verdict::Holds);
  EXPECT_TRUE(r.unique.regular());
  EXPECT_EQ(r.self_generator.verdict, Verdict::Holds);
  EXPECT_TRUE(r.consistent);
}

TEST(SingleBirth, Q2NotUniqueNotMonotone) {
  auto r = single_birth_monotonicity(kQ2, small_grid());
  EXPECT_FALSE(r.unique.regular());
  EXPECT_EQ(r.monotone.verdict, Verdict::Fails);
  EXPECT_TRUE(r.consistent);
}

TEST(SingleBirth, BirthOneDeathTwo) {
  auto r = single_birth_monotonicity(bd("1", "2"), small_grid());
  EXPECT_TRUE(r.unique.regular());
  EXPECT_TRUE(r.consistent);
  EXPECT_EQ(r.monotone.verdict == Verdict::Holds, r.self_generator.verdict == Verdict::Holds);
}

TEST(SingleBirth, RejectsLongJumps) {
  QMatrix jump = QMatrix::from_rows({Row{{{2, 1.0}}, 1.0}, Row{}, Row{}});
  try {
    single_birth_monotonicity(jump, small_grid());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSingleBirth);
  }
}
