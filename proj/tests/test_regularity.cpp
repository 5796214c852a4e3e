#include <gtest/gtest.h>

#include "minlab/error.hpp"
#include "minlab/regularity.hpp"

using namespace minlab;

namespace {

BirthDeathSpec spec(const char* b, const char* a) { return {RateExpression::parse(b), RateExpression::parse(a)}; }
QMatrix bd(const char* b, const char* a) { return make_birth_death(spec(b, a)); }

const QMatrix kQ1 = bd("(i+1)^2", "(i+1)^2");
const QMatrix kQ2 = bd("2*(i+1)^2", "(i+1)^2");

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no minlab::Error thrown";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Deficiency, Q1Regular) {
  auto v = deficiency_test(kQ1);
  EXPECT_EQ(v.verdict, RegularityClass::Regular);
  ASSERT_TRUE(v.deficiency.has_value());
  EXPECT_LT(v.deficiency->z.back()[0], 1e-6);
}

TEST(Deficiency, Q2Nonregular) {
  auto v = deficiency_test(kQ2);
  EXPECT_EQ(v.verdict, RegularityClass::NonregularNumerical);
  EXPECT_NEAR(v.deficiency->estimates[0], 0.296, 5e-3);
}

TEST(Deficiency, ZeroMatrix) {
  auto v = deficiency_test(QMatrix::zero());
  EXPECT_TRUE(v.regular());
  for (const auto& row : v.deficiency->z)
    for (double z : row) EXPECT_EQ(z, 0.0);
}

TEST(Deficiency, NonincreasingInLevel) {
  DeficiencyConfig c;
  c.probes = {0, 2, 5};
  c.schedule = LevelSchedule::geometric(8, 2, 8);
  for (const QMatrix* q : {&kQ1, &kQ2}) {
    auto v = deficiency_test(*q, c);
    const auto& z = v.deficiency->z;
    for (std::size_t l = 1; l < z.size(); ++l)
      for (std::size_t p = 0; p < c.probes.size(); ++p) EXPECT_LE(z[l][p], z[l - 1][p] + 1e-12);
  }
}

TEST(Deficiency, IncreasingInStateForQ2) {
  DeficiencyConfig c;
  c.probes = {0, 1, 2, 3, 4, 5};
  auto v = deficiency_test(kQ2, c);
  ASSERT_EQ(v.verdict, RegularityClass::NonregularNumerical);
  for (std::size_t p = 1; p < 6; ++p) EXPECT_GT(v.deficiency->estimates[p] - v.deficiency->estimates[p - 1], 1e-6);
}

TEST(Deficiency, LambdaSpotCheck) {
  for (double lambda : {0.5, 2.0}) {
    DeficiencyConfig c;
    c.lambda = lambda;
    EXPECT_EQ(deficiency_test(kQ1, c).verdict, RegularityClass::Regular) << lambda;
    EXPECT_EQ(deficiency_test(kQ2, c).verdict, RegularityClass::NonregularNumerical) << lambda;
  }
  DeficiencyConfig bad;
  bad.lambda = 0.0;
  EXPECT_EQ(code_of([&] { deficiency_test(kQ1, bad); }), ErrorCode::BadLambda);
}

TEST(Lyapunov, LinearSymmetricZeroDrift) {
  auto v = lyapunov_test(bd("i", "i"), RateExpression::parse("i"), 0.0, 500);
  EXPECT_TRUE(v.regular());
  ASSERT_TRUE(v.lyapunov.has_value());
  for (double d : v.lyapunov->drift) EXPECT_EQ(d, 0.0);
  for (double m : v.lyapunov->margin) EXPECT_EQ(m, 0.0);
}

TEST(Lyapunov, PoissonUnitDrift) {
  auto v = lyapunov_test(bd("1", "0"), RateExpression::parse("i"), 1.0, 500);
  EXPECT_TRUE(v.regular());
  for (std::size_t i = 0; i < v.lyapunov->drift.size(); ++i) {
    EXPECT_NEAR(v.lyapunov->drift[i], 1.0, 1e-12);
    EXPECT_NEAR(v.lyapunov->margin[i], static_cast<double>(i), 1e-12);
  }
}

TEST(Lyapunov, Q2InvalidCertificate) {
  auto v = lyapunov_test(kQ2, RateExpression::parse("i"), 10.0, 500);
  EXPECT_EQ(v.verdict, RegularityClass::Indeterminate);
  ASSERT_TRUE(v.lyapunov->first_violation.has_value());
  // drift (i+1)^2 exceeds 10 (1 + i) first at i = 10
  EXPECT_EQ(*v.lyapunov->first_violation, 10u);
}

TEST(Lyapunov, GrowthFloorAndErrors) {
  auto flat = lyapunov_test(bd("1", "0"), [](State) { return 1.0; }, 1.0, 100, 1.0, "1");
  EXPECT_FALSE(flat.lyapunov->growth_ok);
  EXPECT_FALSE(flat.regular());
  EXPECT_EQ(code_of([] { lyapunov_test(bd("1", "0"), RateExpression::parse("i-5"), 1.0, 10); }),
            ErrorCode::NegativePhi);
  QMatrix kill = QMatrix::from_rows({Row{{}, 1.0}});
  EXPECT_EQ(code_of([&] { lyapunov_test(kill, RateExpression::parse("i"), 1.0, 3); }),
            ErrorCode::NotConservative);
}

TEST(Series, Examples) {
  EXPECT_TRUE(birth_death_series(spec("(i+1)^2", "(i+1)^2")).regular());
  EXPECT_EQ(birth_death_series(spec("2*(i+1)^2", "(i+1)^2")).verdict, RegularityClass::NonregularNumerical);
  auto harmonic = birth_death_series(spec("i+1", "0"));
  EXPECT_TRUE(harmonic.regular());
  ASSERT_TRUE(harmonic.series.has_value());
  EXPECT_FALSE(harmonic.series->checkpoints.empty());
  EXPECT_EQ(code_of([] { birth_death_series(spec("i", "1")); }), ErrorCode::ZeroBirthRate);
}

TEST(Series, AgreesWithDeficiency) {
  const char* families[][2] = {{"0.5*(i+1)", "i+1"},   {"i+1", "i+1"},          {"2*(i+1)", "i+1"},
                               {"0.5*(i+1)^2", "(i+1)^2"}, {"(i+1)^2", "(i+1)^2"}, {"2*(i+1)^2", "(i+1)^2"},
                               {"(i+1)^2", "0"},       {"1", "1"},              {"2", "1"},
                               {"(i+1)^2", "2*(i+1)^2"}};
  for (auto& f : families) {
    auto s = birth_death_series(spec(f[0], f[1]));
    auto d = deficiency_test(bd(f[0], f[1]));
    EXPECT_NE(s.verdict, RegularityClass::Indeterminate) << f[0] << " / " << f[1];
    EXPECT_EQ(s.verdict, d.verdict) << f[0] << " / " << f[1];
  }
}

TEST(Comparison, BoundedBelowLinear) {
  QMatrix linear = bd("i+1", "1");
  auto evidence = lyapunov_test(linear, RateExpression::parse("i"), 1.0, 1000);
  ASSERT_TRUE(evidence.regular());
  auto v = regularity_by_comparison(bd("1", "1"), linear, evidence, 20);
  EXPECT_TRUE(v.regular());
  EXPECT_EQ(v.method, RegularityMethod::Comparison);
}

TEST(Comparison, Reflexive) {
  auto evidence = deficiency_test(kQ1);
  EXPECT_TRUE(regularity_by_comparison(kQ1, kQ1, evidence, 20).regular());
}

TEST(Comparison, RefusesWithoutRegularEvidence) {
  auto evidence = deficiency_test(kQ2);
  EXPECT_EQ(code_of([&] { regularity_by_comparison(kQ1, kQ2, evidence, 20); }), ErrorCode::PreconditionFailed);
}

TEST(TruncatedComparison, CounterexamplePair) {
  auto c = truncated_comparison_probe(kQ1, kQ2, 16, {1.0});
  EXPECT_TRUE(c.all_ordered);
  EXPECT_LE(c.max_localization_gap, 1e-9);
  EXPECT_EQ(c.rows.size(), 16u);
}

TEST(TruncatedComparison, SelfGivesEqualRows) {
  auto c = truncated_comparison_probe(kQ1, kQ1, 16, {0.5, 2.0});
  for (const auto& r : c.rows) EXPECT_EQ(r.tail1, r.tail2);
  EXPECT_TRUE(c.all_ordered);
}

TEST(TruncatedComparison, NeedsDominance) {
  EXPECT_EQ(code_of([] { truncated_comparison_probe(kQ2, kQ1, 8, {1.0}); }), ErrorCode::PreconditionFailed);
}
