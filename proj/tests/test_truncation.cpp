#include <gtest/gtest.h>

#include "minlab/error.hpp"
#include "minlab/truncation.hpp"

using namespace minlab;

namespace {

QMatrix bd(const char* b, const char* a) {
  return make_birth_death({RateExpression::parse(b), RateExpression::parse(a)});
}

const QMatrix kQ1 = bd("(i+1)^2", "(i+1)^2");

}  // namespace

TEST(Truncation, ZeroScheme) {
  auto f = truncate_zero(kQ1, 5);
  EXPECT_EQ(f.size(), 6u);
  EXPECT_FALSE(f.is_conservative());
  EXPECT_DOUBLE_EQ(f.defect(5), 36.0);
  for (State i = 0; i < 5; ++i) EXPECT_NEAR(f.defect(i), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(f.entry(2, 3), 9.0);

  auto z = truncate_zero(QMatrix::zero(), 7);
  EXPECT_EQ(z.nonzeros(), 0u);
  EXPECT_EQ(z.max_rate(), 0.0);
}

TEST(Truncation, AbsorbScheme) {
  auto f = truncate_absorb(kQ1, 5);
  EXPECT_EQ(f.size(), 6u);
  for (State i = 0; i < 5; ++i) EXPECT_NEAR(f.defect(i), 0.0, 1e-12);
  EXPECT_EQ(f.total_rate(5), 0.0);
  EXPECT_DOUBLE_EQ(f.entry(4, 5), 25.0);

  // pure death: nothing to lump, so only the absorbing row n differs
  QMatrix death = bd("0", "i");
  auto absorb = truncate_absorb(death, 6);
  auto zero = truncate_zero(death, 6);
  for (State i = 0; i < 6; ++i)
    for (State j = 0; j <= 6; ++j) EXPECT_EQ(absorb.entry(i, j), zero.entry(i, j));
  EXPECT_EQ(absorb.total_rate(6), 0.0);
}

TEST(Truncation, MaskScheme) {
  auto f = truncate_mask(kQ1, window_states(4));
  EXPECT_TRUE(f.is_conservative());
  EXPECT_DOUBLE_EQ(f.entry(4, 5), 25.0);
  EXPECT_EQ(f.total_rate(5), 0.0);
  EXPECT_EQ(truncate_mask(kQ1, {}).nonzeros(), 0u);

  auto sparse = truncate_mask(kQ1, {3, 0});
  EXPECT_EQ(sparse.total_rate(1), 0.0);
  EXPECT_DOUBLE_EQ(sparse.total_rate(3), 32.0);
}

TEST(Truncation, StopScheme) {
  auto f = truncate_stop(kQ1, 4, 10);
  EXPECT_TRUE(f.is_conservative());
  for (State i = 5; i < f.size(); ++i) EXPECT_DOUBLE_EQ(f.total_rate(i), f.total_rate(4)) << i;

  QMatrix absorbing_at_3 = QMatrix::from_rows({Row{{{1, 1.0}}, 1.0}, Row{{{2, 1.0}}, 1.0}, Row{{{3, 1.0}}, 1.0}});
  auto g = truncate_stop(absorbing_at_3, 3, 6);
  for (State i = 3; i < g.size(); ++i) EXPECT_EQ(g.total_rate(i), 0.0);
  EXPECT_THROW(truncate_stop(kQ1, 4, 2), Error);
}

TEST(Truncation, GeneralScheme) {
  EXPECT_TRUE(equivalent(truncate_general(kQ1, 6, zero_boundary()), truncate_zero(kQ1, 6)));
  EXPECT_TRUE(equivalent(truncate_general(kQ1, 5, lump_boundary()), truncate_absorb(kQ1, 6)));
  BoundaryOracle negative = [](State, const Row&, State last) {
    return std::vector<Transition>{{last + 1, -1.0}};
  };
  try {
    truncate_general(kQ1, 5, negative);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BoundaryViolation);
  }
}

TEST(Truncation, SchemeNames) {
  for (Scheme s : {Scheme::ZeroOutside, Scheme::AbsorbBoundary, Scheme::MaskRows, Scheme::StopRows,
                   Scheme::GeneralBoundary})
    EXPECT_EQ(scheme_from_string(to_string(s)), s);
  EXPECT_THROW(scheme_from_string("nope"), Error);
}

TEST(Truncation, StatesWithRateAtMost) {
  auto s = states_with_rate_at_most(kQ1, 20.0, 100);
  EXPECT_EQ(s, (std::vector<State>{0, 1, 2}));  // q_i = 2 (i+1)^2
}
