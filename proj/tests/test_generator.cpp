#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "minlab/error.hpp"
#include "minlab/expression.hpp"
#include "minlab/generator.hpp"
#include "minlab/spec_io.hpp"

using namespace minlab;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no minlab::Error thrown";
  return ErrorCode::InvalidArgument;
}

QMatrix bd(const char* b, const char* a) {
  return make_birth_death({RateExpression::parse(b), RateExpression::parse(a)});
}

}  // namespace

TEST(Expression, PolynomialForms) {
  auto e = RateExpression::parse("alpha*(i+1)^2", {{"alpha", 2.0}});
  EXPECT_EQ(e.polynomial().degree(), 2);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_DOUBLE_EQ(e(i), 2.0 * (i + 1.0) * (i + 1.0));
  EXPECT_DOUBLE_EQ(RateExpression::parse(" 3 ")(7), 3.0);
  EXPECT_DOUBLE_EQ(RateExpression::parse("(i+1)/2")(3), 2.0);
  EXPECT_DOUBLE_EQ(RateExpression::parse("-i + 2*i")(5), 5.0);
  EXPECT_DOUBLE_EQ(RateExpression::parse("1e-3*i")(1000), 1.0);
  EXPECT_TRUE(RateExpression::parse("2^3").is_constant());
}

TEST(Expression, Rejects) {
  for (const char* bad : {"", "i+", "(i+1", "i/i", "beta*i", "i^i", "2 3", "i^-1"})
    EXPECT_EQ(code_of([&] { RateExpression::parse(bad); }), ErrorCode::MalformedExpression) << bad;
}

TEST(Polynomial, NonnegativeFrom) {
  Polynomial p({-4.0, 0.0, 1.0});  // x^2 - 4
  EXPECT_FALSE(p.nonnegative_from(0));
  EXPECT_TRUE(p.nonnegative_from(2));
  EXPECT_DOUBLE_EQ(p.shifted(2.0)(0.0), 0.0);
  EXPECT_EQ((p * p).degree(), 4);
  EXPECT_DOUBLE_EQ(Polynomial::identity().pow(3)(2.0), 8.0);
}

TEST(Generator, BirthDeathRows) {
  QMatrix q1 = bd("(i+1)^2", "(i+1)^2");
  EXPECT_EQ(q1.family(), Family::BirthDeath);
  EXPECT_TRUE(is_conservative(q1, 100));
  Row r0 = q1.row(0);
  ASSERT_EQ(r0.entries.size(), 1u);
  EXPECT_DOUBLE_EQ(r0.total_rate, 1.0);
  EXPECT_DOUBLE_EQ(q1.rate(3, 4), 16.0);
  EXPECT_DOUBLE_EQ(q1.rate(3, 2), 16.0);
  EXPECT_DOUBLE_EQ(q1.total_rate(3), 32.0);

  QMatrix q2 = bd("2*(i+1)^2", "(i+1)^2");
  EXPECT_DOUBLE_EQ(q2.rate(3, 4), 32.0);
  EXPECT_TRUE(is_single_birth(q2, 50));

  QMatrix poisson = bd("1", "0");
  EXPECT_DOUBLE_EQ(poisson.rate(5, 6), 1.0);
  EXPECT_DOUBLE_EQ(poisson.rate(5, 4), 0.0);
}

TEST(Generator, ZeroAndKilling) {
  QMatrix z = QMatrix::zero();
  EXPECT_TRUE(is_conservative(z, 20));
  for (const auto& d : validate(z, 20)) EXPECT_EQ(d.defect, 0.0);

  QMatrix kill = QMatrix::from_rows({Row{{}, 1.0}});
  EXPECT_FALSE(is_conservative(kill, 0));
  EXPECT_DOUBLE_EQ(kill.defect(0).defect, 1.0);
  EXPECT_EQ(kill.explicit_rows(), std::optional<State>(1));
  EXPECT_DOUBLE_EQ(kill.total_rate(5), 0.0);
}

TEST(Generator, SingleBirth) {
  EXPECT_FALSE(is_single_birth(bd("0", "i"), 10));
  QMatrix jump2 = QMatrix::from_rows({Row{{{2, 1.0}}, 1.0}, Row{}, Row{}});
  EXPECT_FALSE(is_single_birth(jump2, 2));
}

TEST(Generator, RowValidation) {
  EXPECT_EQ(code_of([] { QMatrix::from_rows({Row{{{1, -1.0}}, 0.0}, Row{}}).row(0); }), ErrorCode::NegativeRate);
  EXPECT_EQ(code_of([] { QMatrix::from_rows({Row{{{1, 2.0}}, 1.0}, Row{}}).row(0); }),
            ErrorCode::SuperConservative);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(code_of([&] { QMatrix::from_rows({Row{{{1, inf}}, inf}, Row{}}).row(0); }), ErrorCode::NonFiniteInput);
  EXPECT_EQ(code_of([] { bd("i-3", "1").row(0); }), ErrorCode::NegativeRate);

  Row dup{{{1, 1.0}, {1, 2.0}}, 3.0};
  normalize_row(0, dup);
  ASSERT_EQ(dup.entries.size(), 1u);
  EXPECT_DOUBLE_EQ(dup.entries[0].rate, 3.0);
}

TEST(SpecIo, LoadsBothShapes) {
  auto q = load_matrix(nlohmann::json::parse(
      R"({"family": "birth-death", "birth": "alpha*(i+1)^2", "death": "(i+1)^2", "params": {"alpha": 2}})"));
  EXPECT_DOUBLE_EQ(q.rate(0, 1), 2.0);
  auto q3 = load_matrix(nlohmann::json::parse(R"({"family": "birth-death", "birth": "alpha", "death": "1",
                                                  "params": {"alpha": 2}})"),
                        {{"alpha", 3.0}});
  EXPECT_DOUBLE_EQ(q3.rate(4, 5), 3.0);
  auto pb = load_matrix(nlohmann::json::parse(R"({"family": "pure-birth", "birth": "i+1"})"));
  EXPECT_DOUBLE_EQ(pb.rate(2, 1), 0.0);
  auto ex = load_matrix(nlohmann::json::parse(R"({"rows": [{"i": 0, "entries": [[1, 1.5]]},
                                                           {"i": 1, "entries": [], "qi": 2}]})"));
  EXPECT_DOUBLE_EQ(ex.total_rate(0), 1.5);
  EXPECT_DOUBLE_EQ(ex.defect(1).defect, 2.0);
}

TEST(SpecIo, Malformed) {
  for (const char* bad : {R"([])", R"({"family": "weird"})", R"({"family": "birth-death", "birth": "i"})",
                          R"({"family": "birth-death", "birth": [3], "death": "i"})",
                          R"({"rows": [{"entries": []}]})", R"({"rows": [{"i": 0, "entries": [[1]]}]})",
                          R"({"family": "birth-death", "birth": "i", "death": "i", "params": {"a": "x"}})"})
    EXPECT_EQ(code_of([&] { load_matrix(nlohmann::json::parse(bad)); }), ErrorCode::MalformedSpec) << bad;
  EXPECT_EQ(code_of([] { load_matrix_file("/nonexistent/spec.json"); }), ErrorCode::MalformedSpec);
}

TEST(SpecIo, DataFiles) {
  const std::filesystem::path dir = MINLAB_DATA_DIR;
  for (const char* f : {"q1.json", "q2.json", "poisson.json", "two_state.json", "bounded_low.json",
                        "bounded_high.json", "linear_low.json", "linear_high.json", "linear_symmetric.json"}) {
    QMatrix q = load_matrix_file(dir / f);
    EXPECT_TRUE(is_conservative(q, 50)) << f;
  }
}
