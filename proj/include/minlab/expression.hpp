#ifndef MINLAB_EXPRESSION_HPP
#define MINLAB_EXPRESSION_HPP

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace minlab {

/// Dense polynomial in the state index, coefficients in ascending order.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);
  static Polynomial constant(double c);
  static Polynomial identity();

  double operator()(double x) const noexcept;
  int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coefficients() const noexcept { return coeffs_; }

  // Coefficients of y -> p(shift + y).
  Polynomial shifted(double shift) const;

  // Sufficient test for p(x) >= 0 on [from, inf): every coefficient of
  // p(from + y) is nonnegative.
  bool nonnegative_from(double from) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  Polynomial pow(unsigned exponent) const;

 private:
  void trim();
  std::vector<double> coeffs_;
};

using ParameterMap = std::map<std::string, double, std::less<>>;

/// A rate function of the state index i, parsed from text.
///
/// Grammar (whitespace-insensitive, locale-independent numbers):
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*     divisor must be constant
///   unary   := '-' unary | power
///   power   := primary ('^' integer)?
///   primary := number | 'i' | name | '(' expr ')'
///
/// `name` is looked up in the parameter map at parse time, so a spec can
/// write "alpha*(i+1)^2" and bind alpha separately. The result is always a
/// polynomial in i.
class RateExpression {
 public:
  RateExpression() = default;
  static RateExpression parse(std::string_view text, const ParameterMap& params = {});
  static RateExpression constant(double c);

  double operator()(std::size_t i) const noexcept { return poly_(static_cast<double>(i)); }
  const Polynomial& polynomial() const noexcept { return poly_; }
  const std::string& source() const noexcept { return source_; }
  bool is_constant() const noexcept { return poly_.degree() <= 0; }

 private:
  std::string source_;
  Polynomial poly_;
};

}  // namespace minlab

#endif
