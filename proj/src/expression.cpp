#include "minlab/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "minlab/error.hpp"

namespace minlab {

Polynomial::Polynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) { trim(); }

Polynomial Polynomial::constant(double c) { return Polynomial({c}); }

Polynomial Polynomial::identity() { return Polynomial({0.0, 1.0}); }

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::operator()(double x) const noexcept {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::shifted(double shift) const {
  // Repeated synthetic division (Taylor shift).
  std::vector<double> c = coeffs_;
  const auto n = c.size();
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t j = n - 1; j > k; --j) c[j - 1] += shift * c[j];
  return Polynomial(std::move(c));
}

bool Polynomial::nonnegative_from(double from) const {
  for (double c : shifted(from).coeffs_)
    if (c < 0.0) return false;
  return true;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < a.coeffs_.size(); ++k) c[k] += a.coeffs_[k];
  for (std::size_t k = 0; k < b.coeffs_.size(); ++k) c[k] += b.coeffs_[k];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  return a + b * Polynomial::constant(-1.0);
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.coeffs_.empty() || b.coeffs_.empty()) return {};
  std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (std::size_t x = 0; x < a.coeffs_.size(); ++x)
    for (std::size_t y = 0; y < b.coeffs_.size(); ++y) c[x + y] += a.coeffs_[x] * b.coeffs_[y];
  return Polynomial(std::move(c));
}

Polynomial Polynomial::pow(unsigned exponent) const {
  Polynomial result = constant(1.0);
  for (unsigned k = 0; k < exponent; ++k) result = result * *this;
  return result;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, const ParameterMap& params) : text_(text), params_(params) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::MalformedExpression,
                "'" + std::string(text_) + "' at offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      if (accept('+'))
        acc = acc + term();
      else if (accept('-'))
        acc = acc - term();
      else
        return acc;
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    for (;;) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        Polynomial d = unary();
        if (d.degree() > 0) fail("divisor must be constant");
        if (d.degree() < 0) fail("division by zero");
        acc = acc * Polynomial::constant(1.0 / d.coefficients()[0]);
      } else {
        return acc;
      }
    }
  }

  Polynomial unary() {
    if (accept('-')) return Polynomial::constant(-1.0) * unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    if (!accept('^')) return base;
    skip_space();
    unsigned exponent = 0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(first, last, exponent);
    if (ec != std::errc() || ptr == first) fail("exponent must be a nonnegative integer");
    if (exponent > 16) fail("exponent too large");
    pos_ += static_cast<std::size_t>(ptr - first);
    return base.pow(exponent);
  }

  Polynomial primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      double value = 0.0;
      const char* first = text_.data() + pos_;
      auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), value);
      if (ec != std::errc() || ptr == first) fail("bad number");
      pos_ += static_cast<std::size_t>(ptr - first);
      if (!std::isfinite(value)) fail("non-finite number");
      return Polynomial::constant(value);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const auto start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "i") return Polynomial::identity();
      auto it = params_.find(name);
      if (it == params_.end()) fail("unknown name '" + std::string(name) + "'");
      return Polynomial::constant(it->second);
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  const ParameterMap& params_;
  std::size_t pos_ = 0;
};

}  // namespace

RateExpression RateExpression::parse(std::string_view text, const ParameterMap& params) {
  RateExpression e;
  e.source_ = std::string(text);
  e.poly_ = Parser(text, params).parse();
  return e;
}

RateExpression RateExpression::constant(double c) {
  RateExpression e;
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), c);
  e.source_ = ec == std::errc() ? std::string(buf, ptr) : std::string("0");
  e.poly_ = Polynomial::constant(c);
  return e;
}

}  // namespace minlab
