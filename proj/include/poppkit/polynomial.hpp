#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "poppkit/matrix.hpp"
#include "poppkit/rational.hpp"

namespace poppkit {

using Exponents = std::vector<std::uint32_t>;

/// Sparse multivariate polynomial with rational coefficients over a fixed
/// number of variables. Zero coefficients are never stored, so two
/// polynomials are equal iff their term maps are equal.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::size_t num_vars) : num_vars_(num_vars) {}

  static Polynomial constant(std::size_t num_vars, const Rational& c);
  static Polynomial variable(std::size_t num_vars, std::size_t index);

  std::size_t num_vars() const { return num_vars_; }
  const std::map<Exponents, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  int degree() const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);
  Polynomial& operator*=(const Rational& c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r = a;
    return r *= b;
  }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.num_vars_ == b.num_vars_ && a.terms_ == b.terms_;
  }

  Polynomial pow(unsigned exponent) const;
  Polynomial partial(std::size_t var) const;
  Rational evaluate(std::span<const Rational> point) const;

  /// Substitutes variable i by subs[i]; the result lives in the ring of the
  /// substitutions.
  Polynomial compose(std::span<const Polynomial> subs) const;

  std::string to_string(std::span<const std::string> names) const;

 private:
  void add_term(const Exponents& e, const Rational& c);
  void check_compatible(const Polynomial& other) const;

  std::size_t num_vars_ = 0;
  std::map<Exponents, Rational> terms_;
};

/// Parses the expression grammar
///   expr    := term (('+' | '-') term)*
///   term    := unary ('*' unary)*
///   unary   := ('+' | '-') unary | power
///   power   := primary ('^' integer)?
///   primary := integer ('/' integer)? | identifier | '(' expr ')'
/// Whitespace is ignored. Throws ParseError with the 1-based column.
Polynomial parse_polynomial(std::string_view expr, std::span<const std::string> variables);

using PolynomialMatrix = Matrix<Polynomial>;

RationalMatrix evaluate(const PolynomialMatrix& m, std::span<const Rational> point);

}  // namespace poppkit
