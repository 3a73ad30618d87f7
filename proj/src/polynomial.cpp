#include "poppkit/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "poppkit/error.hpp"

namespace poppkit {

Polynomial Polynomial::constant(std::size_t num_vars, const Rational& c) {
  Polynomial p(num_vars);
  p.add_term(Exponents(num_vars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t num_vars, std::size_t index) {
  if (index >= num_vars) throw std::out_of_range("variable index out of range");
  Polynomial p(num_vars);
  Exponents e(num_vars, 0);
  e[index] = 1;
  p.add_term(e, Rational(1));
  return p;
}

bool Polynomial::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() > 1) return false;
  const Exponents& e = terms_.begin()->first;
  return std::all_of(e.begin(), e.end(), [](std::uint32_t x) { return x == 0; });
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    int s = 0;
    for (auto x : e) s += static_cast<int>(x);
    d = std::max(d, s);
  }
  return d;
}

void Polynomial::add_term(const Exponents& e, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Polynomial::check_compatible(const Polynomial& other) const {
  if (num_vars_ != other.num_vars_) {
    throw std::invalid_argument("polynomials over different variable counts");
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_compatible(other);
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_compatible(other);
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
  check_compatible(other);
  Polynomial out(num_vars_);
  Exponents e(num_vars_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : other.terms_) {
      for (std::size_t i = 0; i < num_vars_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  terms_ = std::move(out.terms_);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, coeff] : terms_) coeff *= c;
  return *this;
}

Polynomial Polynomial::pow(unsigned exponent) const {
  Polynomial result = constant(num_vars_, Rational(1));
  Polynomial base = *this;
  while (exponent) {
    if (exponent & 1u) result *= base;
    exponent >>= 1;
    if (exponent) base *= base;
  }
  return result;
}

Polynomial Polynomial::partial(std::size_t var) const {
  if (var >= num_vars_) throw std::out_of_range("partial: variable index out of range");
  Polynomial out(num_vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents d = e;
    --d[var];
    out.add_term(d, c * e[var]);
  }
  return out;
}

Rational Polynomial::evaluate(std::span<const Rational> point) const {
  if (point.size() != num_vars_) throw std::invalid_argument("evaluate: point size mismatch");
  Rational sum = 0;
  for (const auto& [e, c] : terms_) {
    Rational term = c;
    for (std::size_t i = 0; i < num_vars_; ++i) {
      if (e[i] == 0) continue;
      Rational p;
      mpz_pow_ui(p.get_num_mpz_t(), point[i].get_num_mpz_t(), e[i]);
      mpz_pow_ui(p.get_den_mpz_t(), point[i].get_den_mpz_t(), e[i]);
      term *= p;
    }
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::compose(std::span<const Polynomial> subs) const {
  if (subs.size() != num_vars_) throw std::invalid_argument("compose: substitution count mismatch");
  const std::size_t target_vars = subs.empty() ? 0 : subs[0].num_vars();
  Polynomial out(target_vars);
  for (const auto& [e, c] : terms_) {
    Polynomial term = constant(target_vars, c);
    for (std::size_t i = 0; i < num_vars_; ++i) {
      if (e[i]) term *= subs[i].pow(e[i]);
    }
    out += term;
  }
  return out;
}

std::string Polynomial::to_string(std::span<const std::string> names) const {
  if (terms_.empty()) return "0";
  std::string out;
  // Highest total degree first, then reverse lexicographic exponents.
  std::vector<const std::pair<const Exponents, Rational>*> order;
  for (const auto& t : terms_) order.push_back(&t);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) {
    int da = 0, db = 0;
    for (auto x : a->first) da += static_cast<int>(x);
    for (auto x : b->first) db += static_cast<int>(x);
    if (da != db) return da > db;
    return a->first > b->first;
  });
  for (const auto* t : order) {
    const auto& [e, c] = *t;
    const bool negative = c < 0;
    Rational mag = abs(c);
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += i < names.size() ? names[i] : "v" + std::to_string(i);
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    if (mono.empty()) {
      out += poppkit::to_string(mag);
    } else if (mag == 1) {
      out += mono;
    } else {
      out += poppkit::to_string(mag) + "*" + mono;
    }
  }
  return out;
}

namespace {

class PolynomialParser {
 public:
  PolynomialParser(std::string_view text, std::span<const std::string> vars)
      : text_(text), vars_(vars) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " in '" + std::string(text_) + "'", 0, pos_ + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial p = term();
    for (;;) {
      if (accept('+')) {
        p += term();
      } else if (accept('-')) {
        p -= term();
      } else {
        return p;
      }
    }
  }

  Polynomial term() {
    Polynomial p = unary();
    while (accept('*')) p *= unary();
    return p;
  }

  Polynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    if (accept('^')) {
      skip_ws();
      const std::string digits = read_digits();
      if (digits.empty()) fail("expected nonnegative integer exponent");
      if (digits.size() > 6) fail("exponent too large");
      return base.pow(static_cast<unsigned>(std::stoul(digits)));
    }
    return base;
  }

  std::string read_digits() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Polynomial primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      Integer num(read_digits());
      Integer den = 1;
      const std::size_t save = pos_;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '/') {
        ++pos_;
        skip_ws();
        const std::string d = read_digits();
        if (d.empty()) fail("expected integer denominator after '/'");
        den = Integer(d);
        if (den == 0) fail("zero denominator");
      } else {
        pos_ = save;
      }
      Rational q(num, den);
      q.canonicalize();
      return Polynomial::constant(vars_.size(), q);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string name(text_.substr(start, pos_ - start));
      const auto it = std::find(vars_.begin(), vars_.end(), name);
      if (it == vars_.end()) {
        pos_ = start;
        fail("unknown variable '" + name + "'");
      }
      return Polynomial::variable(vars_.size(), static_cast<std::size_t>(it - vars_.begin()));
    }
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_polynomial(std::string_view expr, std::span<const std::string> variables) {
  return PolynomialParser(expr, variables).parse();
}

RationalMatrix evaluate(const PolynomialMatrix& m, std::span<const Rational> point) {
  RationalMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).evaluate(point);
  return out;
}

}  // namespace poppkit
