#include "poppkit/rational.hpp"

#include <cctype>

#include "poppkit/error.hpp"

namespace poppkit {

Rational make_rational(long numerator, long denominator) {
  if (denominator == 0) throw NumericalError("rational with zero denominator");
  Rational q(numerator, denominator);
  q.canonicalize();
  return q;
}

Rational parse_rational(std::string_view text) {
  std::size_t i = 0;
  auto fail = [&](const char* what) {
    throw ParseError(std::string(what) + " in rational '" + std::string(text) + "'", 0,
                     i + 1);
  };
  std::string digits;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
    if (text[i] == '-') digits.push_back('-');
    ++i;
  }
  const std::size_t start = i;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    digits.push_back(text[i++]);
  }
  if (i == start) fail("expected digits");
  Integer den = 1;
  if (i < text.size() && text[i] == '/') {
    ++i;
    const std::size_t dstart = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i == dstart) fail("expected denominator digits");
    den = Integer(std::string(text.substr(dstart, i - dstart)));
    if (den == 0) fail("zero denominator");
  }
  if (i != text.size()) fail("unexpected character");
  Rational q{Integer(digits), den};
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double to_double(const Rational& q) { return q.get_d(); }

std::string to_string(const Point& p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ", ";
    out += to_string(p[i]);
  }
  return out + ")";
}

}  // namespace poppkit
