#include <gtest/gtest.h>

#include <random>

#include "poppkit/error.hpp"
#include "poppkit/polynomial.hpp"
#include "poppkit/random.hpp"

namespace poppkit {
namespace {

const std::vector<std::string> kXYZ{"x", "y", "z"};

Polynomial P(const char* s) { return parse_polynomial(s, kXYZ); }

TEST(Rational, ParseAndPrint) {
  EXPECT_EQ(parse_rational("6/4"), make_rational(3, 2));
  EXPECT_EQ(parse_rational("-7"), Rational(-7));
  EXPECT_EQ(to_string(parse_rational("-10/4")), "-5/2");
  EXPECT_THROW(parse_rational("10/-4"), ParseError);
  EXPECT_EQ(to_string(Rational(3)), "3");
  EXPECT_EQ(to_string(Point{Rational(1), make_rational(-1, 3)}), "(1, -1/3)");
  EXPECT_THROW(parse_rational("1/0"), ParseError);
  EXPECT_THROW(parse_rational("abc"), ParseError);
  EXPECT_THROW(parse_rational(""), ParseError);
}

TEST(Polynomial, ArithmeticIsCanonical) {
  EXPECT_EQ(P("(x+y)^2"), P("x^2 + 2*x*y + y^2"));
  EXPECT_EQ(P("x - x"), Polynomial(3));
  EXPECT_TRUE(P("x - x").is_zero());
  EXPECT_EQ(P("1/2*x + 1/2*x"), P("x"));
  EXPECT_EQ(P("-(x - y)"), P("y - x"));
  EXPECT_EQ(P("3/6"), Polynomial::constant(3, make_rational(1, 2)));
  EXPECT_EQ(P("x*y*z").degree(), 3);
  EXPECT_TRUE(P("7/3").is_constant());
}

TEST(Polynomial, PartialDerivative) {
  EXPECT_EQ(P("x^3*y + 2*y*z - 5").partial(0), P("3*x^2*y"));
  EXPECT_EQ(P("x^3*y + 2*y*z - 5").partial(1), P("x^3 + 2*z"));
  EXPECT_TRUE(P("x^3").partial(2).is_zero());
}

TEST(Polynomial, EvaluateAndCompose) {
  const Point p{make_rational(1, 2), Rational(-3), Rational(2)};
  EXPECT_EQ(P("x^2*y + z").evaluate(p), make_rational(5, 4));
  const std::vector<Polynomial> subs{P("y + 1"), P("x*z"), P("2")};
  EXPECT_EQ(P("x*y + z^2").compose(subs), P("x*y*z + x*z + 4"));
}

TEST(Polynomial, RingHomomorphismOnRandomInputs) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Polynomial a = random_polynomial(3, 2, rng);
    const Polynomial b = random_polynomial(3, 3, rng);
    const Point p{random_rational(rng), random_rational(rng), random_rational(rng)};
    EXPECT_EQ((a * b).evaluate(p), a.evaluate(p) * b.evaluate(p));
    EXPECT_EQ((a + b).evaluate(p), a.evaluate(p) + b.evaluate(p));
    // Leibniz rule.
    EXPECT_EQ((a * b).partial(1), a.partial(1) * b + a * b.partial(1));
  }
}

TEST(Polynomial, PrintParseRoundTrip) {
  const Polynomial a = P("-3/2*x^2*y + z - 4 + x*y*z^3");
  EXPECT_EQ(parse_polynomial(a.to_string(kXYZ), kXYZ), a);
}

TEST(Polynomial, ParseErrorsCarryColumns) {
  try {
    P("x + w");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.column(), 5u);
    EXPECT_NE(std::string(e.what()).find("unknown variable 'w'"), std::string::npos);
  }
  EXPECT_THROW(P("x^-1"), ParseError);
  EXPECT_THROW(P("(x + y"), ParseError);
  EXPECT_THROW(P("x y"), ParseError);
  EXPECT_THROW(P("1/0"), ParseError);
  EXPECT_THROW(P(""), ParseError);
  EXPECT_THROW(P("x^1.5"), ParseError);
}

TEST(Polynomial, MismatchedRingsThrow) {
  Polynomial a = Polynomial::variable(2, 0);
  EXPECT_THROW(a += Polynomial::variable(3, 0), std::invalid_argument);
}

}  // namespace
}  // namespace poppkit
