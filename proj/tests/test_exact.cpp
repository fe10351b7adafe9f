#include "doctest.h"

#include "chaoskit/error.hpp"
#include "chaoskit/exact.hpp"

using namespace chaoskit;

TEST_CASE("parse_rational accepts fractions and decimals") {
  CHECK(parse_rational("5") == Rational(5));
  CHECK(parse_rational("-3/4") == Rational(-3, 4));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("1e-3") == Rational(1, 1000));
  CHECK(parse_rational("2.5e2") == Rational(250));
  CHECK(parse_rational("6/8") == Rational(3, 4));
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational(""), Error);
}

TEST_CASE("rational formatting is canonical") {
  CHECK(to_string(Rational(10, 4)) == "5/2");
  CHECK(to_string(Rational(-6, 3)) == "-2");
}

TEST_CASE("square roots reduce to squarefree radicands") {
  CHECK(Surd::sqrt(Rational(4)) == Surd(2));
  CHECK(Surd::sqrt(Rational(8)).str() == "2*sqrt(2)");
  CHECK(Surd::sqrt(Rational(1, 2)).str() == "1/2*sqrt(2)");
  CHECK(Surd::sqrt(Rational(1, 12)).str() == "1/6*sqrt(3)");
  CHECK(Surd::sqrt(Rational(9, 4)) == Surd(Rational(3, 2)));
}

TEST_CASE("surd arithmetic stays exact") {
  Surd r2 = Surd::sqrt(Rational(2));
  Surd r3 = Surd::sqrt(Rational(3));
  Surd r6 = Surd::sqrt(Rational(6));
  CHECK(r2 * r2 == Surd(2));
  CHECK(r6 * r3 == Surd(3) * r2);
  CHECK((r2 + r3) * (r2 - r3) == Surd(-1));
  CHECK((r2 + Surd(1)).str() == "1 + sqrt(2)");
  CHECK(r2.inverse() == Surd(Rational(1, 2)) * r2);
  CHECK(r2.pow(5) == Surd(4) * r2);
  CHECK(Surd::sqrt(Rational(1, 2)).pow(4) == Surd(Rational(1, 4)));
  CHECK_THROWS_AS((r2 + r3).inverse(), Error);
  CHECK((r2 + r3).to_double() == doctest::Approx(1.4142135623730951 + 1.7320508075688772));
}

TEST_CASE("square_decompose splits a square factor") {
  Integer sq, fr;
  square_decompose(Integer(72), sq, fr);
  CHECK(sq == 6);
  CHECK(fr == 2);
  square_decompose(Integer("1000000000000000000000"), sq, fr);  // 10^21
  CHECK(sq * sq * fr == Integer("1000000000000000000000"));
  CHECK(fr == 10);
}

TEST_CASE("numbers degrade to floating point only when needed") {
  Number a(Rational(1, 2));
  Number b = Number::inexact(0.25);
  CHECK((a + a).is_exact());
  CHECK((a + a).str() == "1");
  CHECK(!(a + b).is_exact());
  CHECK((a + b).approx == 0.75);
  CHECK(abs(Number(Rational(-3, 2))).str() == "3/2");
  CHECK(divide(Number(Rational(1)), Number(Surd::sqrt(Rational(2)))).str() == "1/2*sqrt(2)");
  CHECK(format_double(0.1) == "0.1");
}
