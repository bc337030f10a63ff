#include "toposim/rational.hpp"

#include "doctest.h"

using toposim::Rational;

TEST_CASE("normalization and comparison") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(-2, 4) == Rational(1, -2));
  CHECK(Rational(3, 6).num() == 1);
  CHECK(Rational(3, 6).den() == 2);
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(7, 2) > Rational(3));
  CHECK(Rational(0) <= Rational(0));
}

TEST_CASE("arithmetic stays exact") {
  Rational r(1, 10);
  Rational y(1, 10);  // 0.1 Gwei
  CHECK((Rational(1) + r) * Rational(100) == Rational(110));
  CHECK((Rational(1) + r) * y == Rational(11, 100));
  CHECK(Rational(9, 8) * Rational(80) == Rational(90));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(1, 3) - Rational(1, 2) == Rational(-1, 6));
  CHECK(Rational(22845) / Rational(31996000) == Rational(4569, 6399200));
}

TEST_CASE("parsing") {
  CHECK(*Rational::parse("3") == Rational(3));
  CHECK(*Rational::parse("0.125") == Rational(1, 8));
  CHECK(*Rational::parse("0.00071") == Rational(71, 100000));
  CHECK(*Rational::parse("71/100000") == Rational(71, 100000));
  CHECK(*Rational::parse("-1/8") == Rational(-1, 8));
  CHECK(!Rational::parse("").has_value());
  CHECK(!Rational::parse("abc").has_value());
  CHECK(!Rational::parse("1/0").has_value());
  CHECK(!Rational::parse("1.2.3").has_value());
}

TEST_CASE("division by zero throws") {
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
}
