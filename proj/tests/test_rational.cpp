#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "ttcv/rational.hpp"

using ttcv::Rational;

TEST_CASE("construction normalizes to lowest terms") {
  CHECK(Rational(2, 4).str() == "1/2");
  CHECK(Rational(-2, 4).str() == "-1/2");
  CHECK(Rational(2, -4).str() == "-1/2");
  CHECK(Rational(-2, -4).str() == "1/2");
  CHECK(Rational(0, 7).str() == "0");
  CHECK(Rational(6, 3).str() == "2");
  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
}

TEST_CASE("arithmetic identities") {
  Rational a(1, 3), b(1, 6);
  CHECK(a + b == Rational(1, 2));
  CHECK(a - b == Rational(1, 6));
  CHECK(a * b == Rational(1, 18));
  CHECK(a / b == Rational(2));
  CHECK(-a == Rational(-1, 3));
  CHECK(a + Rational(0) == a);
  CHECK(a * Rational(1) == a);
}

TEST_CASE("ordering is exact") {
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(0));
  CHECK(Rational(2, 6) == Rational(1, 3));
  CHECK(Rational(7, 8) > Rational(6, 7));
  CHECK(Rational(1, 3).sign() == 1);
  CHECK(Rational(-1, 3).sign() == -1);
  CHECK(Rational(0).sign() == 0);
}

TEST_CASE("predicates") {
  CHECK(Rational(0).is_zero());
  CHECK(Rational(1).is_one());
  CHECK(Rational(4, 2).is_integer());
  CHECK_FALSE(Rational(1, 2).is_integer());
}

TEST_CASE("string round-trip on random rationals") {
  std::mt19937 rng(20240917);
  std::uniform_int_distribution<long> num(-1000, 1000);
  std::uniform_int_distribution<long> den(1, 1000);
  for (int trial = 0; trial < 500; ++trial) {
    Rational q(num(rng), den(rng));
    CHECK(Rational::from_string(q.str()) == q);
  }
}

TEST_CASE("parsing accepts only canonical integer and fraction forms") {
  CHECK(Rational::from_string("1/3") == Rational(1, 3));
  CHECK(Rational::from_string("-4/6") == Rational(-2, 3));
  CHECK(Rational::from_string("17") == Rational(17));
  CHECK_FALSE(Rational::try_parse("1.5").has_value());
  CHECK_FALSE(Rational::try_parse("1/0").has_value());
  CHECK_FALSE(Rational::try_parse("").has_value());
  CHECK_FALSE(Rational::try_parse("1/").has_value());
  CHECK_FALSE(Rational::try_parse("/2").has_value());
  CHECK_FALSE(Rational::try_parse("one half").has_value());
  CHECK_FALSE(Rational::try_parse("1 / 2").has_value());
  CHECK_THROWS_AS(Rational::from_string("0.25"), std::invalid_argument);
}

TEST_CASE("arithmetic never loses exactness across long chains") {
  // 1/1 + 1/2 + ... + 1/12 computed forward equals the same sum computed
  // backward; any rounding would break the equality.
  Rational forward(0), backward(0);
  for (int k = 1; k <= 12; ++k) forward = forward + Rational(1, k);
  for (int k = 12; k >= 1; --k) backward = backward + Rational(1, k);
  CHECK(forward == backward);
  CHECK(forward == Rational(86021, 27720));
}
