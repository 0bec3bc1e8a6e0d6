#include <optional>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ttcv/sd.hpp"

using ttcv::Lottery;
using ttcv::Preference;
using ttcv::Rational;
using ttcv::SdRelation;
using ttcv::sd_compare;
using ttcv::sd_compare_degenerate;
using ttcv::sd_dominates_degenerate;

namespace {

// Definitional oracle, deliberately independent of the prefix-sum
// implementation: quantify over every object's upper contour set.
bool weakly_dominates_by_definition(const Preference& p, const Lottery& lhs, const Lottery& rhs) {
  for (int x = 0; x < p.n(); ++x) {
    Rational lhs_mass(0), rhs_mass(0);
    for (int y : p.upper_contour(x)) {
      lhs_mass = lhs_mass + lhs[static_cast<size_t>(y)];
      rhs_mass = rhs_mass + rhs[static_cast<size_t>(y)];
    }
    if (lhs_mass < rhs_mass) return false;
  }
  return true;
}

Lottery delta(int n, int object) {
  Lottery l(static_cast<size_t>(n), Rational(0));
  l[static_cast<size_t>(object)] = Rational(1);
  return l;
}

const Preference kNatural({0, 1, 2});  // x1 > x2 > x3

}  // namespace

TEST_CASE("strict dominance with a witness at the first divergence") {
  Lottery lhs{Rational(1, 2), Rational(1, 2), Rational(0)};
  Lottery rhs{Rational(1, 2), Rational(0), Rational(1, 2)};
  auto v = sd_compare(kNatural, lhs, rhs);
  CHECK(v.relation == SdRelation::StrictlyPreferred);
  CHECK(v.witness == 1);
  auto flipped = sd_compare(kNatural, rhs, lhs);
  CHECK(flipped.relation == SdRelation::StrictlyDominated);
  CHECK(flipped.witness == 1);
}

TEST_CASE("equal lotteries are equivalent") {
  Lottery l{Rational(1, 3), Rational(1, 3), Rational(1, 3)};
  CHECK(sd_compare(kNatural, l, l).relation == SdRelation::Equivalent);
}

TEST_CASE("crossing cumulative sums are incomparable") {
  Lottery lhs{Rational(1, 2), Rational(0), Rational(1, 2)};
  Lottery rhs{Rational(0), Rational(1), Rational(0)};
  // Oracle: neither direction weakly dominates under the definitional
  // quantifier, so the verdict must be Incomparable.
  CHECK_FALSE(weakly_dominates_by_definition(kNatural, lhs, rhs));
  CHECK_FALSE(weakly_dominates_by_definition(kNatural, rhs, lhs));
  CHECK(sd_compare(kNatural, lhs, rhs).relation == SdRelation::Incomparable);
  CHECK(sd_compare(kNatural, rhs, lhs).relation == SdRelation::Incomparable);
}

TEST_CASE("lotteries must sum to one") {
  Lottery short_mass{Rational(1, 2), Rational(0), Rational(0)};
  Lottery fine{Rational(1), Rational(0), Rational(0)};
  CHECK_THROWS_AS(sd_compare(kNatural, short_mass, fine), std::invalid_argument);
  CHECK_THROWS_AS(sd_compare(kNatural, fine, short_mass), std::invalid_argument);
  CHECK_THROWS_AS(sd_compare(kNatural, fine, Lottery{Rational(1)}), std::invalid_argument);
}

TEST_CASE("dominance over a degenerate target reduces to upper contour mass") {
  Preference p({1, 0, 2});  // x2 > x1 > x3
  Lottery l{Rational(1, 3), Rational(2, 3), Rational(0)};
  // Oracle: the definitional quantifier against the delta lottery.
  CHECK(weakly_dominates_by_definition(p, l, delta(3, 0)));
  CHECK(sd_dominates_degenerate(p, l, 0));

  CHECK(sd_dominates_degenerate(kNatural, delta(3, 1), 1));
  CHECK_FALSE(sd_dominates_degenerate(kNatural, delta(3, 2), 1));
}

TEST_CASE("degenerate shortcut agrees with the quantifier everywhere") {
  // All lotteries with denominators dividing 4 at n = 3, against all targets
  // and all preferences: the shortcut and the definition must coincide.
  for (long long pidx = 0; pidx < Preference::count(3); ++pidx) {
    Preference p = Preference::from_index(3, pidx);
    for (int a = 0; a <= 4; ++a) {
      for (int b = 0; a + b <= 4; ++b) {
        Lottery l{Rational(a, 4), Rational(b, 4), Rational(4 - a - b, 4)};
        for (int target = 0; target < 3; ++target) {
          CHECK(sd_dominates_degenerate(p, l, target) ==
                weakly_dominates_by_definition(p, l, delta(3, target)));
        }
      }
    }
  }
}

TEST_CASE("comparing two degenerate lotteries matches the general comparison") {
  for (long long pidx = 0; pidx < Preference::count(3); ++pidx) {
    Preference p = Preference::from_index(3, pidx);
    for (int x = 0; x < 3; ++x) {
      for (int y = 0; y < 3; ++y) {
        auto fast = sd_compare_degenerate(p, x, y);
        auto full = sd_compare(p, delta(3, x), delta(3, y));
        CHECK(fast.relation == full.relation);
        CHECK(fast.witness == full.witness);
      }
    }
  }
}

TEST_CASE("degenerate comparisons order objects exactly as the preference does") {
  Preference p({2, 0, 1});
  CHECK(sd_compare_degenerate(p, 2, 0).relation == SdRelation::StrictlyPreferred);
  CHECK(sd_compare_degenerate(p, 1, 1).relation == SdRelation::Equivalent);
  CHECK(sd_compare_degenerate(p, 1, 0).relation == SdRelation::StrictlyDominated);
}
