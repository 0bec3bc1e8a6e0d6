#include <algorithm>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "ttcv/core.hpp"

using ttcv::AssignmentMatrix;
using ttcv::Endowment;
using ttcv::Preference;
using ttcv::Profile;
using ttcv::Rational;

namespace {

Preference pref231() { return Preference({1, 2, 0}); }  // x2 > x3 > x1

}  // namespace

TEST_CASE("preference construction validates permutations") {
  CHECK_THROWS_AS(Preference({0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Preference({0, 1, 3}), std::invalid_argument);
  CHECK_THROWS_AS(Preference({0}), std::invalid_argument);
  CHECK_THROWS_AS(Preference({}), std::invalid_argument);
}

TEST_CASE("rank reads positions 1-based") {
  CHECK(pref231().rank(1) == 1);
  CHECK(pref231().rank(0) == 3);
  CHECK(Preference({0, 1, 2}).rank(1) == 2);
  Preference p({3, 1, 0, 2});
  for (int k = 0; k < 4; ++k) CHECK(p.rank(p.object_at(k)) == k + 1);
}

TEST_CASE("upper contour lists weakly preferred objects in order") {
  CHECK(pref231().upper_contour(2) == std::vector<int>{1, 2});
  CHECK(pref231().upper_contour(1) == std::vector<int>{1});
  CHECK(Preference({0, 1, 2}).upper_contour(2) == std::vector<int>{0, 1, 2});
}

TEST_CASE("upper contour always contains its argument and has cardinality rank") {
  for (long long idx = 0; idx < Preference::count(4); ++idx) {
    Preference p = Preference::from_index(4, idx);
    for (int x = 0; x < 4; ++x) {
      auto contour = p.upper_contour(x);
      CHECK(std::find(contour.begin(), contour.end(), x) != contour.end());
      CHECK(static_cast<int>(contour.size()) == p.rank(x));
    }
  }
}

TEST_CASE("exactly one strict direction holds for every object pair") {
  for (long long idx = 0; idx < Preference::count(3); ++idx) {
    Preference p = Preference::from_index(3, idx);
    for (int x = 0; x < 3; ++x) {
      for (int y = 0; y < 3; ++y) {
        if (x == y) continue;
        CHECK(p.strictly_prefers(x, y) != p.strictly_prefers(y, x));
      }
    }
  }
}

TEST_CASE("preference indexing is a lexicographic bijection") {
  CHECK(Preference::count(3) == 6);
  CHECK(Preference::from_index(3, 0).ranking() == std::vector<int>{0, 1, 2});
  CHECK(Preference::from_index(3, 5).ranking() == std::vector<int>{2, 1, 0});
  // Oracle: generate all rankings with std::next_permutation, which emits
  // them in lexicographic order; index() must match the emission position.
  std::vector<int> ranking{0, 1, 2, 3};
  long long position = 0;
  do {
    Preference p(ranking);
    CHECK(p.index() == position);
    CHECK(Preference::from_index(4, position) == p);
    ++position;
  } while (std::next_permutation(ranking.begin(), ranking.end()));
  CHECK(position == Preference::count(4));
}

TEST_CASE("profile indexing uses agent 0 as the most significant digit") {
  Profile p({Preference({1, 0}), Preference({0, 1})});
  CHECK(p.index() == 2);
  CHECK(Profile::from_index(2, 2) == p);
  CHECK(Profile::space_size(2) == 4);
  CHECK(Profile::space_size(3) == 216);
  CHECK(Profile::space_size(4) == 331776);
  for (long long idx = 0; idx < 216; ++idx) {
    CHECK(Profile::from_index(3, idx).index() == idx);
  }
}

TEST_CASE("with_pref replaces a single agent") {
  Profile p = Profile::from_index(3, 0);
  Profile q = p.with_pref(1, pref231());
  CHECK(q.pref(1) == pref231());
  CHECK(q.pref(0) == p.pref(0));
  CHECK(q.pref(2) == p.pref(2));
  CHECK(p.pref(1) == Preference({0, 1, 2}));
}

TEST_CASE("assignment matrices validate bistochasticity exactly") {
  using R = Rational;
  CHECK_NOTHROW(AssignmentMatrix(2, {R(1, 2), R(1, 2), R(1, 2), R(1, 2)}));
  // Row sums fine, column sums broken.
  CHECK_THROWS_AS(AssignmentMatrix(2, {R(1), R(0), R(1), R(0)}), std::invalid_argument);
  // Row sum 1 - 1/1000000 in the first row.
  CHECK_THROWS_AS(
      AssignmentMatrix(2, {R(999999, 2000000), R(1, 2), R(1000001, 2000000), R(1, 2)}),
      std::invalid_argument);
  // Negative entry.
  CHECK_THROWS_AS(AssignmentMatrix(2, {R(-1, 2), R(3, 2), R(3, 2), R(-1, 2)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(AssignmentMatrix(2, {R(1)}), std::invalid_argument);
}

TEST_CASE("identity and permutation constructors") {
  AssignmentMatrix id = AssignmentMatrix::identity(3);
  CHECK(id.at(1, 1) == Rational(1));
  CHECK(id.at(1, 0) == Rational(0));
  CHECK(id.row(1) == ttcv::Lottery{Rational(0), Rational(1), Rational(0)});
  AssignmentMatrix swap = AssignmentMatrix::from_permutation({1, 0});
  CHECK(swap.at(0, 1) == Rational(1));
  CHECK(swap.as_permutation() == std::vector<int>{1, 0});
  CHECK(id.is_deterministic());
  AssignmentMatrix uniform(2, {Rational(1, 2), Rational(1, 2), Rational(1, 2), Rational(1, 2)});
  CHECK_FALSE(uniform.is_deterministic());
  CHECK_FALSE(uniform.as_permutation().has_value());
}

TEST_CASE("row_mass sums the requested entries") {
  AssignmentMatrix m(3, {Rational(1, 2), Rational(1, 3), Rational(1, 6),  //
                         Rational(1, 4), Rational(1, 3), Rational(5, 12),
                         Rational(1, 4), Rational(1, 3), Rational(5, 12)});
  std::vector<int> objects{0, 2};
  CHECK(m.row_mass(0, objects) == Rational(2, 3));
  CHECK(m.row_mass(1, objects) == Rational(2, 3));
}

TEST_CASE("endowments expose both directions of the bijection") {
  Endowment e({2, 0, 1});  // object 0 owned by agent 2, etc.
  CHECK(e.owner(0) == 2);
  CHECK(e.endowment_of(2) == 0);
  CHECK_FALSE(e.is_identity());
  CHECK(Endowment::canonical(3).is_identity());
  CHECK_THROWS_AS(Endowment({0, 0, 1}), std::invalid_argument);
}
