#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "ttcv/checkers.hpp"
#include "ttcv/derivation.hpp"
#include "ttcv/harness.hpp"
#include "ttcv/sd.hpp"
#include "ttcv/ttc.hpp"

using ttcv::AssignmentMatrix;
using ttcv::Lottery;
using ttcv::Preference;
using ttcv::Profile;
using ttcv::Rational;
using ttcv::RuleOracle;
using ttcv::SdRelation;
using ttcv::sd_compare;

namespace {

Lottery random_lottery(std::mt19937& rng, int n, int denominator) {
  // n - 1 sorted cut points over [0, denominator] turn into n exact masses.
  std::vector<int> cuts{0, denominator};
  std::uniform_int_distribution<int> pick(0, denominator);
  for (int k = 0; k < n - 1; ++k) cuts.push_back(pick(rng));
  std::sort(cuts.begin(), cuts.end());
  Lottery lottery;
  for (int k = 0; k < n; ++k) {
    lottery.push_back(Rational(cuts[static_cast<size_t>(k) + 1] - cuts[static_cast<size_t>(k)],
                               denominator));
  }
  return lottery;
}

// Shifts some mass from a random object to one the preference likes at least
// as much; the result weakly dominates the input by construction.
Lottery shift_upward(std::mt19937& rng, const Preference& pref, const Lottery& base) {
  Lottery better = base;
  std::uniform_int_distribution<int> pick(0, pref.n() - 1);
  for (int attempt = 0; attempt < 8; ++attempt) {
    int from = pick(rng);
    int source = pref.object_at(from);
    if (better[static_cast<size_t>(source)].is_zero() || from == 0) continue;
    int target = pref.object_at(std::uniform_int_distribution<int>(0, from - 1)(rng));
    Rational moved = better[static_cast<size_t>(source)] * Rational(1, 2);
    better[static_cast<size_t>(source)] = better[static_cast<size_t>(source)] - moved;
    better[static_cast<size_t>(target)] = better[static_cast<size_t>(target)] + moved;
  }
  return better;
}

Profile random_profile(std::mt19937& rng, int n) {
  std::vector<Preference> prefs;
  std::uniform_int_distribution<long long> pick(0, Preference::count(n) - 1);
  for (int i = 0; i < n; ++i) prefs.push_back(Preference::from_index(n, pick(rng)));
  return Profile(std::move(prefs));
}

AssignmentMatrix random_bistochastic(std::mt19937& rng, int n, int terms) {
  // A convex combination of permutation matrices with exact rational
  // weights is bistochastic by construction.
  std::vector<int> weights;
  int total = 0;
  std::uniform_int_distribution<int> w(1, 12);
  for (int k = 0; k < terms; ++k) {
    weights.push_back(w(rng));
    total += weights.back();
  }
  std::vector<Rational> entries(static_cast<size_t>(n) * n, Rational(0));
  std::vector<int> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int k = 0; k < terms; ++k) {
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < n; ++i) {
      entries[static_cast<size_t>(i) * n + static_cast<size_t>(perm[static_cast<size_t>(i)])] =
          entries[static_cast<size_t>(i) * n + static_cast<size_t>(perm[static_cast<size_t>(i)])] +
          Rational(weights[static_cast<size_t>(k)], total);
    }
  }
  return AssignmentMatrix(n, std::move(entries));
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("dominance comparison is reflexive") {
  std::mt19937 rng(7001);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 2 + trial % 3;
    Preference pref = Preference::from_index(
        n, std::uniform_int_distribution<long long>(0, Preference::count(n) - 1)(rng));
    Lottery l = random_lottery(rng, n, 24);
    CHECK(sd_compare(pref, l, l).relation == SdRelation::Equivalent);
  }
}

TEST_CASE("weak dominance chains compose transitively") {
  std::mt19937 rng(7002);
  int strict_chains = 0;
  for (int trial = 0; trial < 300; ++trial) {
    int n = 3 + trial % 2;
    Preference pref = Preference::from_index(
        n, std::uniform_int_distribution<long long>(0, Preference::count(n) - 1)(rng));
    Lottery worst = random_lottery(rng, n, 24);
    Lottery middle = shift_upward(rng, pref, worst);
    Lottery best = shift_upward(rng, pref, middle);
    CHECK(sd_compare(pref, middle, worst).weakly_dominates());
    CHECK(sd_compare(pref, best, middle).weakly_dominates());
    auto end_to_end = sd_compare(pref, best, worst);
    CHECK(end_to_end.weakly_dominates());
    if (end_to_end.relation == SdRelation::StrictlyPreferred) ++strict_chains;
  }
  // The generator must exercise genuinely strict chains, not only ties.
  CHECK(strict_chains > 100);
}

TEST_CASE("moving mass toward the top strictly improves a lottery") {
  std::mt19937 rng(7003);
  for (int trial = 0; trial < 200; ++trial) {
    Preference pref = Preference::from_index(
        4, std::uniform_int_distribution<long long>(0, Preference::count(4) - 1)(rng));
    Lottery base = random_lottery(rng, 4, 12);
    Lottery better = base;
    // One guaranteed strict shift: find mass below the top, move half up.
    for (int position = 3; position >= 1; --position) {
      int source = pref.object_at(position);
      if (!better[static_cast<size_t>(source)].is_zero()) {
        Rational moved = better[static_cast<size_t>(source)] * Rational(1, 2);
        better[static_cast<size_t>(source)] = better[static_cast<size_t>(source)] - moved;
        int target = pref.top();
        better[static_cast<size_t>(target)] = better[static_cast<size_t>(target)] + moved;
        break;
      }
    }
    if (better == base) continue;  // all mass already on the top
    CHECK(sd_compare(pref, better, base).relation == SdRelation::StrictlyPreferred);
    CHECK(sd_compare(pref, base, better).relation == SdRelation::StrictlyDominated);
  }
}

TEST_CASE("the weak-but-not-strict label never appears") {
  std::mt19937 rng(7004);
  for (int trial = 0; trial < 400; ++trial) {
    Preference pref = Preference::from_index(
        3, std::uniform_int_distribution<long long>(0, 5)(rng));
    Lottery a = random_lottery(rng, 3, 12);
    Lottery b = random_lottery(rng, 3, 12);
    auto v = sd_compare(pref, a, b);
    CHECK(v.relation != SdRelation::WeaklyPreferredNotStrict);
    // Equivalence for lotteries under a strict order means equality.
    if (v.relation == SdRelation::Equivalent) CHECK(a == b);
  }
}

TEST_CASE("degenerate comparisons agree with their lottery form") {
  for (int n : {3, 4}) {
    for (long long pidx = 0; pidx < Preference::count(n); ++pidx) {
      Preference pref = Preference::from_index(n, pidx);
      for (int x = 0; x < n; ++x) {
        for (int y = 0; y < n; ++y) {
          Lottery dx(static_cast<size_t>(n), Rational(0));
          Lottery dy(static_cast<size_t>(n), Rational(0));
          dx[static_cast<size_t>(x)] = Rational(1);
          dy[static_cast<size_t>(y)] = Rational(1);
          auto fast = ttcv::sd_compare_degenerate(pref, x, y);
          auto slow = sd_compare(pref, dx, dy);
          CHECK(fast.relation == slow.relation);
          CHECK(fast.witness == slow.witness);
        }
      }
    }
  }
}

TEST_CASE("clearing all cycles per round or one at a time changes nothing") {
  for (int n : {2, 3}) {
    for (long long idx = 0; idx < Profile::space_size(n); ++idx) {
      Profile profile = Profile::from_index(n, idx);
      CHECK(ttcv::ttc_assignment(profile, ttcv::RoundMode::AllCycles) ==
            ttcv::ttc_assignment(profile, ttcv::RoundMode::SmallestCycleOnly));
    }
  }
  std::mt19937 rng(7005);
  for (int trial = 0; trial < 10000; ++trial) {
    Profile profile = random_profile(rng, 4);
    CHECK(ttcv::ttc_assignment(profile, ttcv::RoundMode::AllCycles) ==
          ttcv::ttc_assignment(profile, ttcv::RoundMode::SmallestCycleOnly));
  }
}

TEST_CASE("trading always returns an individually rational permutation") {
  for (long long idx = 0; idx < Profile::space_size(3); ++idx) {
    Profile profile = Profile::from_index(3, idx);
    auto assignment = ttcv::ttc_assignment(profile);
    CHECK(ttcv::is_permutation_of_iota(assignment, 3));
    for (int i = 0; i < 3; ++i) {
      CHECK(profile.pref(i).weakly_prefers(assignment[static_cast<size_t>(i)], i));
    }
  }
  std::mt19937 rng(7006);
  for (int trial = 0; trial < 10000; ++trial) {
    Profile profile = random_profile(rng, 4);
    auto assignment = ttcv::ttc_assignment(profile);
    CHECK(ttcv::is_permutation_of_iota(assignment, 4));
    for (int i = 0; i < 4; ++i) {
      CHECK(profile.pref(i).weakly_prefers(assignment[static_cast<size_t>(i)], i));
    }
  }
}

TEST_CASE("pushing endowments to second place never rewires the trading graph") {
  for (long long idx = 0; idx < Profile::space_size(3); ++idx) {
    Profile profile = Profile::from_index(3, idx);
    std::vector<int> everyone{0, 1, 2};
    auto graph = ttcv::build_graph(profile, everyone);
    for (const auto& cycle : ttcv::find_cycles(graph)) {
      if (cycle.size() < 2) continue;
      Profile modified = ttcv::modified_profile(profile, cycle);
      CHECK(ttcv::build_graph(modified, everyone).successor == graph.successor);
      for (int i = 0; i < 3; ++i) CHECK(modified.pref(i).top() == profile.pref(i).top());
    }
  }
  std::mt19937 rng(7007);
  for (int trial = 0; trial < 2000; ++trial) {
    Profile profile = random_profile(rng, 4);
    std::vector<int> everyone{0, 1, 2, 3};
    auto graph = ttcv::build_graph(profile, everyone);
    for (const auto& cycle : ttcv::find_cycles(graph)) {
      if (cycle.size() < 2) continue;
      Profile modified = ttcv::modified_profile(profile, cycle);
      CHECK(ttcv::build_graph(modified, everyone).successor == graph.successor);
    }
  }
}

TEST_CASE("full strategy-proofness always implies its top-object weakening") {
  std::vector<RuleOracle> rules;
  rules.push_back(ttcv::make_ttc_rule(2));
  rules.push_back(ttcv::make_ttc_rule(3));
  rules.push_back(ttcv::make_identity_rule(2));
  rules.push_back(ttcv::make_identity_rule(3));
  rules.push_back(ttcv::make_serial_dictatorship_rule(2));
  rules.push_back(ttcv::make_serial_dictatorship_rule(3));
  {
    std::vector<AssignmentMatrix> outcomes;
    for (long long idx = 0; idx < 4; ++idx) {
      outcomes.push_back(idx == 1 ? AssignmentMatrix::from_permutation({1, 0})
                                  : AssignmentMatrix::identity(2));
    }
    rules.push_back(ttcv::make_table_rule(2, std::move(outcomes), "forced-swap"));
  }
  {
    // Random deterministic table rules drawn from each profile's efficient
    // rational candidates: plausible mechanisms, mostly manipulable.
    std::mt19937 rng(7008);
    for (int variant = 0; variant < 6; ++variant) {
      std::vector<AssignmentMatrix> outcomes;
      for (long long idx = 0; idx < Profile::space_size(2); ++idx) {
        auto candidates = ttcv::pareto_efficient_ir_assignments(Profile::from_index(2, idx));
        auto& pick = candidates[std::uniform_int_distribution<size_t>(
            0, candidates.size() - 1)(rng)];
        outcomes.push_back(AssignmentMatrix::from_permutation(pick));
      }
      rules.push_back(ttcv::make_table_rule(2, std::move(outcomes), "sampled"));
    }
  }
  int full_holds = 0, top_only = 0;
  for (const RuleOracle& rule : rules) {
    bool full = ttcv::check_sd_sp(rule).holds;
    bool top = ttcv::check_sd_top_sp(rule).holds;
    if (full) {
      ++full_holds;
      CHECK(top);
    }
    if (!full && top) ++top_only;
  }
  CHECK(full_holds > 0);  // the implication was not tested vacuously
  (void)top_only;
}

TEST_CASE("both efficiency routes agree on random bistochastic matrices") {
  std::mt19937 rng(7009);
  for (int trial = 0; trial < 400; ++trial) {
    int n = 3 + trial % 2;
    Profile profile = random_profile(rng, n);
    AssignmentMatrix matrix = random_bistochastic(rng, n, 1 + trial % 4);
    CHECK(ttcv::sd_efficient_acyclic(profile, matrix, nullptr) ==
          ttcv::sd_efficient_lp(profile, matrix, nullptr, nullptr));
  }
}

TEST_CASE("sweep partitioning does not change statistics") {
  ttcv::ExhaustiveStats serial, parallel;
  CHECK(ttcv::check_sd_sp(ttcv::make_ttc_rule(3), 4, 1, &serial).holds);
  CHECK(ttcv::check_sd_sp(ttcv::make_ttc_rule(3), 4, 4, &parallel).holds);
  CHECK(serial.profiles == parallel.profiles);
  CHECK(serial.comparisons == parallel.comparisons);
  CHECK(serial.violating_profiles == parallel.violating_profiles);
}

}  // TEST_SUITE
