#include <algorithm>
#include <vector>

#include "doctest.h"
#include "ttcv/checkers.hpp"
#include "ttcv/ttc.hpp"

using ttcv::AssignmentMatrix;
using ttcv::Axiom;
using ttcv::AxiomReport;
using ttcv::check_sd_efficient;
using ttcv::check_sd_ir;
using ttcv::check_sd_sp;
using ttcv::check_sd_top_sp;
using ttcv::make_identity_rule;
using ttcv::make_serial_dictatorship_rule;
using ttcv::make_table_rule;
using ttcv::make_ttc_rule;
using ttcv::pareto_efficient_ir_assignments;
using ttcv::Preference;
using ttcv::Profile;
using ttcv::Rational;
using ttcv::reverify_counterexample;
using ttcv::RuleOracle;
using ttcv::ttc_matrix;

namespace {

// P1: x2 > x3 > x1, P2: x1 > x3 > x2, P3: x1 > x2 > x3.
Profile example3() {
  return Profile({Preference({1, 2, 0}), Preference({0, 2, 1}), Preference({0, 1, 2})});
}

// Identity everywhere, except one profile whose two agents swap against their
// preference: each would rather keep their endowment.
RuleOracle identity_with_forced_swap() {
  std::vector<AssignmentMatrix> outcomes;
  for (long long idx = 0; idx < Profile::space_size(2); ++idx) {
    outcomes.push_back(idx == 1 ? AssignmentMatrix::from_permutation({1, 0})
                                : AssignmentMatrix::identity(2));
  }
  return make_table_rule(2, std::move(outcomes), "forced-swap");
}

// Depends only on agent 1's report: half the mass on the reported top, half
// on the reported third choice; the other agents fill the remaining column
// mass. Misreporting the lower ranks shifts mass between an agent's second
// and third objects without moving the top-object mass, so full
// strategy-proofness fails while its top-object weakening holds.
RuleOracle below_top_shuffle_rule() {
  std::vector<AssignmentMatrix> outcomes;
  for (long long idx = 0; idx < Profile::space_size(3); ++idx) {
    Profile profile = Profile::from_index(3, idx);
    const Preference& reported = profile.pref(0);
    int top = reported.object_at(0), mid = reported.object_at(1), low = reported.object_at(2);
    std::vector<Rational> entries(9, Rational(0));
    auto at = [&entries](int agent, int object) -> Rational& {
      return entries[static_cast<size_t>(agent) * 3 + static_cast<size_t>(object)];
    };
    at(0, top) = Rational(1, 2);
    at(0, low) = Rational(1, 2);
    for (int agent : {1, 2}) {
      at(agent, top) = Rational(1, 4);
      at(agent, low) = Rational(1, 4);
      at(agent, mid) = Rational(1, 2);
    }
    outcomes.emplace_back(3, std::move(entries));
  }
  return make_table_rule(3, std::move(outcomes), "below-top-shuffle");
}

}  // namespace

TEST_CASE("individual rationality accepts the identity and the worked outcome") {
  for (long long idx = 0; idx < Profile::space_size(3); ++idx) {
    Profile profile = Profile::from_index(3, idx);
    CHECK(check_sd_ir(profile, AssignmentMatrix::identity(3)).holds);
  }
  CHECK(check_sd_ir(example3(), ttc_matrix(example3())).holds);
}

TEST_CASE("an agent handed less than their endowment is a rationality counterexample") {
  Profile p({Preference({1, 0}), Preference({1, 0})});
  AssignmentMatrix swapped = AssignmentMatrix::from_permutation({1, 0});
  AxiomReport report = check_sd_ir(p, swapped);
  CHECK_FALSE(report.holds);
  REQUIRE(report.counterexample.has_value());
  CHECK(report.counterexample->agent == 1);
  CHECK(reverify_counterexample(report, nullptr, &swapped));
}

TEST_CASE("efficiency accepts the worked outcome through both routes") {
  AxiomReport report = check_sd_efficient(example3(), ttc_matrix(example3()));
  CHECK(report.holds);
  CHECK(ttcv::sd_efficient_lp(example3(), ttc_matrix(example3()), nullptr, nullptr));
}

TEST_CASE("a blocked mutually improving swap is an efficiency counterexample") {
  Profile p({Preference({1, 0}), Preference({0, 1})});
  AssignmentMatrix identity = AssignmentMatrix::identity(2);
  AxiomReport report = check_sd_efficient(p, identity);
  CHECK_FALSE(report.holds);
  REQUIRE(report.counterexample.has_value());
  REQUIRE(report.counterexample->object_cycle.has_value());
  REQUIRE(report.counterexample->dominating.has_value());
  CHECK(*report.counterexample->dominating == AssignmentMatrix::from_permutation({1, 0}));
  CHECK(reverify_counterexample(report, nullptr, &identity));
}

TEST_CASE("a uniform matrix is efficient under unanimous preferences") {
  Profile common({Preference({0, 1, 2}), Preference({0, 1, 2}), Preference({0, 1, 2})});
  AssignmentMatrix uniform(3, std::vector<Rational>(9, Rational(1, 3)));
  CHECK(check_sd_efficient(common, uniform).holds);
}

TEST_CASE("the trading-cycles rule is strategy-proof at small sizes") {
  ttcv::ExhaustiveStats stats;
  AxiomReport two = check_sd_sp(make_ttc_rule(2), 4, 1, &stats);
  CHECK(two.holds);
  CHECK(stats.profiles == 4);
  CHECK(stats.comparisons == 4 * 2 * 1);
  CHECK(stats.violating_profiles == 0);

  AxiomReport three = check_sd_sp(make_ttc_rule(3), 4, 1, &stats);
  CHECK(three.holds);
  CHECK(stats.profiles == 216);
  CHECK(stats.comparisons == 216 * 3 * 5);
}

TEST_CASE("a rule swapping two agents against their will is caught by the sweep") {
  RuleOracle rule = identity_with_forced_swap();
  AxiomReport report = check_sd_sp(rule);
  CHECK_FALSE(report.holds);
  REQUIRE(report.counterexample.has_value());
  // First hit in scan order: at the all-truthful profile the rule returns the
  // identity, and agent 2 can misreport into the swapping profile to steal
  // the contested object.
  CHECK(report.counterexample->profile_index == 0);
  CHECK(report.counterexample->agent == 1);
  CHECK(report.counterexample->misreport == Preference({1, 0}));
  CHECK(reverify_counterexample(report, &rule, nullptr));

  // The same deviation moves top-object mass, so the weaker check fires too.
  AxiomReport top = check_sd_top_sp(rule);
  CHECK_FALSE(top.holds);
  CHECK(reverify_counterexample(top, &rule, nullptr));
}

TEST_CASE("shuffling mass below the tops defeats only the full sweep") {
  RuleOracle rule = below_top_shuffle_rule();
  AxiomReport full = check_sd_sp(rule);
  CHECK_FALSE(full.holds);
  REQUIRE(full.counterexample.has_value());
  CHECK(full.counterexample->agent == 0);
  CHECK(reverify_counterexample(full, &rule, nullptr));

  AxiomReport top = check_sd_top_sp(rule);
  CHECK(top.holds);
}

TEST_CASE("sweep counterexamples restate the exact failing comparison") {
  AxiomReport report = check_sd_sp(identity_with_forced_swap());
  REQUIRE(report.counterexample.has_value());
  const auto& ce = *report.counterexample;
  REQUIRE(ce.profile.has_value());
  REQUIRE(ce.agent.has_value());
  REQUIRE(ce.misreport.has_value());
  // Replaying the named single comparison by hand: the misreport row must
  // not be weakly dominated by the truthful row.
  RuleOracle rule = identity_with_forced_swap();
  AssignmentMatrix truthful = rule.evaluate(*ce.profile);
  AssignmentMatrix lied = rule.evaluate(ce.profile->with_pref(*ce.agent, *ce.misreport));
  auto verdict = ttcv::sd_compare(ce.profile->pref(*ce.agent), truthful.row(*ce.agent),
                                  lied.row(*ce.agent));
  CHECK_FALSE(verdict.weakly_dominates());
}

TEST_CASE("candidate filtering keeps exactly the rational efficient permutations") {
  auto candidates = pareto_efficient_ir_assignments(example3());
  REQUIRE(candidates.size() == 3);
  CHECK(candidates[0] == std::vector<int>{1, 0, 2});
  CHECK(candidates[1] == std::vector<int>{1, 2, 0});
  CHECK(candidates[2] == std::vector<int>{2, 0, 1});
  CHECK(std::find(candidates.begin(), candidates.end(),
                  ttcv::ttc_assignment(example3())) != candidates.end());

  Profile own_top({Preference({0, 1, 2}), Preference({1, 0, 2}), Preference({2, 1, 0})});
  auto forced = pareto_efficient_ir_assignments(own_top);
  REQUIRE(forced.size() == 1);
  CHECK(forced[0] == std::vector<int>{0, 1, 2});

  Profile opposed({Preference({1, 0}), Preference({0, 1})});
  auto swap_only = pareto_efficient_ir_assignments(opposed);
  REQUIRE(swap_only.size() == 1);
  CHECK(swap_only[0] == std::vector<int>{1, 0});
}

TEST_CASE("the filter agrees with the two per-matrix checkers on every candidate") {
  for (long long idx = 0; idx < Profile::space_size(3); ++idx) {
    Profile profile = Profile::from_index(3, idx);
    auto candidates = pareto_efficient_ir_assignments(profile);
    std::vector<int> perm{0, 1, 2};
    do {
      AssignmentMatrix m = AssignmentMatrix::from_permutation(perm);
      bool kept = std::find(candidates.begin(), candidates.end(), perm) != candidates.end();
      CHECK(kept == (check_sd_ir(profile, m).holds && check_sd_efficient(profile, m).holds));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("permutation fast paths match the matrix checkers everywhere") {
  for (long long idx = 0; idx < Profile::space_size(3); ++idx) {
    Profile profile = Profile::from_index(3, idx);
    std::vector<int> perm{0, 1, 2};
    do {
      AssignmentMatrix m = AssignmentMatrix::from_permutation(perm);
      CHECK(ttcv::sd_ir_permutation(profile, perm, nullptr) == check_sd_ir(profile, m).holds);
      CHECK(ttcv::sd_efficient_permutation(profile, perm, nullptr) ==
            check_sd_efficient(profile, m).holds);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST_CASE("dictatorship by agent order tramples on endowments") {
  RuleOracle dictator = make_serial_dictatorship_rule(2);
  // Both agents favor x2; the first agent grabs it, robbing its owner.
  Profile p({Preference({1, 0}), Preference({1, 0})});
  AssignmentMatrix outcome = dictator.evaluate(p);
  CHECK(outcome == AssignmentMatrix::from_permutation({1, 0}));
  AxiomReport report = check_sd_ir(p, outcome);
  CHECK_FALSE(report.holds);
  CHECK(reverify_counterexample(report, nullptr, &outcome));
}

TEST_CASE("the constant identity rule is strategy-proof but inefficient") {
  RuleOracle identity = make_identity_rule(3);
  CHECK(check_sd_sp(identity).holds);
  CHECK(check_sd_top_sp(identity).holds);
  Profile p({Preference({1, 0, 2}), Preference({0, 1, 2}), Preference({2, 0, 1})});
  CHECK_FALSE(check_sd_efficient(p, identity.evaluate(p)).holds);
}

TEST_CASE("parallel sweeps report the same first counterexample as serial ones") {
  RuleOracle rule = identity_with_forced_swap();
  AxiomReport serial = check_sd_sp(rule, 4, 1);
  AxiomReport parallel = check_sd_sp(rule, 4, 4);
  REQUIRE(serial.counterexample.has_value());
  REQUIRE(parallel.counterexample.has_value());
  CHECK(serial.counterexample->profile_index == parallel.counterexample->profile_index);
  CHECK(serial.counterexample->agent == parallel.counterexample->agent);
  CHECK((serial.counterexample->misreport == parallel.counterexample->misreport));

  ttcv::ExhaustiveStats serial_stats, parallel_stats;
  CHECK(check_sd_top_sp(make_ttc_rule(3), 4, 1, &serial_stats).holds);
  CHECK(check_sd_top_sp(make_ttc_rule(3), 4, 3, &parallel_stats).holds);
  CHECK(serial_stats.profiles == parallel_stats.profiles);
  CHECK(serial_stats.comparisons == parallel_stats.comparisons);
}

TEST_CASE("table rules must cover the whole space with the right size") {
  CHECK_THROWS_AS(make_table_rule(2, std::vector<AssignmentMatrix>{AssignmentMatrix::identity(2)},
                                  "short"),
                  std::invalid_argument);
  std::vector<AssignmentMatrix> wrong_n(4, AssignmentMatrix::identity(3));
  CHECK_THROWS_AS(make_table_rule(2, std::move(wrong_n), "misshapen"), std::invalid_argument);
}
