#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ttcv/checkers.hpp"
#include "ttcv/core.hpp"

namespace ttcv {

// One derivation pins a rule's output at a profile to the trading-cycles
// outcome using only three ingredients: individual-rationality instances,
// efficiency instances, and top-object misreport inequalities. Every step
// names the auxiliary profile it argues at; profiles live in a shared table
// so certificates stay compact and replayable.

enum class StepKind {
  SingletonIr,      // agent tops their own endowment: one IR instance pins the row
  CycleClosure,     // at the modified profile, cycle mass stays inside the cycle
  CycleEfficiency,  // efficiency forces every cycle member onto their top
  TopSpTransfer,    // one member's true preference restored; top mass carried over
  InductionReduce,  // solved agents leave; remaining market re-posed
};

const char* step_kind_name(StepKind k);

struct PinFact {
  int agent = -1;
  int object = -1;  // the agent's row is the degenerate lottery on this object

  bool operator==(const PinFact&) const = default;
};

struct DerivationStep {
  StepKind kind;
  int level = 1;                      // 1-based trading round / recursion depth
  long long profile_id = -1;          // index into Certificate::profiles
  std::vector<int> cycle;             // members, smallest agent first
  int agent = -1;                     // SingletonIr / TopSpTransfer subject
  int object = -1;                    // the object pinned for `agent`
  int chain_target = -1;              // TopSpTransfer: member this chain ends on
  int chain_pos = 0;                  // TopSpTransfer: position k within the chain
  long long premise_profile_id = -1;  // TopSpTransfer / InductionReduce premise
  std::vector<PinFact> pins;          // rows established at profile_id
  std::vector<int> removed_agents;    // InductionReduce: agents leaving, sorted

  bool operator==(const DerivationStep&) const = default;
};

struct Certificate {
  int n = 0;
  std::string rule_name;
  Profile profile;                // the target profile; equals profiles[0]
  std::vector<Profile> profiles;  // auxiliary profile table
  std::vector<DerivationStep> steps;
  AssignmentMatrix conclusion;    // the pinned outcome at `profile`
  std::vector<std::string> notes;

  bool operator==(const Certificate&) const = default;
};

struct DerivationFailure {
  std::string message;  // names the first failing instance
  std::optional<StepKind> step_kind;
  std::optional<long long> profile_id;
  std::optional<AssignmentMatrix> witness;  // efficiency: a dominating matrix
};

struct DerivationResult {
  std::optional<Certificate> certificate;
  std::optional<DerivationFailure> failure;

  bool ok() const { return certificate.has_value(); }
};

// The modified profile: every cycle member's preference becomes
// [their top, their endowment, the rest in prior order]; non-members keep
// theirs. The trading graph is unchanged by construction (asserted).
// Throws std::invalid_argument unless `cycle` is a non-singleton cycle of
// the profile's trading graph.
Profile modified_profile(const Profile& profile, const std::vector<int>& cycle);

struct VerifyOutcome {
  bool ok = false;
  std::string detail;
  std::optional<AssignmentMatrix> witness;
};

// Standalone verifications of the three stages for a top-round cycle of
// `profile`. derive_profile composes the same logic across rounds.
//
// Closure: at the modified profile, each member's mass on {top, endowment}
// is 1 (an IR instance: that pair is the member's upper contour of their
// endowment there), hence predecessor+owner close every cycle column.
VerifyOutcome derive_cycle_closure(const Profile& profile, const std::vector<int>& cycle,
                                   const RuleOracle& rule);
// Efficiency: given closure, anything short of mass 1 on tops is dominated
// by the matrix that rotates the cycle fully (returned as witness on failure).
VerifyOutcome derive_cycle_efficiency(const Profile& profile, const std::vector<int>& cycle,
                                      const RuleOracle& rule);
// Chains: members' true preferences are restored one at a time. A restored
// member keeps top mass 1 (misreporting back would raise it: the top-object
// inequality), and the still-modified tail re-pins by IR cascade. One chain
// per ending member, because a chain only re-pins members restored last;
// the first chain restores in cycle order from the smallest agent.
VerifyOutcome derive_top_sp_chain(const Profile& profile, const std::vector<int>& cycle,
                                  const RuleOracle& rule);

DerivationResult derive_profile(const Profile& profile, const RuleOracle& rule);

}  // namespace ttcv
