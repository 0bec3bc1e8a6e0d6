#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ttcv/core.hpp"
#include "ttcv/sd.hpp"

namespace ttcv {

// A (possibly probabilistic) assignment rule: total on all (n!)^n profiles.
// evaluate must be pure and thread-safe; exhaustive checkers call it from
// worker threads.
struct RuleOracle {
  int n = 0;
  std::string name;
  std::function<AssignmentMatrix(const Profile&)> evaluate;
};

RuleOracle make_ttc_rule(int n);
RuleOracle make_identity_rule(int n);
// Picks in agent order, each taking their favorite remaining object;
// endowments are ignored entirely. Violates individual rationality.
RuleOracle make_serial_dictatorship_rule(int n);
// outcomes_by_profile_index must have exactly Profile::space_size(n) entries.
RuleOracle make_table_rule(int n, std::vector<AssignmentMatrix> outcomes_by_profile_index,
                           std::string name = "table");

enum class Axiom {
  SdEfficiency,
  SdIndividualRationality,
  SdStrategyProofness,
  SdTopStrategyProofness,
};

const char* axiom_name(Axiom a);

struct AxiomCounterexample {
  std::optional<long long> profile_index;
  std::optional<Profile> profile;
  std::optional<int> agent;
  std::optional<Preference> misreport;
  std::optional<int> witness_object;
  std::optional<AssignmentMatrix> dominating;    // efficiency: dominating matrix
  std::optional<std::vector<int>> object_cycle;  // efficiency: relation cycle
  std::string detail;
};

struct AxiomReport {
  Axiom axiom;
  bool holds = true;
  std::optional<AxiomCounterexample> counterexample;
};

struct ExhaustiveStats {
  long long profiles = 0;
  long long comparisons = 0;
  long long violating_profiles = 0;
};

// Individual rationality: every agent's row weakly dominates the degenerate
// lottery on their endowment; equivalently each row puts mass 1 on
// upper_contour(endowment).
AxiomReport check_sd_ir(const Profile& profile, const AssignmentMatrix& matrix);

// Efficiency: no bistochastic matrix whose rows all weakly dominate, one of
// them strictly. Decided by acyclicity of the object improvement relation
// (x -> y when some agent holds mass on y but ranks x above it); the exact
// LP below is an independent oracle for the same predicate, and the test
// suite holds the two routes to exact agreement.
AxiomReport check_sd_efficient(const Profile& profile, const AssignmentMatrix& matrix);

bool sd_efficient_acyclic(const Profile& profile, const AssignmentMatrix& matrix,
                          std::vector<int>* cycle_out = nullptr);

// Maximizes total upper-contour slack over the bistochastic polytope subject
// to never falling below `matrix`'s upper-contour sums. Efficient iff the
// optimum slack is zero. Optionally returns the slack and a dominating matrix.
bool sd_efficient_lp(const Profile& profile, const AssignmentMatrix& matrix,
                     Rational* slack_out = nullptr,
                     std::optional<AssignmentMatrix>* dominator_out = nullptr);

// Strategy-proofness checked exhaustively: all profiles, all agents, all
// n!-1 misreports; a violation is a misreport row that strictly sd-dominates
// the truthful row under the true preference.
// Throws std::invalid_argument when rule.n exceeds exhaustion_bound.
AxiomReport check_sd_sp(const RuleOracle& rule, int exhaustion_bound = 4, int jobs = 1,
                        ExhaustiveStats* stats = nullptr);

// Same sweep, but only the probability of the truthful top object may not rise.
AxiomReport check_sd_top_sp(const RuleOracle& rule, int exhaustion_bound = 4, int jobs = 1,
                            ExhaustiveStats* stats = nullptr);

// All permutation assignments that are individually rational and efficient at
// `profile`, in lexicographic permutation order. Deterministic candidates
// suffice: a dominated permutation is always dominated through the object
// relation, so the acyclicity criterion decides efficiency here too.
std::vector<std::vector<int>> pareto_efficient_ir_assignments(const Profile& profile);

// Permutation fast paths; equal by definition to the matrix checks on
// from_permutation (asserted by tests).
bool sd_ir_permutation(const Profile& profile, const std::vector<int>& perm,
                       int* violating_agent = nullptr);
bool sd_efficient_permutation(const Profile& profile, const std::vector<int>& perm,
                              std::vector<int>* cycle_out = nullptr);

// Rebuilds the one comparison a counterexample names and confirms it still
// violates the axiom. `rule` is needed for the strategy-proofness axioms,
// `matrix` for efficiency / individual rationality.
bool reverify_counterexample(const AxiomReport& report, const RuleOracle* rule,
                             const AssignmentMatrix* matrix);

// The explicit dominating matrix induced by an object-relation cycle: along
// each edge x -> y the witness agent holding y moves epsilon of mass from y
// up to x, with epsilon the smallest such holding on the cycle.
AssignmentMatrix dominating_matrix_from_cycle(const Profile& profile,
                                              const AssignmentMatrix& matrix,
                                              const std::vector<int>& object_cycle);

}  // namespace ttcv
