#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ttcv/checkers.hpp"
#include "ttcv/derivation.hpp"
#include "ttcv/replay.hpp"

namespace ttcv {

// All (n!)^n profiles in lexicographic order: agent 0's preference index is
// the most significant digit, base n!.
class ProfileSpace {
 public:
  explicit ProfileSpace(int n) : n_(n), size_(Profile::space_size(n)) {}

  int n() const { return n_; }
  long long size() const { return size_; }
  Profile at(long long index) const { return Profile::from_index(n_, index); }

 private:
  int n_;
  long long size_;
};

struct AxiomTally {
  Axiom axiom;
  long long passed = 0;
  long long failed = 0;  // passed + failed == space size
};

struct CertifyFailure {
  long long profile_index = -1;
  std::string stage;  // failing step kind, or "replay"
  std::string message;
};

// One summary for any batch task; sections a task does not produce stay
// empty. Identical inputs give identical contents apart from wall_seconds.
struct BatchResult {
  std::string task;
  int n = 0;
  std::string rule_name;
  long long space_size = 0;
  bool ok = false;
  std::string detail;

  std::vector<AxiomTally> tallies;
  std::vector<AxiomReport> counterexamples;  // capped; tallies hold full counts

  long long certificates_total = 0;
  long long certificates_valid = 0;
  long long replays_valid = 0;
  long long replay_checks = 0;
  std::vector<CertifyFailure> failures;  // capped; counts above are full

  long long survivors = -1;  // uniqueness search only
  bool survivor_is_ttc = false;

  double wall_seconds = 0.0;
};

// Checks the trading-cycles outcome at every profile for individual
// rationality and efficiency, then sweeps every misreport for full and
// top-object strategy-proofness. ok iff all four tallies have zero failures.
BatchResult verify_ttc_axioms(int n, int jobs = 1);

// The same four checks against an arbitrary rule.
BatchResult verify_rule_axioms(const RuleOracle& rule, int jobs = 1);

struct UniquenessOptions {
  // When >= 0, that profile's candidate set is restricted to outcomes that
  // differ from the trading-cycles one; the search must then dead-end.
  long long forced_deviation_profile = -1;
};

// Searches every deterministic rule whose per-profile outcome is efficient
// and individually rational, propagating the cross-profile constraint that a
// misreport may never gain an agent their truthful top object. Exhaustive:
// counts all surviving rules. ok iff exactly one rule survives and it equals
// the trading-cycles outcomes pointwise (with a forced deviation: iff none
// survives). Requires 2 <= n <= 3.
BatchResult verify_uniqueness_deterministic(int n, const UniquenessOptions& options = {});

struct CertifyOptions {
  int jobs = 1;
  // Invoked in profile order for every certificate that derives.
  std::function<void(long long, const Certificate&)> on_certificate;
};

// Derives a certificate at every profile and replays each one independently.
// ok iff every profile yields a certificate and every replay validates.
BatchResult certify_all(int n, const RuleOracle& rule, const CertifyOptions& options = {});

}  // namespace ttcv
