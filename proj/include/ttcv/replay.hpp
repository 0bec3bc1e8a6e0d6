#pragma once

#include <string>

#include "ttcv/checkers.hpp"
#include "ttcv/derivation.hpp"

namespace ttcv {

struct ReplayResult {
  bool valid = false;
  std::string error;    // first failing check, empty when valid
  long long checks = 0; // individual facts verified
};

// Re-validates a certificate without trusting the engine that produced it.
// The replayer re-evaluates the rule at every referenced profile and accepts
// only three kinds of justification: individual-rationality instances
// (mass 1 on an upper contour it recomputes itself), top-object transfer
// inequalities between two profiles differing in one agent's report, and
// plain column/block arithmetic on evaluated matrices. Structural claims
// (cycle shape, profile modifications, reduction layout) are recomputed from
// the profile table, never taken from the steps.
ReplayResult replay_certificate(const Certificate& cert, const RuleOracle& rule);

}  // namespace ttcv
