#pragma once

#include <optional>

#include "ttcv/core.hpp"

namespace ttcv {

// First-order stochastic dominance with respect to one agent's strict
// preference: lhs weakly dominates rhs iff, for every object x, lhs puts at
// least as much mass as rhs on the upper contour of x. Comparisons scan
// cumulative sums in preference order, so each call is O(n) arithmetic.
enum class SdRelation {
  StrictlyPreferred,         // all cumulative sums >=, at least one >
  Equivalent,                // all cumulative sums equal (iff lotteries equal)
  WeaklyPreferredNotStrict,  // never produced: coincides with Equivalent
  StrictlyDominated,         // all cumulative sums <=, at least one <
  Incomparable,              // strict inequalities in both directions
};

const char* sd_relation_name(SdRelation r);

struct DominanceVerdict {
  SdRelation relation;
  // For StrictlyPreferred / StrictlyDominated: the first object (in
  // preference order) whose cumulative sums differ. For Incomparable: the
  // object at which the second direction appeared, completing the verdict.
  std::optional<int> witness;

  bool weakly_dominates() const {
    return relation == SdRelation::StrictlyPreferred || relation == SdRelation::Equivalent ||
           relation == SdRelation::WeaklyPreferredNotStrict;
  }
};

// Throws std::invalid_argument when either argument is not a length-n lottery.
DominanceVerdict sd_compare(const Preference& pref, const Lottery& lhs, const Lottery& rhs);

// sd_compare specialized to two degenerate lotteries; agrees with sd_compare
// on the corresponding delta lotteries but costs two rank lookups.
DominanceVerdict sd_compare_degenerate(const Preference& pref, int lhs_object, int rhs_object);

// True iff `lottery` weakly dominates the degenerate lottery on `target`,
// equivalently iff it puts mass exactly 1 on upper_contour(target).
bool sd_dominates_degenerate(const Preference& pref, const Lottery& lottery, int target);

}  // namespace ttcv
