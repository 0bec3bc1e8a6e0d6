#include "ttcv/sd.hpp"

#include <stdexcept>

namespace ttcv {

const char* sd_relation_name(SdRelation r) {
  switch (r) {
    case SdRelation::StrictlyPreferred: return "strictly-preferred";
    case SdRelation::Equivalent: return "equivalent";
    case SdRelation::WeaklyPreferredNotStrict: return "weakly-preferred-not-strict";
    case SdRelation::StrictlyDominated: return "strictly-dominated";
    case SdRelation::Incomparable: return "incomparable";
  }
  return "?";
}

DominanceVerdict sd_compare(const Preference& pref, const Lottery& lhs, const Lottery& rhs) {
  const int n = pref.n();
  if (static_cast<int>(lhs.size()) != n || !is_lottery(lhs)) {
    throw std::invalid_argument("sd_compare: lhs is not a lottery over n objects");
  }
  if (static_cast<int>(rhs.size()) != n || !is_lottery(rhs)) {
    throw std::invalid_argument("sd_compare: rhs is not a lottery over n objects");
  }
  Rational lhs_cum, rhs_cum;
  std::optional<int> first_gt, first_lt;
  std::optional<int> witness;
  for (int k = 0; k < n; ++k) {
    const int x = pref.object_at(k);
    lhs_cum += lhs[x];
    rhs_cum += rhs[x];
    if (lhs_cum > rhs_cum && !first_gt) {
      first_gt = x;
      if (first_lt && !witness) witness = x;
    } else if (lhs_cum < rhs_cum && !first_lt) {
      first_lt = x;
      if (first_gt && !witness) witness = x;
    }
  }
  if (first_gt && first_lt) return {SdRelation::Incomparable, witness};
  if (first_gt) return {SdRelation::StrictlyPreferred, first_gt};
  if (first_lt) return {SdRelation::StrictlyDominated, first_lt};
  return {SdRelation::Equivalent, std::nullopt};
}

DominanceVerdict sd_compare_degenerate(const Preference& pref, int lhs_object, int rhs_object) {
  const int lhs_rank = pref.rank(lhs_object);
  const int rhs_rank = pref.rank(rhs_object);
  if (lhs_rank == rhs_rank) return {SdRelation::Equivalent, std::nullopt};
  if (lhs_rank < rhs_rank) return {SdRelation::StrictlyPreferred, lhs_object};
  return {SdRelation::StrictlyDominated, rhs_object};
}

bool sd_dominates_degenerate(const Preference& pref, const Lottery& lottery, int target) {
  if (static_cast<int>(lottery.size()) != pref.n() || !is_lottery(lottery)) {
    throw std::invalid_argument("sd_dominates_degenerate: not a lottery over n objects");
  }
  Rational mass;
  for (int x : pref.upper_contour(target)) mass += lottery[x];
  return mass.is_one();
}

}  // namespace ttcv
