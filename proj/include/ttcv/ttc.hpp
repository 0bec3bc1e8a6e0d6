#pragma once

#include <utility>
#include <vector>

#include "ttcv/core.hpp"

namespace ttcv {

// One round's pointer structure: every active agent points at the owner of
// their most preferred object still present. With canonical endowments the
// owner of object x is agent x, so successor values double as object ids.
struct TradingGraph {
  std::vector<int> active;     // sorted agent ids
  std::vector<int> successor;  // size n; -1 for inactive agents
};

TradingGraph build_graph(const Profile& profile, const std::vector<int>& active);

// Cycles of the pointer map. Every functional graph has at least one; cycles
// are node-disjoint. Each cycle is listed in successor order starting at its
// smallest agent; cycles are sorted by that agent.
std::vector<std::vector<int>> find_cycles(const TradingGraph& graph);

// AllCycles clears every cycle found in a round. SmallestCycleOnly clears one
// cycle per round: the shortest, tie-broken by smallest agent id. Both modes
// produce the same assignment; the trace differs.
enum class RoundMode { AllCycles, SmallestCycleOnly };

struct TtcRound {
  int round = 0;  // 1-based
  std::vector<std::vector<int>> cycles;            // cleared this round
  std::vector<std::pair<int, int>> assignments;    // (agent, object) pairs
};

struct TtcTrace {
  std::vector<TtcRound> rounds;
};

struct TtcResult {
  std::vector<int> assignment;  // agent -> object
  TtcTrace trace;
};

// Top trading cycles from the canonical endowment: each cycle member receives
// the object their pointer targets, then leaves with it.
TtcResult run_ttc(const Profile& profile, RoundMode mode = RoundMode::AllCycles);

std::vector<int> ttc_assignment(const Profile& profile, RoundMode mode = RoundMode::AllCycles);

AssignmentMatrix ttc_matrix(const Profile& profile, RoundMode mode = RoundMode::AllCycles);

}  // namespace ttcv
