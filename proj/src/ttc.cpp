#include "ttcv/ttc.hpp"

#include <algorithm>
#include <stdexcept>

namespace ttcv {

TradingGraph build_graph(const Profile& profile, const std::vector<int>& active) {
  const int n = profile.n();
  if (active.empty()) throw std::invalid_argument("build_graph: empty active set");
  std::vector<bool> is_active(n, false);
  for (int i : active) {
    if (i < 0 || i >= n || is_active[i]) {
      throw std::invalid_argument("build_graph: active set is not a set of agents");
    }
    is_active[i] = true;
  }
  TradingGraph g;
  g.active = active;
  std::sort(g.active.begin(), g.active.end());
  g.successor.assign(n, -1);
  for (int i : g.active) {
    const Preference& p = profile.pref(i);
    for (int k = 0; k < n; ++k) {
      const int x = p.object_at(k);
      if (is_active[x]) {  // object x is present iff its owner is active
        g.successor[i] = x;
        break;
      }
    }
  }
  return g;
}

std::vector<std::vector<int>> find_cycles(const TradingGraph& graph) {
  const int n = static_cast<int>(graph.successor.size());
  std::vector<int> state(n, 0);  // 0 unvisited, 1 on current walk, 2 done
  std::vector<std::vector<int>> cycles;
  for (int start : graph.active) {
    if (state[start] != 0) continue;
    std::vector<int> walk;
    int cur = start;
    while (state[cur] == 0) {
      state[cur] = 1;
      walk.push_back(cur);
      cur = graph.successor[cur];
    }
    if (state[cur] == 1) {
      // The walk closed on itself; everything from cur onward is the cycle.
      auto begin = std::find(walk.begin(), walk.end(), cur);
      std::vector<int> cycle(begin, walk.end());
      const auto min_it = std::min_element(cycle.begin(), cycle.end());
      std::rotate(cycle.begin(), min_it, cycle.end());
      cycles.push_back(std::move(cycle));
    }
    for (int i : walk) state[i] = 2;
  }
  std::sort(cycles.begin(), cycles.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return cycles;
}

TtcResult run_ttc(const Profile& profile, RoundMode mode) {
  const int n = profile.n();
  TtcResult result;
  result.assignment.assign(n, -1);
  std::vector<int> active(n);
  for (int i = 0; i < n; ++i) active[i] = i;
  int round = 0;
  while (!active.empty()) {
    TradingGraph graph = build_graph(profile, active);
    std::vector<std::vector<int>> cycles = find_cycles(graph);
    if (mode == RoundMode::SmallestCycleOnly) {
      // find_cycles sorts by smallest member, so the first shortest cycle is
      // the one containing the smallest agent among the shortest.
      size_t pick = 0;
      for (size_t c = 1; c < cycles.size(); ++c) {
        if (cycles[c].size() < cycles[pick].size()) pick = c;
      }
      cycles = {cycles[pick]};
    }
    TtcRound record;
    record.round = ++round;
    record.cycles = cycles;
    std::vector<bool> leaving(n, false);
    for (const std::vector<int>& cycle : cycles) {
      for (int i : cycle) {
        result.assignment[i] = graph.successor[i];
        record.assignments.emplace_back(i, graph.successor[i]);
        leaving[i] = true;
      }
    }
    result.trace.rounds.push_back(std::move(record));
    std::vector<int> remaining;
    remaining.reserve(active.size());
    for (int i : active) {
      if (!leaving[i]) remaining.push_back(i);
    }
    active = std::move(remaining);
  }
  return result;
}

std::vector<int> ttc_assignment(const Profile& profile, RoundMode mode) {
  return run_ttc(profile, mode).assignment;
}

AssignmentMatrix ttc_matrix(const Profile& profile, RoundMode mode) {
  return AssignmentMatrix::from_permutation(ttc_assignment(profile, mode));
}

}  // namespace ttcv
