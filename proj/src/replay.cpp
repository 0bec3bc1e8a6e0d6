#include "ttcv/replay.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

namespace ttcv {

namespace {

struct Replayer {
  const Certificate& cert;
  const RuleOracle& rule;
  int n;
  std::map<long long, AssignmentMatrix> evals;
  std::map<std::pair<long long, int>, int> pins;
  // Closure facts already verified, keyed (level, profile, cycle).
  std::set<std::tuple<int, long long, std::vector<int>>> closed;
  long long checks = 0;
  std::string error;

  Replayer(const Certificate& c, const RuleOracle& r) : cert(c), rule(r), n(c.n) {}

  bool fail(const std::string& msg) {
    if (error.empty()) error = msg;
    return false;
  }

  bool valid_id(long long id) const {
    return id >= 0 && id < static_cast<long long>(cert.profiles.size());
  }

  const Profile& prof(long long id) const { return cert.profiles[static_cast<size_t>(id)]; }

  const AssignmentMatrix& ev(long long id) {
    auto it = evals.find(id);
    if (it == evals.end()) {
      it = evals.emplace(id, rule.evaluate(prof(id))).first;
      if (it->second.n() != n) throw std::invalid_argument("rule returned wrong-order matrix");
    }
    return it->second;
  }

  bool add_pin(long long pid, int agent, int object) {
    auto [it, fresh] = pins.emplace(std::make_pair(pid, agent), object);
    if (!fresh && it->second != object) {
      return fail("conflicting pins for agent " + std::to_string(agent + 1));
    }
    return true;
  }

  // First object of `pref` owned by an active agent.
  static int favorite_active(const Preference& pref, const std::set<int>& active) {
    for (int pos = 0; pos < pref.n(); ++pos) {
      if (active.count(pref.object_at(pos))) return pref.object_at(pos);
    }
    return -1;
  }

  bool check_cycle_shape(long long pid, const std::vector<int>& cycle,
                         const std::set<int>& active) {
    if (cycle.size() < 2) return fail("cycle too short");
    std::set<int> members(cycle.begin(), cycle.end());
    if (members.size() != cycle.size()) return fail("cycle repeats an agent");
    for (int a : cycle) {
      if (!active.count(a)) return fail("cycle member is not active at this level");
    }
    const Profile& p = prof(pid);
    for (size_t t = 0; t < cycle.size(); ++t) {
      int i = cycle[t];
      int next = cycle[(t + 1) % cycle.size()];
      checks += 1;
      if (favorite_active(p.pref(i), active) != next) {
        return fail("agents do not trade along the claimed cycle");
      }
      // Modified shape: endowment in second place, so the upper contour of
      // the endowment is exactly {top, endowment}.
      if (p.pref(i).object_at(0) != next || p.pref(i).position_of(i) != 1) {
        return fail("cycle member is not in modified shape");
      }
    }
    return true;
  }

  bool closure_arithmetic(long long pid, const std::vector<int>& cycle) {
    const AssignmentMatrix& m = ev(pid);
    for (size_t t = 0; t < cycle.size(); ++t) {
      int i = cycle[t];
      int top = cycle[(t + 1) % cycle.size()];
      checks += 2;
      if (!(m.at(i, top) + m.at(i, i)).is_one()) {
        return fail("IR instance fails: cycle member's {top, endowment} mass is not 1");
      }
      if (!(m.at(i, top) + m.at(top, top)).is_one()) {
        return fail("cycle column is not closed by owner and predecessor");
      }
    }
    return true;
  }

  static Preference modified_pref(const Preference& pref, int endowment) {
    int top = pref.object_at(0);
    if (top == endowment) return pref;
    std::vector<int> ranking{top, endowment};
    for (int pos = 0; pos < pref.n(); ++pos) {
      int obj = pref.object_at(pos);
      if (obj != top && obj != endowment) ranking.push_back(obj);
    }
    return Preference(std::move(ranking));
  }

  static Preference pushed_pref(const Preference& pref, const std::set<int>& remaining) {
    std::vector<int> ranking;
    for (int pos = 0; pos < pref.n(); ++pos) {
      if (remaining.count(pref.object_at(pos))) ranking.push_back(pref.object_at(pos));
    }
    for (int obj = 0; obj < pref.n(); ++obj) {
      if (!remaining.count(obj)) ranking.push_back(obj);
    }
    return Preference(std::move(ranking));
  }

  bool run() {
    if (rule.n != n) return fail("rule order differs from certificate order");
    if (cert.profiles.empty() || !(prof(0) == cert.profile)) {
      return fail("certificate target must be the first table entry");
    }
    if (cert.conclusion.n() != n) return fail("conclusion has wrong order");

    std::set<int> active;
    for (int i = 0; i < n; ++i) active.insert(i);
    int level = 1;
    long long tid = 0;
    std::vector<int> assembled(static_cast<size_t>(n), -1);

    for (const DerivationStep& s : cert.steps) {
      if (!valid_id(s.profile_id)) return fail("step references a missing profile");
      if (s.level != level) return fail("steps must follow the level order");
      switch (s.kind) {
        case StepKind::SingletonIr: {
          int a = s.agent;
          if (a < 0 || a >= n || !active.count(a)) return fail("singleton agent not active");
          if (s.profile_id != tid) return fail("singleton must be argued at the level profile");
          if (s.object != a || s.cycle != std::vector<int>{a}) {
            return fail("singleton step malformed");
          }
          const Preference& p = prof(tid).pref(a);
          checks += 2;
          if (p.object_at(0) != a) {
            return fail("singleton agent does not top their endowment");
          }
          if (!ev(tid).at(a, a).is_one()) {
            return fail("IR instance fails: singleton agent does not keep their endowment");
          }
          if (s.pins != std::vector<PinFact>{{a, a}}) {
            return fail("singleton pins malformed");
          }
          if (!add_pin(tid, a, a)) return false;
          break;
        }
        case StepKind::CycleClosure: {
          // The argued profile must be the level profile with exactly the
          // cycle members' reports reshaped to [top, endowment, rest].
          const Profile& tp = prof(tid);
          const Profile& mp = prof(s.profile_id);
          std::set<int> members(s.cycle.begin(), s.cycle.end());
          for (int a = 0; a < n; ++a) {
            checks += 1;
            const Preference expect =
                members.count(a) ? modified_pref(tp.pref(a), a) : tp.pref(a);
            if (!(mp.pref(a) == expect)) {
              return fail("closure profile is not the cycle modification of the level profile");
            }
          }
          if (!check_cycle_shape(s.profile_id, s.cycle, active)) return false;
          if (!closure_arithmetic(s.profile_id, s.cycle)) return false;
          if (!s.pins.empty()) return fail("closure step must not pin rows");
          closed.insert({level, s.profile_id, s.cycle});
          break;
        }
        case StepKind::CycleEfficiency: {
          if (!closed.count({level, s.profile_id, s.cycle})) {
            return fail("efficiency step without a closure step for the same cycle");
          }
          if (!check_cycle_shape(s.profile_id, s.cycle, active)) return false;
          const AssignmentMatrix& m = ev(s.profile_id);
          if (s.pins.size() != s.cycle.size()) return fail("efficiency pins incomplete");
          for (size_t t = 0; t < s.cycle.size(); ++t) {
            int i = s.cycle[t];
            int top = s.cycle[(t + 1) % s.cycle.size()];
            checks += 1;
            if (s.pins[t].agent != i || s.pins[t].object != top) {
              return fail("efficiency pins do not match the cycle");
            }
            if (!m.at(i, top).is_one()) {
              return fail("efficiency fact fails: member does not hold their top fully");
            }
            if (!add_pin(s.profile_id, i, top)) return false;
          }
          break;
        }
        case StepKind::TopSpTransfer: {
          if (!valid_id(s.premise_profile_id)) return fail("transfer premise missing");
          const int z = static_cast<int>(s.cycle.size());
          if (z < 2 || s.chain_pos < 1 || s.chain_pos > z) return fail("transfer chain malformed");
          auto tpos_it = std::find(s.cycle.begin(), s.cycle.end(), s.chain_target);
          if (tpos_it == s.cycle.end()) return fail("chain target outside the cycle");
          int tpos = static_cast<int>(tpos_it - s.cycle.begin());
          if (s.cycle[static_cast<size_t>((tpos + s.chain_pos) % z)] != s.agent) {
            return fail("restored agent out of chain order");
          }
          const Profile& cur = prof(s.profile_id);
          const Profile& prev = prof(s.premise_profile_id);
          for (int i = 0; i < n; ++i) {
            checks += 1;
            if (i == s.agent) {
              if (cur.pref(i) == prev.pref(i)) return fail("transfer changes nothing");
            } else if (!(cur.pref(i) == prev.pref(i))) {
              return fail("transfer must change exactly one agent's report");
            }
          }
          // Both reports top the same object, so the top-object inequality
          // carries mass 1 across.
          if (cur.pref(s.agent).object_at(0) != s.object ||
              prev.pref(s.agent).object_at(0) != s.object) {
            return fail("transfer reports disagree on the top object");
          }
          auto premise_pin = pins.find({s.premise_profile_id, s.agent});
          if (premise_pin == pins.end() || premise_pin->second != s.object) {
            return fail("transfer premise pin missing");
          }
          checks += 2;
          if (!ev(s.premise_profile_id).at(s.agent, s.object).is_one()) {
            return fail("transfer premise mass is not 1");
          }
          const AssignmentMatrix& m = ev(s.profile_id);
          if (!m.at(s.agent, s.object).is_one()) {
            return fail("top-object inequality fails: restored agent loses top mass");
          }
          if (s.pins.empty() || s.pins[0].agent != s.agent || s.pins[0].object != s.object) {
            return fail("transfer pins malformed");
          }
          if (static_cast<int>(s.pins.size()) != z - s.chain_pos + 1) {
            return fail("transfer cascade incomplete");
          }
          if (!add_pin(s.profile_id, s.agent, s.object)) return false;
          int prev_agent = s.agent;
          for (size_t j = 1; j < s.pins.size(); ++j) {
            int mem = s.pins[j].agent;
            int mtop = s.pins[j].object;
            int expect = s.cycle[static_cast<size_t>((tpos + s.chain_pos + static_cast<int>(j)) % z)];
            if (mem != expect) return fail("cascade order broken");
            const Preference& p = cur.pref(mem);
            checks += 3;
            // Still-modified member: endowment second, so {top, endowment}
            // is the upper contour; predecessor already consumed the
            // member's endowment column.
            if (p.object_at(0) != mtop || p.position_of(mem) != 1) {
              return fail("cascade member is not in modified shape");
            }
            auto pred_pin = pins.find({s.profile_id, prev_agent});
            if (pred_pin == pins.end() || pred_pin->second != mem) {
              return fail("cascade predecessor does not hold this member's endowment");
            }
            if (!(m.at(mem, mtop) + m.at(mem, mem)).is_one()) {
              return fail("IR instance fails along the cascade");
            }
            if (!m.at(mem, mem).is_zero() || !m.at(mem, mtop).is_one()) {
              return fail("cascade fails to pin the member on their top");
            }
            if (!add_pin(s.profile_id, mem, mtop)) return false;
            prev_agent = mem;
          }
          if (s.chain_pos == z && s.profile_id != tid) {
            return fail("chain must end at the level profile");
          }
          break;
        }
        case StepKind::InductionReduce: {
          if (s.premise_profile_id != tid) return fail("reduction premise must be the level profile");
          if (s.removed_agents.empty()) return fail("reduction removes nobody");
          if (!std::is_sorted(s.removed_agents.begin(), s.removed_agents.end())) {
            return fail("reduction removals must be sorted");
          }
          for (int a : s.removed_agents) {
            if (!active.count(a)) return fail("reduction removes an inactive agent");
            auto it = pins.find({tid, a});
            if (it == pins.end()) return fail("reduction removes an unpinned agent");
            assembled[static_cast<size_t>(a)] = it->second;
          }
          std::set<int> remaining = active;
          for (int a : s.removed_agents) remaining.erase(a);
          if (remaining.empty()) return fail("reduction leaves an empty market");
          const Profile& t_prof = prof(tid);
          const Profile& n_prof = prof(s.profile_id);
          for (int a = 0; a < n; ++a) {
            checks += 1;
            bool was_active = active.count(a) > 0;
            bool removed_now =
                std::binary_search(s.removed_agents.begin(), s.removed_agents.end(), a);
            if (!was_active || remaining.count(a)) {
              const Preference expect = was_active ? pushed_pref(t_prof.pref(a), remaining)
                                                   : t_prof.pref(a);
              if (!(n_prof.pref(a) == expect)) return fail("reduction reshapes a report wrongly");
            } else if (removed_now) {
              if (!(n_prof.pref(a) == modified_pref(t_prof.pref(a), a))) {
                return fail("removed agent not frozen at the modified preference");
              }
            }
          }
          const AssignmentMatrix& mt = ev(tid);
          const AssignmentMatrix& mn = ev(s.profile_id);
          for (int a = 0; a < n; ++a) {
            if (remaining.count(a)) continue;
            // Block facts: at the current profile the removed agent is
            // pinned or IR-confined; at the next profile the frozen report's
            // upper contour of the endowment lies inside the block.
            const Preference& fp = n_prof.pref(a);
            Rational uc_mass;
            for (int x : fp.upper_contour(a)) {
              if (remaining.count(x)) return fail("frozen upper contour leaks out of the block");
              uc_mass += mn.at(a, x);
            }
            checks += 3;
            if (!uc_mass.is_one()) return fail("IR instance fails for a solved agent");
            Rational block_t, block_n;
            for (int y = 0; y < n; ++y) {
              if (remaining.count(y)) continue;
              block_t += mt.at(a, y);
              block_n += mn.at(a, y);
            }
            if (!block_t.is_one() || !block_n.is_one()) {
              return fail("solved agent leaks mass out of the consumed block");
            }
          }
          for (int a : remaining) {
            for (int y : remaining) {
              checks += 1;
              if (mt.at(a, y) != mn.at(a, y)) return fail("reduction projection mismatch");
            }
          }
          active = std::move(remaining);
          tid = s.profile_id;
          level += 1;
          break;
        }
      }
    }

    for (int a : active) {
      auto it = pins.find({tid, a});
      if (it == pins.end()) return fail("agent left unpinned at the final level");
      assembled[static_cast<size_t>(a)] = it->second;
    }
    for (int a = 0; a < n; ++a) {
      checks += 1;
      if (assembled[static_cast<size_t>(a)] < 0) return fail("agent never pinned");
      for (int y = 0; y < n; ++y) {
        bool expect_one = assembled[static_cast<size_t>(a)] == y;
        if (cert.conclusion.at(a, y).is_one() != expect_one ||
            (!expect_one && !cert.conclusion.at(a, y).is_zero())) {
          return fail("conclusion does not match the derived pins");
        }
      }
    }
    checks += 1;
    if (!(ev(0) == cert.conclusion)) {
      return fail("rule's outcome at the target profile differs from the conclusion");
    }
    return true;
  }
};

}  // namespace

ReplayResult replay_certificate(const Certificate& cert, const RuleOracle& rule) {
  Replayer r(cert, rule);
  ReplayResult out;
  out.valid = r.run();
  out.error = r.error;
  out.checks = r.checks;
  return out;
}

}  // namespace ttcv
