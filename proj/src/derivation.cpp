#include "ttcv/derivation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "ttcv/ttc.hpp"

namespace ttcv {

namespace {

std::string agent_label(int a) { return "agent " + std::to_string(a + 1); }
std::string object_label(int x) { return "object " + std::to_string(x + 1); }

// [top, endowment, rest in prior order]; identical preference when the agent
// already tops their endowment.
Preference p_prime_style(const Preference& pref, int endowment) {
  int top = pref.object_at(0);
  if (top == endowment) return pref;
  std::vector<int> ranking{top, endowment};
  for (int pos = 0; pos < pref.n(); ++pos) {
    int obj = pref.object_at(pos);
    if (obj != top && obj != endowment) ranking.push_back(obj);
  }
  return Preference(std::move(ranking));
}

// Keeps the order on remaining objects, moves consumed objects to the bottom
// in ascending order.
Preference bottom_push(const Preference& pref, const std::set<int>& remaining) {
  std::vector<int> ranking;
  ranking.reserve(static_cast<size_t>(pref.n()));
  for (int pos = 0; pos < pref.n(); ++pos) {
    int obj = pref.object_at(pos);
    if (remaining.count(obj)) ranking.push_back(obj);
  }
  for (int obj = 0; obj < pref.n(); ++obj) {
    if (!remaining.count(obj)) ranking.push_back(obj);
  }
  return Preference(std::move(ranking));
}

Profile modified_profile_for(const Profile& profile, const std::vector<int>& cycle,
                             const std::vector<int>& active) {
  if (cycle.size() < 2) {
    throw std::invalid_argument("modified profile needs a non-singleton cycle");
  }
  TradingGraph g = build_graph(profile, active);
  std::set<int> seen;
  for (size_t t = 0; t < cycle.size(); ++t) {
    int i = cycle[t];
    int next = cycle[(t + 1) % cycle.size()];
    if (i < 0 || i >= profile.n() || !seen.insert(i).second) {
      throw std::invalid_argument("cycle members must be distinct agents");
    }
    if (g.successor[static_cast<size_t>(i)] != next) {
      throw std::invalid_argument("not a cycle of the trading graph");
    }
  }
  Profile out = profile;
  for (int i : cycle) out = out.with_pref(i, p_prime_style(profile.pref(i), i));
  TradingGraph g2 = build_graph(out, active);
  if (g2.successor != g.successor) {
    throw std::logic_error("modification must preserve the trading graph");
  }
  return out;
}

struct Engine {
  const RuleOracle& rule;
  int n;
  std::vector<Profile> profiles;
  std::vector<AssignmentMatrix> evals;
  std::map<std::vector<int>, long long> ids;
  std::vector<DerivationStep> steps;
  std::map<std::pair<long long, int>, int> pin;  // (profile id, agent) -> object
  std::optional<DerivationFailure> failure;

  Engine(const RuleOracle& r, int size) : rule(r), n(size) {}

  long long intern(const Profile& p) {
    std::vector<int> key;
    key.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      const auto& r = p.pref(i).ranking();
      key.insert(key.end(), r.begin(), r.end());
    }
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    AssignmentMatrix m = rule.evaluate(p);
    if (m.n() != n) throw std::invalid_argument("rule returned a matrix of the wrong order");
    long long id = static_cast<long long>(profiles.size());
    profiles.push_back(p);
    evals.push_back(std::move(m));
    ids.emplace(std::move(key), id);
    return id;
  }

  const AssignmentMatrix& eval(long long id) { return evals[static_cast<size_t>(id)]; }
  const Profile& at(long long id) const { return profiles[static_cast<size_t>(id)]; }

  bool fail(StepKind kind, long long pid, std::string msg,
            std::optional<AssignmentMatrix> witness = std::nullopt) {
    failure = DerivationFailure{std::move(msg), kind, pid, std::move(witness)};
    return false;
  }
};

bool check_closure(Engine& e, int level, long long pid, const std::vector<int>& cycle,
                   bool record) {
  const Profile& pp = e.at(pid);
  const AssignmentMatrix& m = e.eval(pid);
  const size_t z = cycle.size();
  for (size_t t = 0; t < z; ++t) {
    int i = cycle[t];
    int top = pp.pref(i).object_at(0);
    // IR instance: at the modified profile the member's upper contour of
    // their endowment is exactly {top, endowment}.
    Rational pair = m.at(i, top) + m.at(i, i);
    if (!pair.is_one()) {
      return e.fail(StepKind::CycleClosure, pid,
                    "cycle closure: " + agent_label(i) + " holds mass " + pair.str() +
                        " on {top, endowment} at the modified profile, needs 1");
    }
  }
  for (size_t t = 0; t < z; ++t) {
    int pred = cycle[t];
    int obj = cycle[(t + 1) % z];  // pred's top object; owner is agent `obj`
    Rational col = m.at(pred, obj) + m.at(obj, obj);
    if (!col.is_one()) {
      return e.fail(StepKind::CycleClosure, pid,
                    "cycle closure: " + object_label(obj) +
                        " is not fully held by its owner and their predecessor (mass " +
                        col.str() + ")");
    }
  }
  if (record) {
    DerivationStep s;
    s.kind = StepKind::CycleClosure;
    s.level = level;
    s.profile_id = pid;
    s.cycle = cycle;
    e.steps.push_back(std::move(s));
  }
  return true;
}

bool check_efficiency(Engine& e, int level, long long pid, const std::vector<int>& cycle,
                      bool record) {
  const Profile& pp = e.at(pid);
  const AssignmentMatrix& m = e.eval(pid);
  for (int i : cycle) {
    int top = pp.pref(i).object_at(0);
    if (m.at(i, top).is_one()) continue;
    // Rotating the cycle fully dominates: closure already confines all
    // cycle mass to {top, endowment} cells, so this matrix is bistochastic.
    std::vector<Rational> rows;
    rows.reserve(static_cast<size_t>(e.n) * e.n);
    for (int a = 0; a < e.n; ++a) {
      for (int y = 0; y < e.n; ++y) rows.push_back(m.at(a, y));
    }
    for (int mem : cycle) {
      int mtop = pp.pref(mem).object_at(0);
      rows[static_cast<size_t>(mem) * e.n + mem] = Rational(0);
      rows[static_cast<size_t>(mem) * e.n + mtop] = Rational(1);
    }
    return e.fail(StepKind::CycleEfficiency, pid,
                  "cycle efficiency: " + agent_label(i) + " holds only " + m.at(i, top).str() +
                      " of their top at the modified profile; the full rotation dominates",
                  AssignmentMatrix(e.n, std::move(rows)));
  }
  DerivationStep s;
  s.kind = StepKind::CycleEfficiency;
  s.level = level;
  s.profile_id = pid;
  s.cycle = cycle;
  for (int i : cycle) {
    int top = pp.pref(i).object_at(0);
    s.pins.push_back(PinFact{i, top});
    e.pin[{pid, i}] = top;
  }
  if (record) e.steps.push_back(std::move(s));
  return true;
}

// One chain per ending member: restore true preferences in cycle order
// starting right after the ending member, so the still-modified tail stays
// contiguous and re-pins by IR cascade after every restoration. The chain
// ending on the member before the smallest agent restores in plain cycle
// order and runs first.
bool run_chains(Engine& e, int level, long long tid, long long pid, const std::vector<int>& cycle,
                bool record) {
  // Copies: interning chain profiles below may reallocate the tables.
  const Profile truth = e.at(tid);
  const Profile pp = e.at(pid);
  const int z = static_cast<int>(cycle.size());
  std::vector<int> targets;
  targets.push_back(z - 1);
  for (int j = 0; j + 1 < z; ++j) targets.push_back(j);
  for (int tpos : targets) {
    long long cur = pid;
    for (int k = 1; k <= z; ++k) {
      int rpos = (tpos + k) % z;
      int restored = cycle[static_cast<size_t>(rpos)];
      const Preference& tpref = truth.pref(restored);
      int top = tpref.object_at(0);
      if (pp.pref(restored).object_at(0) != top) {
        throw std::logic_error("modified preference must keep the member's top");
      }
      auto premise = e.pin.find({cur, restored});
      if (premise == e.pin.end() || premise->second != top) {
        throw std::logic_error("chain premise pin missing");
      }
      // Members whose true report already lists their endowment second are
      // untouched by the modification; restoring them changes nothing and
      // their pins at `cur` are already in place.
      if (pp.pref(restored) == tpref) continue;
      long long nid = e.intern(e.at(cur).with_pref(restored, tpref));
      const AssignmentMatrix& m = e.eval(nid);
      if (!m.at(restored, top).is_one()) {
        return e.fail(StepKind::TopSpTransfer, nid,
                      "top transfer: " + agent_label(restored) + " drops to mass " +
                          m.at(restored, top).str() + " on their top when reporting truthfully" +
                          " (chain ending on " + agent_label(cycle[static_cast<size_t>(tpos)]) +
                          ", position " + std::to_string(k) + ")");
      }
      DerivationStep s;
      s.kind = StepKind::TopSpTransfer;
      s.level = level;
      s.profile_id = nid;
      s.premise_profile_id = cur;
      s.cycle = cycle;
      s.agent = restored;
      s.object = top;
      s.chain_target = cycle[static_cast<size_t>(tpos)];
      s.chain_pos = k;
      s.pins.push_back(PinFact{restored, top});
      e.pin[{nid, restored}] = top;
      for (int j = k + 1; j <= z; ++j) {
        int mem = cycle[static_cast<size_t>((tpos + j) % z)];
        int mtop = pp.pref(mem).object_at(0);
        Rational pair = m.at(mem, mtop) + m.at(mem, mem);
        if (!pair.is_one()) {
          return e.fail(StepKind::TopSpTransfer, nid,
                        "top transfer: still-modified " + agent_label(mem) + " holds mass " +
                            pair.str() + " on {top, endowment}, needs 1");
        }
        // The predecessor just pinned fully holds this member's endowment
        // column, so the member's endowment mass is 0 and the pair puts
        // everything on their top.
        if (!m.at(mem, mtop).is_one()) {
          return e.fail(StepKind::TopSpTransfer, nid,
                        "top transfer: cascade fails to pin " + agent_label(mem) +
                            " on their top (mass " + m.at(mem, mtop).str() + ")");
        }
        s.pins.push_back(PinFact{mem, mtop});
        e.pin[{nid, mem}] = mtop;
      }
      if (record) e.steps.push_back(std::move(s));
      cur = nid;
    }
    if (cur != tid) throw std::logic_error("chain must end at the level profile");
  }
  return true;
}

DerivationResult to_result(Engine& e) {
  DerivationResult r;
  r.failure = std::move(e.failure);
  if (!r.failure) {
    DerivationFailure generic;
    generic.message = "derivation failed";
    r.failure = std::move(generic);
  }
  return r;
}

}  // namespace

const char* step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::SingletonIr: return "singleton-ir";
    case StepKind::CycleClosure: return "cycle-closure";
    case StepKind::CycleEfficiency: return "cycle-efficiency";
    case StepKind::TopSpTransfer: return "top-sp-transfer";
    case StepKind::InductionReduce: return "induction-reduce";
  }
  return "unknown";
}

Profile modified_profile(const Profile& profile, const std::vector<int>& cycle) {
  std::vector<int> active(static_cast<size_t>(profile.n()));
  std::iota(active.begin(), active.end(), 0);
  return modified_profile_for(profile, cycle, active);
}

VerifyOutcome derive_cycle_closure(const Profile& profile, const std::vector<int>& cycle,
                                   const RuleOracle& rule) {
  Engine e(rule, profile.n());
  long long pid = e.intern(modified_profile(profile, cycle));
  VerifyOutcome out;
  if (check_closure(e, 1, pid, cycle, false)) {
    out.ok = true;
    out.detail = "cycle columns closed by owner and predecessor at the modified profile";
  } else {
    out.detail = e.failure->message;
  }
  return out;
}

VerifyOutcome derive_cycle_efficiency(const Profile& profile, const std::vector<int>& cycle,
                                      const RuleOracle& rule) {
  Engine e(rule, profile.n());
  long long pid = e.intern(modified_profile(profile, cycle));
  VerifyOutcome out;
  if (!check_closure(e, 1, pid, cycle, false)) {
    out.detail = e.failure->message;
    return out;
  }
  if (check_efficiency(e, 1, pid, cycle, false)) {
    out.ok = true;
    out.detail = "every cycle member holds their top fully at the modified profile";
  } else {
    out.detail = e.failure->message;
    out.witness = e.failure->witness;
  }
  return out;
}

VerifyOutcome derive_top_sp_chain(const Profile& profile, const std::vector<int>& cycle,
                                  const RuleOracle& rule) {
  if (cycle.size() == 1) {
    VerifyOutcome out;
    out.ok = true;
    out.detail = "singleton cycle, nothing to restore";
    return out;
  }
  Engine e(rule, profile.n());
  long long tid = e.intern(profile);
  long long pid = e.intern(modified_profile(profile, cycle));
  VerifyOutcome out;
  if (!check_closure(e, 1, pid, cycle, false) || !check_efficiency(e, 1, pid, cycle, false) ||
      !run_chains(e, 1, tid, pid, cycle, false)) {
    out.detail = e.failure->message;
    out.witness = e.failure->witness;
    return out;
  }
  out.ok = true;
  out.detail = std::to_string(cycle.size()) + " chains end at the profile with every member on their top";
  return out;
}

DerivationResult derive_profile(const Profile& profile, const RuleOracle& rule) {
  if (rule.n != profile.n()) throw std::invalid_argument("rule and profile sizes differ");
  if (!rule.evaluate) throw std::invalid_argument("rule has no evaluator");
  const int n = profile.n();
  Engine e(rule, n);
  long long root = e.intern(profile);
  if (root != 0) throw std::logic_error("target profile must be interned first");

  std::vector<int> active(static_cast<size_t>(n));
  std::iota(active.begin(), active.end(), 0);
  Profile t = profile;
  int level = 1;
  std::vector<int> final_object(static_cast<size_t>(n), -1);
  bool reduced = false;

  while (!active.empty()) {
    long long tid = e.intern(t);
    TradingGraph g = build_graph(t, active);
    std::vector<std::vector<int>> cycles = find_cycles(g);
    std::vector<int> removed;
    for (const std::vector<int>& cycle : cycles) {
      if (cycle.size() == 1) {
        int a = cycle[0];
        if (t.pref(a).object_at(0) != a) {
          throw std::logic_error("singleton member must top their own endowment");
        }
        if (!e.eval(tid).at(a, a).is_one()) {
          e.fail(StepKind::SingletonIr, tid,
                 "singleton: " + agent_label(a) + " keeps only " + e.eval(tid).at(a, a).str() +
                     " of their endowment, but it is their top");
          return to_result(e);
        }
        DerivationStep s;
        s.kind = StepKind::SingletonIr;
        s.level = level;
        s.profile_id = tid;
        s.cycle = cycle;
        s.agent = a;
        s.object = a;
        s.pins.push_back(PinFact{a, a});
        e.steps.push_back(std::move(s));
        e.pin[{tid, a}] = a;
      } else {
        Profile pp = modified_profile_for(t, cycle, active);
        long long pid = e.intern(pp);
        if (!check_closure(e, level, pid, cycle, true) ||
            !check_efficiency(e, level, pid, cycle, true) ||
            !run_chains(e, level, tid, pid, cycle, true)) {
          return to_result(e);
        }
      }
      removed.insert(removed.end(), cycle.begin(), cycle.end());
    }
    std::sort(removed.begin(), removed.end());
    for (int a : removed) {
      auto it = e.pin.find({tid, a});
      if (it == e.pin.end()) throw std::logic_error("cycle member left unpinned at level profile");
      final_object[static_cast<size_t>(a)] = it->second;
    }
    std::vector<int> remaining;
    std::set_difference(active.begin(), active.end(), removed.begin(), removed.end(),
                        std::back_inserter(remaining));
    if (remaining.empty()) break;

    std::set<int> remaining_set(remaining.begin(), remaining.end());
    Profile tn = t;
    for (int a : active) {
      if (remaining_set.count(a)) {
        tn = tn.with_pref(a, bottom_push(t.pref(a), remaining_set));
      } else {
        tn = tn.with_pref(a, p_prime_style(t.pref(a), a));
      }
    }
    long long nid = e.intern(tn);
    const AssignmentMatrix& mt = e.eval(tid);
    const AssignmentMatrix& mn = e.eval(nid);
    // Solved agents' mass must stay within the consumed block at both
    // profiles (their upper contours of endowment live there), and the
    // sub-rule's projection must agree with the current level.
    for (int a = 0; a < n; ++a) {
      if (remaining_set.count(a)) continue;
      Rational block_t, block_n;
      for (int y = 0; y < n; ++y) {
        if (remaining_set.count(y)) continue;
        block_t += mt.at(a, y);
        block_n += mn.at(a, y);
      }
      if (!block_t.is_one() || !block_n.is_one()) {
        e.fail(StepKind::InductionReduce, nid,
               "reduction: solved " + agent_label(a) + " leaks mass out of the consumed block");
        return to_result(e);
      }
    }
    for (int a : remaining) {
      for (int y : remaining) {
        if (mt.at(a, y) != mn.at(a, y)) {
          e.fail(StepKind::InductionReduce, nid,
                 "reduction: projection mismatch for " + agent_label(a) + " on " +
                     object_label(y) + " (" + mt.at(a, y).str() + " vs " + mn.at(a, y).str() +
                     ")");
          return to_result(e);
        }
      }
    }
    DerivationStep s;
    s.kind = StepKind::InductionReduce;
    s.level = level;
    s.profile_id = nid;
    s.premise_profile_id = tid;
    s.removed_agents = removed;
    e.steps.push_back(std::move(s));
    reduced = true;

    t = tn;
    active = std::move(remaining);
    ++level;
  }

  std::vector<Rational> rows(static_cast<size_t>(n) * n, Rational(0));
  for (int a = 0; a < n; ++a) {
    if (final_object[static_cast<size_t>(a)] < 0) {
      throw std::logic_error("agent left unpinned at the end of derivation");
    }
    rows[static_cast<size_t>(a) * n + final_object[static_cast<size_t>(a)]] = Rational(1);
  }
  AssignmentMatrix conclusion(n, std::move(rows));
  if (!(conclusion == ttc_matrix(profile))) {
    throw std::logic_error("derived pins must match the trading-cycles outcome");
  }
  if (!(conclusion == e.eval(root))) {
    throw std::logic_error("verified pins must match the rule's evaluated outcome");
  }

  Certificate cert{n,
                   rule.name,
                   profile,
                   std::move(e.profiles),
                   std::move(e.steps),
                   std::move(conclusion),
                   {}};
  if (reduced) {
    cert.notes.push_back(
        "reductions freeze solved agents at their modified preferences and push consumed "
        "objects to the bottom of remaining preferences; the projection equality is checked "
        "at every reduction");
    cert.notes.push_back(
        "transfers across profiles rely on the top-object mass inequality only, the weakest "
        "misreport guard");
  }
  DerivationResult r;
  r.certificate = std::move(cert);
  return r;
}

}  // namespace ttcv
