#include "ttcv/checkers.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ttcv/lp.hpp"
#include "ttcv/ttc.hpp"

namespace ttcv {

namespace {

// Improvement relation on objects: edge x -> y when some agent holds mass on
// y yet ranks x strictly above it. has_mass(i, y) abstracts over matrix rows
// and permutations.
std::vector<std::vector<char>> improvement_edges(
    const Profile& profile, const std::function<bool(int, int)>& has_mass) {
  const int n = profile.n();
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) {
    const Preference& p = profile.pref(i);
    for (int y = 0; y < n; ++y) {
      if (!has_mass(i, y)) continue;
      for (int pos = 0; pos < p.position_of(y); ++pos) adj[p.object_at(pos)][y] = 1;
    }
  }
  return adj;
}

// Deterministic DFS; a found cycle is rotated so its smallest object leads.
bool find_relation_cycle(const std::vector<std::vector<char>>& adj, std::vector<int>* cycle_out) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> color(n, 0);  // 0 white, 1 on path, 2 done
  std::vector<int> path;
  std::function<bool(int)> dfs = [&](int v) -> bool {
    color[v] = 1;
    path.push_back(v);
    for (int w = 0; w < n; ++w) {
      if (!adj[v][w]) continue;
      if (color[w] == 1) {
        if (cycle_out) {
          auto it = std::find(path.begin(), path.end(), w);
          std::vector<int> cycle(it, path.end());
          std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
          *cycle_out = std::move(cycle);
        }
        return true;
      }
      if (color[w] == 0 && dfs(w)) return true;
    }
    path.pop_back();
    color[v] = 2;
    return false;
  };
  for (int v = 0; v < n; ++v) {
    if (color[v] == 0 && dfs(v)) return true;
  }
  return false;
}

Rational upper_contour_mass(const Preference& pref, const AssignmentMatrix& matrix, int agent,
                            int object) {
  Rational mass;
  for (int x : pref.upper_contour(object)) mass += matrix.at(agent, x);
  return mass;
}

}  // namespace

const char* axiom_name(Axiom a) {
  switch (a) {
    case Axiom::SdEfficiency: return "sd-efficiency";
    case Axiom::SdIndividualRationality: return "sd-individual-rationality";
    case Axiom::SdStrategyProofness: return "sd-strategy-proofness";
    case Axiom::SdTopStrategyProofness: return "sd-top-strategy-proofness";
  }
  return "unknown";
}

RuleOracle make_ttc_rule(int n) {
  return RuleOracle{n, "ttc", [](const Profile& p) { return ttc_matrix(p); }};
}

RuleOracle make_identity_rule(int n) {
  return RuleOracle{n, "identity",
                    [](const Profile& p) { return AssignmentMatrix::identity(p.n()); }};
}

RuleOracle make_serial_dictatorship_rule(int n) {
  return RuleOracle{n, "serial-dictatorship", [](const Profile& p) {
                      const int m = p.n();
                      std::vector<char> taken(m, 0);
                      std::vector<int> perm(m, -1);
                      for (int i = 0; i < m; ++i) {
                        for (int pos = 0; pos < m; ++pos) {
                          int obj = p.pref(i).object_at(pos);
                          if (!taken[obj]) {
                            perm[i] = obj;
                            taken[obj] = 1;
                            break;
                          }
                        }
                      }
                      return AssignmentMatrix::from_permutation(perm);
                    }};
}

RuleOracle make_table_rule(int n, std::vector<AssignmentMatrix> outcomes_by_profile_index,
                           std::string name) {
  const long long expected = Profile::space_size(n);
  if (static_cast<long long>(outcomes_by_profile_index.size()) != expected) {
    throw std::invalid_argument("table rule needs one outcome per profile");
  }
  for (const AssignmentMatrix& m : outcomes_by_profile_index) {
    if (m.n() != n) throw std::invalid_argument("table rule outcome has wrong size");
  }
  auto table = std::make_shared<std::vector<AssignmentMatrix>>(std::move(outcomes_by_profile_index));
  return RuleOracle{n, std::move(name),
                    [table](const Profile& p) { return (*table)[p.index()]; }};
}

AxiomReport check_sd_ir(const Profile& profile, const AssignmentMatrix& matrix) {
  AxiomReport report{Axiom::SdIndividualRationality, true, std::nullopt};
  if (profile.n() != matrix.n()) throw std::invalid_argument("profile/matrix size mismatch");
  for (int i = 0; i < profile.n(); ++i) {
    Rational mass = upper_contour_mass(profile.pref(i), matrix, i, i);
    if (!mass.is_one()) {
      AxiomCounterexample ce;
      ce.profile = profile;
      ce.agent = i;
      ce.witness_object = i;
      std::ostringstream os;
      os << "agent " << i + 1 << " keeps only " << mass.str()
         << " of their mass at or above their endowment";
      ce.detail = os.str();
      report.holds = false;
      report.counterexample = std::move(ce);
      return report;
    }
  }
  return report;
}

bool sd_efficient_acyclic(const Profile& profile, const AssignmentMatrix& matrix,
                          std::vector<int>* cycle_out) {
  if (profile.n() != matrix.n()) throw std::invalid_argument("profile/matrix size mismatch");
  auto adj = improvement_edges(
      profile, [&](int i, int y) { return matrix.at(i, y).sign() > 0; });
  return !find_relation_cycle(adj, cycle_out);
}

bool sd_efficient_permutation(const Profile& profile, const std::vector<int>& perm,
                              std::vector<int>* cycle_out) {
  if (!is_permutation_of_iota(perm, profile.n())) {
    throw std::invalid_argument("not a permutation assignment");
  }
  auto adj = improvement_edges(profile, [&](int i, int y) { return perm[i] == y; });
  return !find_relation_cycle(adj, cycle_out);
}

bool sd_ir_permutation(const Profile& profile, const std::vector<int>& perm,
                       int* violating_agent) {
  if (!is_permutation_of_iota(perm, profile.n())) {
    throw std::invalid_argument("not a permutation assignment");
  }
  for (int i = 0; i < profile.n(); ++i) {
    if (profile.pref(i).rank(perm[i]) > profile.pref(i).rank(i)) {
      if (violating_agent) *violating_agent = i;
      return false;
    }
  }
  return true;
}

AssignmentMatrix dominating_matrix_from_cycle(const Profile& profile,
                                              const AssignmentMatrix& matrix,
                                              const std::vector<int>& object_cycle) {
  const int n = profile.n();
  const int k = static_cast<int>(object_cycle.size());
  if (k < 2) throw std::invalid_argument("cycle needs at least two objects");
  std::vector<int> witness(k, -1);
  Rational eps;
  bool eps_set = false;
  for (int t = 0; t < k; ++t) {
    int x = object_cycle[t];
    int y = object_cycle[(t + 1) % k];
    for (int i = 0; i < n; ++i) {
      if (matrix.at(i, y).sign() > 0 && profile.pref(i).strictly_prefers(x, y)) {
        witness[t] = i;
        break;
      }
    }
    if (witness[t] < 0) throw std::invalid_argument("cycle edge has no witnessing agent");
    const Rational& held = matrix.at(witness[t], y);
    if (!eps_set || held < eps) {
      eps = held;
      eps_set = true;
    }
  }
  std::vector<Rational> rows;
  rows.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int y = 0; y < n; ++y) rows.push_back(matrix.at(i, y));
  }
  for (int t = 0; t < k; ++t) {
    int x = object_cycle[t];
    int y = object_cycle[(t + 1) % k];
    rows[static_cast<size_t>(witness[t]) * n + y] -= eps;
    rows[static_cast<size_t>(witness[t]) * n + x] += eps;
  }
  return AssignmentMatrix(n, std::move(rows));
}

AxiomReport check_sd_efficient(const Profile& profile, const AssignmentMatrix& matrix) {
  AxiomReport report{Axiom::SdEfficiency, true, std::nullopt};
  std::vector<int> cycle;
  if (sd_efficient_acyclic(profile, matrix, &cycle)) return report;
  AxiomCounterexample ce;
  ce.profile = profile;
  ce.object_cycle = cycle;
  ce.witness_object = cycle.front();
  ce.dominating = dominating_matrix_from_cycle(profile, matrix, cycle);
  std::ostringstream os;
  os << "improvement relation has a cycle through objects";
  for (int x : cycle) os << " " << x + 1;
  ce.detail = os.str();
  report.holds = false;
  report.counterexample = std::move(ce);
  return report;
}

bool sd_efficient_lp(const Profile& profile, const AssignmentMatrix& matrix, Rational* slack_out,
                     std::optional<AssignmentMatrix>* dominator_out) {
  const int n = profile.n();
  if (n != matrix.n()) throw std::invalid_argument("profile/matrix size mismatch");
  LpProblem lp;
  lp.num_vars = n * n;
  auto var = [n](int agent, int object) { return agent * n + object; };

  // Sum of all upper-contour prefixes of a row collapses to weighted mass,
  // weight n - position. The optimum exceeds the matrix's own score exactly
  // when some feasible matrix improves a prefix strictly.
  lp.objective.assign(lp.num_vars, Rational(0));
  Rational base_score;
  for (int i = 0; i < n; ++i) {
    const Preference& p = profile.pref(i);
    for (int y = 0; y < n; ++y) {
      Rational w(n - p.position_of(y));
      lp.objective[var(i, y)] = w;
      base_score += w * matrix.at(i, y);
    }
  }

  for (int i = 0; i < n; ++i) {
    LpConstraint row{std::vector<Rational>(lp.num_vars, Rational(0)), LpRelation::Equal,
                     Rational(1)};
    for (int y = 0; y < n; ++y) row.coeffs[var(i, y)] = Rational(1);
    lp.constraints.push_back(std::move(row));
  }
  for (int y = 0; y < n; ++y) {
    LpConstraint col{std::vector<Rational>(lp.num_vars, Rational(0)), LpRelation::Equal,
                     Rational(1)};
    for (int i = 0; i < n; ++i) col.coeffs[var(i, y)] = Rational(1);
    lp.constraints.push_back(std::move(col));
  }
  // Never fall below the checked matrix on any top-k prefix of any agent;
  // the k = n prefix is the row sum, already pinned to 1.
  for (int i = 0; i < n; ++i) {
    const Preference& p = profile.pref(i);
    Rational prefix_mass;
    LpConstraint ge{std::vector<Rational>(lp.num_vars, Rational(0)), LpRelation::GreaterEq,
                    Rational(0)};
    for (int k = 0; k < n - 1; ++k) {
      int obj = p.object_at(k);
      ge.coeffs[var(i, obj)] = Rational(1);
      prefix_mass += matrix.at(i, obj);
      ge.rhs = prefix_mass;
      lp.constraints.push_back(ge);
    }
  }

  LpSolution sol = lp_maximize(lp);
  if (sol.status != LpStatus::Optimal) {
    throw std::logic_error("efficiency program must have an optimum");
  }
  Rational slack = sol.objective_value - base_score;
  if (slack.sign() < 0) throw std::logic_error("checked matrix is feasible, optimum cannot drop");
  if (slack_out) *slack_out = slack;
  bool efficient = slack.is_zero();
  if (!efficient && dominator_out) {
    std::vector<Rational> rows(sol.x.begin(), sol.x.begin() + lp.num_vars);
    *dominator_out = AssignmentMatrix(n, std::move(rows));
  }
  return efficient;
}

std::vector<std::vector<int>> pareto_efficient_ir_assignments(const Profile& profile) {
  std::vector<int> perm(profile.n());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> out;
  do {
    if (sd_ir_permutation(profile, perm) && sd_efficient_permutation(profile, perm)) {
      out.push_back(perm);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

namespace {

struct SweepHit {
  long long profile_index = -1;
  int agent = -1;
  int misreport = -1;

  bool valid() const { return profile_index >= 0; }
  bool before(const SweepHit& other) const {
    if (!other.valid()) return valid();
    if (!valid()) return false;
    if (profile_index != other.profile_index) return profile_index < other.profile_index;
    if (agent != other.agent) return agent < other.agent;
    return misreport < other.misreport;
  }
};

struct SweepSlice {
  ExhaustiveStats stats;
  SweepHit first_hit;
};

// Outcome store for one rule over the whole profile space: permutations are
// packed into one integer each, probabilistic outcomes keep their matrix.
struct OutcomeTable {
  int n = 0;
  std::vector<int32_t> perm_code;
  std::vector<std::unique_ptr<AssignmentMatrix>> prob;

  int decode(long long profile_index, int agent) const {
    int32_t code = perm_code[static_cast<size_t>(profile_index)];
    int32_t p = 1;
    for (int i = 0; i < agent; ++i) p *= n;
    return (code / p) % n;
  }
};

OutcomeTable materialize_rule(const RuleOracle& rule, long long total, int jobs) {
  OutcomeTable table;
  table.n = rule.n;
  table.perm_code.assign(static_cast<size_t>(total), -1);
  table.prob.resize(static_cast<size_t>(total));
  auto fill = [&](long long lo, long long hi) {
    for (long long idx = lo; idx < hi; ++idx) {
      AssignmentMatrix m = rule.evaluate(Profile::from_index(rule.n, idx));
      if (auto perm = m.as_permutation()) {
        int32_t code = 0;
        for (int i = rule.n - 1; i >= 0; --i) code = code * rule.n + (*perm)[i];
        table.perm_code[static_cast<size_t>(idx)] = code;
      } else {
        table.prob[static_cast<size_t>(idx)] = std::make_unique<AssignmentMatrix>(std::move(m));
      }
    }
  };
  if (jobs <= 1 || total < 2 * jobs) {
    fill(0, total);
  } else {
    std::vector<std::thread> workers;
    long long chunk = (total + jobs - 1) / jobs;
    for (int j = 0; j < jobs; ++j) {
      long long lo = j * chunk;
      long long hi = std::min(total, lo + chunk);
      if (lo < hi) workers.emplace_back(fill, lo, hi);
    }
    for (auto& w : workers) w.join();
  }
  return table;
}

Lottery outcome_row(const OutcomeTable& table, long long profile_index, int agent) {
  Lottery row(static_cast<size_t>(table.n), Rational(0));
  if (const auto& m = table.prob[static_cast<size_t>(profile_index)]) {
    for (int y = 0; y < table.n; ++y) row[y] = m->at(agent, y);
  } else {
    row[static_cast<size_t>(table.decode(profile_index, agent))] = Rational(1);
  }
  return row;
}

AxiomReport exhaustive_sweep(const RuleOracle& rule, int exhaustion_bound, int jobs,
                             ExhaustiveStats* stats, bool top_only) {
  const Axiom axiom = top_only ? Axiom::SdTopStrategyProofness : Axiom::SdStrategyProofness;
  if (rule.n > exhaustion_bound) {
    throw std::invalid_argument("exhaustive sweep refused above the exhaustion bound");
  }
  if (!rule.evaluate) throw std::invalid_argument("rule has no evaluator");
  const int n = rule.n;
  const long long fact = Preference::count(n);
  const long long total = Profile::space_size(n);
  jobs = std::max(1, jobs);
  jobs = static_cast<int>(std::min<long long>(jobs, total));

  OutcomeTable table = materialize_rule(rule, total, jobs);

  // Ranks per preference index: rank_table[p * n + obj] = position of obj.
  std::vector<uint8_t> rank_table(static_cast<size_t>(fact) * n);
  std::vector<uint8_t> top_table(static_cast<size_t>(fact));
  for (long long p = 0; p < fact; ++p) {
    Preference pref = Preference::from_index(n, p);
    for (int obj = 0; obj < n; ++obj) {
      rank_table[static_cast<size_t>(p) * n + obj] = static_cast<uint8_t>(pref.position_of(obj));
    }
    top_table[static_cast<size_t>(p)] = static_cast<uint8_t>(pref.top());
  }
  std::vector<long long> stride(static_cast<size_t>(n));
  stride[static_cast<size_t>(n) - 1] = 1;
  for (int i = n - 2; i >= 0; --i) stride[static_cast<size_t>(i)] = stride[static_cast<size_t>(i) + 1] * fact;

  auto scan = [&](long long lo, long long hi) {
    SweepSlice slice;
    std::vector<long long> digit(static_cast<size_t>(n));
    for (long long idx = lo; idx < hi; ++idx) {
      long long rest = idx;
      for (int i = 0; i < n; ++i) {
        digit[static_cast<size_t>(i)] = rest / stride[static_cast<size_t>(i)];
        rest %= stride[static_cast<size_t>(i)];
      }
      slice.stats.profiles += 1;
      bool violated = false;
      const bool truth_prob = table.prob[static_cast<size_t>(idx)] != nullptr;
      for (int i = 0; i < n && !violated; ++i) {
        const long long d = digit[static_cast<size_t>(i)];
        const uint8_t* ranks = &rank_table[static_cast<size_t>(d) * n];
        const int true_top = top_table[static_cast<size_t>(d)];
        for (long long m = 0; m < fact && !violated; ++m) {
          if (m == d) continue;
          slice.stats.comparisons += 1;
          const long long mis_idx = idx + (m - d) * stride[static_cast<size_t>(i)];
          const bool mis_prob = table.prob[static_cast<size_t>(mis_idx)] != nullptr;
          bool hit = false;
          if (!truth_prob && !mis_prob) {
            const int got = table.decode(idx, i);
            const int got_mis = table.decode(mis_idx, i);
            if (top_only) {
              hit = got_mis == true_top && got != true_top;
            } else {
              hit = ranks[got_mis] < ranks[got];
            }
          } else {
            Lottery truth = outcome_row(table, idx, i);
            Lottery mis = outcome_row(table, mis_idx, i);
            if (top_only) {
              hit = mis[static_cast<size_t>(true_top)] > truth[static_cast<size_t>(true_top)];
            } else {
              Preference pref = Preference::from_index(n, d);
              hit = sd_compare(pref, mis, truth).relation == SdRelation::StrictlyPreferred;
            }
          }
          if (hit) {
            violated = true;
            SweepHit here{idx, i, static_cast<int>(m)};
            if (here.before(slice.first_hit)) slice.first_hit = here;
          }
        }
      }
      if (violated) slice.stats.violating_profiles += 1;
    }
    return slice;
  };

  std::vector<SweepSlice> slices(static_cast<size_t>(jobs));
  if (jobs == 1) {
    slices[0] = scan(0, total);
  } else {
    std::vector<std::thread> workers;
    long long chunk = (total + jobs - 1) / jobs;
    for (int j = 0; j < jobs; ++j) {
      long long lo = j * chunk;
      long long hi = std::min(total, lo + chunk);
      if (lo >= hi) continue;
      workers.emplace_back([&, j, lo, hi] { slices[static_cast<size_t>(j)] = scan(lo, hi); });
    }
    for (auto& w : workers) w.join();
  }

  ExhaustiveStats merged;
  SweepHit first;
  for (const SweepSlice& s : slices) {
    merged.profiles += s.stats.profiles;
    merged.comparisons += s.stats.comparisons;
    merged.violating_profiles += s.stats.violating_profiles;
    if (s.first_hit.before(first)) first = s.first_hit;
  }
  if (stats) *stats = merged;

  AxiomReport report{axiom, true, std::nullopt};
  if (first.valid()) {
    report.holds = false;
    AxiomCounterexample ce;
    ce.profile_index = first.profile_index;
    ce.profile = Profile::from_index(n, first.profile_index);
    ce.agent = first.agent;
    ce.misreport = Preference::from_index(n, first.misreport);
    const Preference& truth_pref = ce.profile->pref(first.agent);
    Lottery truth = outcome_row(table, first.profile_index, first.agent);
    long long mis_idx = first.profile_index +
                        (first.misreport - truth_pref.index()) * stride[static_cast<size_t>(first.agent)];
    Lottery mis = outcome_row(table, mis_idx, first.agent);
    std::ostringstream os;
    if (top_only) {
      int t = truth_pref.top();
      ce.witness_object = t;
      os << "rule " << rule.name << ": agent " << first.agent + 1
         << " lifts top-object mass from " << truth[static_cast<size_t>(t)].str() << " to "
         << mis[static_cast<size_t>(t)].str() << " by misreporting";
    } else {
      DominanceVerdict v = sd_compare(truth_pref, mis, truth);
      ce.witness_object = v.witness;
      os << "rule " << rule.name << ": agent " << first.agent + 1
         << "'s misreport row strictly sd-dominates their truthful row";
    }
    ce.detail = os.str();
    report.counterexample = std::move(ce);
  }
  return report;
}

}  // namespace

AxiomReport check_sd_sp(const RuleOracle& rule, int exhaustion_bound, int jobs,
                        ExhaustiveStats* stats) {
  return exhaustive_sweep(rule, exhaustion_bound, jobs, stats, false);
}

AxiomReport check_sd_top_sp(const RuleOracle& rule, int exhaustion_bound, int jobs,
                            ExhaustiveStats* stats) {
  return exhaustive_sweep(rule, exhaustion_bound, jobs, stats, true);
}

bool reverify_counterexample(const AxiomReport& report, const RuleOracle* rule,
                             const AssignmentMatrix* matrix) {
  if (report.holds || !report.counterexample) return false;
  const AxiomCounterexample& ce = *report.counterexample;
  switch (report.axiom) {
    case Axiom::SdIndividualRationality: {
      if (!ce.profile || !ce.agent || !matrix) return false;
      Rational mass = upper_contour_mass(ce.profile->pref(*ce.agent), *matrix, *ce.agent, *ce.agent);
      return !mass.is_one();
    }
    case Axiom::SdEfficiency: {
      if (!ce.profile || !ce.object_cycle || !matrix) return false;
      const std::vector<int>& cycle = *ce.object_cycle;
      if (cycle.size() < 2) return false;
      for (size_t t = 0; t < cycle.size(); ++t) {
        int x = cycle[t];
        int y = cycle[(t + 1) % cycle.size()];
        bool witnessed = false;
        for (int i = 0; i < ce.profile->n() && !witnessed; ++i) {
          witnessed = matrix->at(i, y).sign() > 0 && ce.profile->pref(i).strictly_prefers(x, y);
        }
        if (!witnessed) return false;
      }
      if (ce.dominating) {
        bool some_strict = false;
        for (int i = 0; i < ce.profile->n(); ++i) {
          Lottery lhs = ce.dominating->row(i);
          Lottery rhs = matrix->row(i);
          DominanceVerdict v = sd_compare(ce.profile->pref(i), lhs, rhs);
          if (!v.weakly_dominates()) return false;
          if (v.relation == SdRelation::StrictlyPreferred) some_strict = true;
        }
        if (!some_strict) return false;
      }
      return true;
    }
    case Axiom::SdStrategyProofness:
    case Axiom::SdTopStrategyProofness: {
      if (!ce.profile || !ce.agent || !ce.misreport || !rule || !rule->evaluate) return false;
      const Profile& truth_profile = *ce.profile;
      Profile mis_profile = truth_profile.with_pref(*ce.agent, *ce.misreport);
      AssignmentMatrix truth_m = rule->evaluate(truth_profile);
      AssignmentMatrix mis_m = rule->evaluate(mis_profile);
      const Preference& pref = truth_profile.pref(*ce.agent);
      Lottery truth = truth_m.row(*ce.agent);
      Lottery mis = mis_m.row(*ce.agent);
      if (report.axiom == Axiom::SdTopStrategyProofness) {
        int t = pref.top();
        return mis[static_cast<size_t>(t)] > truth[static_cast<size_t>(t)];
      }
      return sd_compare(pref, mis, truth).relation == SdRelation::StrictlyPreferred;
    }
  }
  return false;
}

}  // namespace ttcv
