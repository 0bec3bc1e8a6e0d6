#include "ttcv/harness.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "ttcv/ttc.hpp"

namespace ttcv {

namespace {

constexpr size_t kMaxStoredReports = 256;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// work(slot, lo, hi) over a contiguous partition of [0, total).
template <typename Fn>
void run_slices(long long total, int jobs, Fn&& work) {
  if (jobs <= 1 || total < 2 * jobs) {
    work(0, 0, total);
    return;
  }
  std::vector<std::thread> workers;
  long long chunk = (total + jobs - 1) / jobs;
  for (int j = 0; j < jobs; ++j) {
    long long lo = j * chunk;
    long long hi = std::min(total, lo + chunk);
    if (lo < hi) workers.emplace_back([&work, j, lo, hi] { work(j, lo, hi); });
  }
  for (auto& w : workers) w.join();
}

struct AxiomSlice {
  long long ir_pass = 0;
  long long ir_fail = 0;
  long long eff_pass = 0;
  long long eff_fail = 0;
  std::vector<AxiomReport> reports;  // failures, in profile order
};

BatchResult axiom_batch(const RuleOracle& rule, int jobs, bool ttc_fast) {
  const auto start = Clock::now();
  if (rule.n < 2 || rule.n > 4) {
    throw std::invalid_argument("axiom verification supports 2 <= n <= 4");
  }
  if (!rule.evaluate) throw std::invalid_argument("rule has no evaluator");
  const int n = rule.n;
  const long long total = Profile::space_size(n);
  jobs = static_cast<int>(std::min<long long>(std::max(1, jobs), total));

  std::vector<AxiomSlice> slices(static_cast<size_t>(jobs));
  run_slices(total, jobs, [&](int slot, long long lo, long long hi) {
    AxiomSlice& s = slices[static_cast<size_t>(slot)];
    auto note = [&s](AxiomReport&& r, long long idx, long long& pass, long long& fail) {
      if (r.holds) {
        pass += 1;
        return;
      }
      fail += 1;
      if (r.counterexample) r.counterexample->profile_index = idx;
      s.reports.push_back(std::move(r));
    };
    for (long long idx = lo; idx < hi; ++idx) {
      Profile profile = Profile::from_index(n, idx);
      if (ttc_fast) {
        std::vector<int> perm = ttc_assignment(profile);
        if (sd_ir_permutation(profile, perm) && sd_efficient_permutation(profile, perm)) {
          s.ir_pass += 1;
          s.eff_pass += 1;
          continue;
        }
        AssignmentMatrix m = AssignmentMatrix::from_permutation(perm);
        note(check_sd_ir(profile, m), idx, s.ir_pass, s.ir_fail);
        note(check_sd_efficient(profile, m), idx, s.eff_pass, s.eff_fail);
      } else {
        AssignmentMatrix m = rule.evaluate(profile);
        if (auto perm = m.as_permutation();
            perm && sd_ir_permutation(profile, *perm) && sd_efficient_permutation(profile, *perm)) {
          s.ir_pass += 1;
          s.eff_pass += 1;
          continue;
        }
        note(check_sd_ir(profile, m), idx, s.ir_pass, s.ir_fail);
        note(check_sd_efficient(profile, m), idx, s.eff_pass, s.eff_fail);
      }
    }
  });

  BatchResult out;
  out.task = "verify-axioms";
  out.n = n;
  out.rule_name = rule.name;
  out.space_size = total;
  AxiomTally ir{Axiom::SdIndividualRationality, 0, 0};
  AxiomTally eff{Axiom::SdEfficiency, 0, 0};
  for (AxiomSlice& s : slices) {
    ir.passed += s.ir_pass;
    ir.failed += s.ir_fail;
    eff.passed += s.eff_pass;
    eff.failed += s.eff_fail;
    for (AxiomReport& r : s.reports) out.counterexamples.push_back(std::move(r));
  }

  ExhaustiveStats sp_stats, top_stats;
  AxiomReport sp = check_sd_sp(rule, n, jobs, &sp_stats);
  AxiomReport top = check_sd_top_sp(rule, n, jobs, &top_stats);
  AxiomTally sp_tally{Axiom::SdStrategyProofness, sp_stats.profiles - sp_stats.violating_profiles,
                      sp_stats.violating_profiles};
  AxiomTally top_tally{Axiom::SdTopStrategyProofness,
                       top_stats.profiles - top_stats.violating_profiles,
                       top_stats.violating_profiles};
  if (!sp.holds) out.counterexamples.push_back(std::move(sp));
  if (!top.holds) out.counterexamples.push_back(std::move(top));

  out.tallies = {ir, eff, sp_tally, top_tally};
  out.ok = true;
  std::string failing;
  for (const AxiomTally& t : out.tallies) {
    if (t.failed == 0) continue;
    out.ok = false;
    if (!failing.empty()) failing += "; ";
    failing += std::string(axiom_name(t.axiom)) + " fails on " + std::to_string(t.failed) +
               " of " + std::to_string(total) + " profiles";
  }
  out.detail = out.ok ? "all axioms hold on every profile" : failing;
  if (out.counterexamples.size() > kMaxStoredReports) {
    out.counterexamples.resize(kMaxStoredReports);
    out.detail += "; counterexample list truncated";
  }
  out.wall_seconds = seconds_since(start);
  return out;
}

}  // namespace

BatchResult verify_ttc_axioms(int n, int jobs) {
  return axiom_batch(make_ttc_rule(n), jobs, true);
}

BatchResult verify_rule_axioms(const RuleOracle& rule, int jobs) {
  return axiom_batch(rule, jobs, false);
}

BatchResult verify_uniqueness_deterministic(int n, const UniquenessOptions& options) {
  const auto start = Clock::now();
  if (n < 2 || n > 3) {
    throw std::invalid_argument("the deterministic uniqueness search supports n = 2 and n = 3");
  }
  const long long fact = Preference::count(n);
  const long long total = Profile::space_size(n);

  std::vector<long long> stride(static_cast<size_t>(n));
  stride[static_cast<size_t>(n) - 1] = 1;
  for (int i = n - 2; i >= 0; --i) {
    stride[static_cast<size_t>(i)] = stride[static_cast<size_t>(i) + 1] * fact;
  }
  std::vector<int> top_table(static_cast<size_t>(fact));
  for (long long p = 0; p < fact; ++p) {
    top_table[static_cast<size_t>(p)] = Preference::from_index(n, p).top();
  }

  // Per profile: candidate outcomes, the trading-cycles outcome's slot, the
  // true top object per agent, and the one-report-away neighbors.
  std::vector<std::vector<std::vector<int>>> cand(static_cast<size_t>(total));
  std::vector<int> ttc_slot(static_cast<size_t>(total), -1);
  std::vector<std::vector<int>> tops(static_cast<size_t>(total));
  std::vector<std::vector<std::pair<long long, int>>> neighbors(static_cast<size_t>(total));
  long long candidate_count = 0;
  for (long long idx = 0; idx < total; ++idx) {
    Profile profile = Profile::from_index(n, idx);
    cand[static_cast<size_t>(idx)] = pareto_efficient_ir_assignments(profile);
    candidate_count += static_cast<long long>(cand[static_cast<size_t>(idx)].size());
    std::vector<int> ttc_perm = ttc_assignment(profile);
    auto& cd = cand[static_cast<size_t>(idx)];
    auto it = std::find(cd.begin(), cd.end(), ttc_perm);
    if (it == cd.end()) {
      throw std::logic_error("trading-cycles outcome missing from the candidate set");
    }
    ttc_slot[static_cast<size_t>(idx)] = static_cast<int>(it - cd.begin());
    tops[static_cast<size_t>(idx)].resize(static_cast<size_t>(n));
    long long rest = idx;
    for (int i = 0; i < n; ++i) {
      long long d = rest / stride[static_cast<size_t>(i)];
      rest %= stride[static_cast<size_t>(i)];
      tops[static_cast<size_t>(idx)][static_cast<size_t>(i)] = top_table[static_cast<size_t>(d)];
      for (long long m = 0; m < fact; ++m) {
        if (m == d) continue;
        neighbors[static_cast<size_t>(idx)].push_back(
            {idx + (m - d) * stride[static_cast<size_t>(i)], i});
      }
    }
  }

  // A misreport may never gain an agent their truthful top object: taking
  // each endpoint as the truth in turn, the pair (v at truth, u at misreport)
  // is forbidden when u hands the agent their top but v does not.
  auto allowed = [&](const std::vector<int>& v, const std::vector<int>& u, int i, int t_p,
                     int t_q) {
    if (u[static_cast<size_t>(i)] == t_p && v[static_cast<size_t>(i)] != t_p) return false;
    if (v[static_cast<size_t>(i)] == t_q && u[static_cast<size_t>(i)] != t_q) return false;
    return true;
  };

  using Domains = std::vector<std::vector<char>>;
  Domains alive(static_cast<size_t>(total));
  for (long long idx = 0; idx < total; ++idx) {
    alive[static_cast<size_t>(idx)].assign(cand[static_cast<size_t>(idx)].size(), 1);
  }
  if (options.forced_deviation_profile >= 0) {
    if (options.forced_deviation_profile >= total) {
      throw std::invalid_argument("forced deviation profile out of range");
    }
    auto& d = alive[static_cast<size_t>(options.forced_deviation_profile)];
    d[static_cast<size_t>(ttc_slot[static_cast<size_t>(options.forced_deviation_profile)])] = 0;
  }

  // Keep every candidate that has a compatible partner in every neighbor
  // domain; re-examine a profile whenever a neighbor shrinks.
  auto revise = [&](Domains& dom, long long p) {
    bool changed = false;
    auto& dp = dom[static_cast<size_t>(p)];
    const auto& cp = cand[static_cast<size_t>(p)];
    for (size_t c = 0; c < cp.size(); ++c) {
      if (!dp[c]) continue;
      bool supported = true;
      for (const auto& [q, i] : neighbors[static_cast<size_t>(p)]) {
        const int t_p = tops[static_cast<size_t>(p)][static_cast<size_t>(i)];
        const int t_q = tops[static_cast<size_t>(q)][static_cast<size_t>(i)];
        const auto& dq = dom[static_cast<size_t>(q)];
        const auto& cq = cand[static_cast<size_t>(q)];
        bool any = false;
        for (size_t u = 0; u < cq.size() && !any; ++u) {
          if (dq[u] && allowed(cp[c], cq[u], i, t_p, t_q)) any = true;
        }
        if (!any) {
          supported = false;
          break;
        }
      }
      if (!supported) {
        dp[c] = 0;
        changed = true;
      }
    }
    return changed;
  };

  auto propagate = [&](Domains& dom, std::deque<long long> queue) {
    std::vector<char> queued(static_cast<size_t>(total), 0);
    for (long long p : queue) queued[static_cast<size_t>(p)] = 1;
    while (!queue.empty()) {
      long long p = queue.front();
      queue.pop_front();
      queued[static_cast<size_t>(p)] = 0;
      if (!revise(dom, p)) continue;
      const auto& dp = dom[static_cast<size_t>(p)];
      if (std::find(dp.begin(), dp.end(), 1) == dp.end()) return false;
      for (const auto& [q, i] : neighbors[static_cast<size_t>(p)]) {
        if (!queued[static_cast<size_t>(q)]) {
          queued[static_cast<size_t>(q)] = 1;
          queue.push_back(q);
        }
      }
    }
    return true;
  };

  std::deque<long long> all(static_cast<size_t>(total));
  std::iota(all.begin(), all.end(), 0);
  bool feasible = propagate(alive, std::move(all));

  // Exhaustive solution count (capped at 2), branching on the first profile
  // whose domain is still plural; values tried in candidate order.
  int found = 0;
  std::vector<int> survivor(static_cast<size_t>(total), -1);
  std::function<void(Domains&)> dfs = [&](Domains& dom) {
    if (found >= 2) return;
    long long branch = -1;
    for (long long p = 0; p < total && branch < 0; ++p) {
      const auto& dp = dom[static_cast<size_t>(p)];
      if (std::count(dp.begin(), dp.end(), 1) > 1) branch = p;
    }
    if (branch < 0) {
      found += 1;
      if (found == 1) {
        for (long long p = 0; p < total; ++p) {
          const auto& dp = dom[static_cast<size_t>(p)];
          survivor[static_cast<size_t>(p)] =
              static_cast<int>(std::find(dp.begin(), dp.end(), 1) - dp.begin());
        }
      }
      return;
    }
    const auto& db = dom[static_cast<size_t>(branch)];
    for (size_t c = 0; c < db.size(); ++c) {
      if (!db[c] || found >= 2) continue;
      Domains next = dom;
      auto& nb = next[static_cast<size_t>(branch)];
      std::fill(nb.begin(), nb.end(), 0);
      nb[c] = 1;
      std::deque<long long> seed;
      for (const auto& [q, i] : neighbors[static_cast<size_t>(branch)]) seed.push_back(q);
      if (propagate(next, std::move(seed))) dfs(next);
    }
  };
  if (feasible) dfs(alive);

  BatchResult out;
  out.task = "verify-uniqueness";
  out.n = n;
  out.rule_name = "ttc";
  out.space_size = total;
  out.survivors = found;
  if (found == 1) {
    out.survivor_is_ttc = true;
    for (long long p = 0; p < total; ++p) {
      if (survivor[static_cast<size_t>(p)] != ttc_slot[static_cast<size_t>(p)]) {
        out.survivor_is_ttc = false;
        break;
      }
    }
  }
  const bool forced = options.forced_deviation_profile >= 0;
  out.ok = forced ? found == 0 : (found == 1 && out.survivor_is_ttc);
  if (forced) {
    out.detail = found == 0
                     ? "no rule survives once profile " +
                           std::to_string(options.forced_deviation_profile) +
                           " is forced off the trading-cycles outcome"
                     : "unexpected survivor despite the forced deviation";
  } else if (found == 0) {
    out.detail = "no rule survives the constraints";
  } else if (found >= 2) {
    out.detail = "at least two rules survive; search stopped at the second";
  } else if (!out.survivor_is_ttc) {
    out.detail = "the unique survivor deviates from the trading-cycles outcomes";
  } else {
    out.detail = "exactly one rule survives from " + std::to_string(candidate_count) +
                 " candidate outcomes and it matches the trading-cycles outcome at every profile";
  }
  out.wall_seconds = seconds_since(start);
  return out;
}

BatchResult certify_all(int n, const RuleOracle& rule, const CertifyOptions& options) {
  const auto start = Clock::now();
  if (n < 2 || n > 4) throw std::invalid_argument("certification supports 2 <= n <= 4");
  if (rule.n != n) throw std::invalid_argument("rule order differs from n");
  if (!rule.evaluate) throw std::invalid_argument("rule has no evaluator");
  const long long total = Profile::space_size(n);
  const int jobs = static_cast<int>(std::min<long long>(std::max(1, options.jobs), total));

  BatchResult out;
  out.task = "certify";
  out.n = n;
  out.rule_name = rule.name;
  out.space_size = total;
  out.certificates_total = total;

  struct Item {
    std::optional<Certificate> cert;
    std::optional<DerivationFailure> failure;
    ReplayResult replay;
  };
  long long failures_seen = 0;
  const long long block = 4096;
  for (long long base = 0; base < total; base += block) {
    const long long count = std::min(block, total - base);
    std::vector<Item> items(static_cast<size_t>(count));
    run_slices(count, jobs, [&](int, long long lo, long long hi) {
      for (long long k = lo; k < hi; ++k) {
        Item& it = items[static_cast<size_t>(k)];
        DerivationResult r = derive_profile(Profile::from_index(n, base + k), rule);
        if (r.certificate) {
          it.replay = replay_certificate(*r.certificate, rule);
          it.cert = std::move(r.certificate);
        } else {
          it.failure = std::move(r.failure);
        }
      }
    });
    for (long long k = 0; k < count; ++k) {
      const long long idx = base + k;
      Item& it = items[static_cast<size_t>(k)];
      if (it.cert) {
        out.certificates_valid += 1;
        out.replay_checks += it.replay.checks;
        if (it.replay.valid) {
          out.replays_valid += 1;
        } else {
          failures_seen += 1;
          if (out.failures.size() < kMaxStoredReports) {
            out.failures.push_back({idx, "replay", it.replay.error});
          }
        }
        if (options.on_certificate) options.on_certificate(idx, *it.cert);
      } else {
        failures_seen += 1;
        if (out.failures.size() < kMaxStoredReports) {
          CertifyFailure f;
          f.profile_index = idx;
          if (it.failure) {
            f.stage = it.failure->step_kind ? step_kind_name(*it.failure->step_kind) : "";
            f.message = it.failure->message;
          } else {
            f.message = "derivation failed";
          }
          out.failures.push_back(std::move(f));
        }
      }
    }
  }

  out.ok = out.certificates_valid == total && out.replays_valid == total;
  if (out.ok) {
    out.detail = "derived and replayed " + std::to_string(total) + " certificates";
  } else {
    out.detail = std::to_string(out.certificates_valid) + " of " + std::to_string(total) +
                 " profiles certified; " + std::to_string(out.replays_valid) + " replays valid";
    if (failures_seen > static_cast<long long>(out.failures.size())) {
      out.detail += "; failure list truncated";
    }
  }
  out.wall_seconds = seconds_since(start);
  return out;
}

}  // namespace ttcv
