#include "ttcv/io.hpp"

#include <algorithm>
#include <set>

#include "json.hpp"

namespace ttcv {

using nlohmann::json;

namespace {

[[noreturn]] void fail(ParseErrorKind kind, const std::string& path, const std::string& msg) {
  throw ParseError(kind, path, msg);
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ParseErrorKind::MalformedJson, "$", e.what());
  }
}

std::string at(const std::string& path, size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& member(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(ParseErrorKind::MalformedJson, path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(ParseErrorKind::MissingEntry, path + "." + key, "missing field");
  return *it;
}

long long to_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(ParseErrorKind::MalformedJson, path, "expected an integer");
  return j.get<long long>();
}

const json& to_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(ParseErrorKind::MalformedJson, path, "expected an array");
  return j;
}

int read_n(const json& j, const std::string& path) {
  long long n = to_int(member(j, "n", path), path + ".n");
  if (n < 2) fail(ParseErrorKind::SizeMismatch, path + ".n", "needs at least 2 agents");
  if (n > 16) fail(ParseErrorKind::SizeMismatch, path + ".n", "at most 16 agents supported");
  return static_cast<int>(n);
}

// 1-based label in 1..n, returned 0-based.
int to_label(const json& j, int n, const std::string& path) {
  long long v = to_int(j, path);
  if (v < 1 || v > n) {
    fail(ParseErrorKind::InvalidPermutation, path, "label outside 1.." + std::to_string(n));
  }
  return static_cast<int>(v - 1);
}

std::vector<int> to_permutation(const json& j, int n, const std::string& path) {
  const json& a = to_array(j, path);
  if (static_cast<int>(a.size()) != n) {
    fail(ParseErrorKind::SizeMismatch, path,
         "expected " + std::to_string(n) + " entries, got " + std::to_string(a.size()));
  }
  std::vector<int> out;
  std::vector<char> seen(static_cast<size_t>(n), 0);
  for (size_t i = 0; i < a.size(); ++i) {
    int v = to_label(a[i], n, at(path, i));
    if (seen[static_cast<size_t>(v)]) {
      fail(ParseErrorKind::InvalidPermutation, at(path, i), "not a permutation");
    }
    seen[static_cast<size_t>(v)] = 1;
    out.push_back(v);
  }
  return out;
}

std::vector<int> to_label_list(const json& j, int n, const std::string& path) {
  const json& a = to_array(j, path);
  std::vector<int> out;
  for (size_t i = 0; i < a.size(); ++i) out.push_back(to_label(a[i], n, at(path, i)));
  return out;
}

Rational to_rational(const json& j, const std::string& path) {
  if (!j.is_string()) {
    fail(ParseErrorKind::InvalidRational, path, "rationals must be strings");
  }
  auto r = Rational::try_parse(j.get<std::string>());
  if (!r) fail(ParseErrorKind::InvalidRational, path, "not a rational: " + j.get<std::string>());
  return *r;
}

AssignmentMatrix to_matrix_rows(const json& rows, int n, const std::string& path) {
  const json& a = to_array(rows, path);
  if (static_cast<int>(a.size()) != n) {
    fail(ParseErrorKind::SizeMismatch, path, "expected " + std::to_string(n) + " rows");
  }
  std::vector<Rational> entries;
  entries.reserve(static_cast<size_t>(n) * n);
  for (size_t i = 0; i < a.size(); ++i) {
    const json& row = to_array(a[i], at(path, i));
    if (static_cast<int>(row.size()) != n) {
      fail(ParseErrorKind::SizeMismatch, at(path, i),
           "expected " + std::to_string(n) + " entries");
    }
    for (size_t x = 0; x < row.size(); ++x) {
      entries.push_back(to_rational(row[x], at(at(path, i), x)));
    }
  }
  try {
    return AssignmentMatrix(n, std::move(entries));
  } catch (const std::invalid_argument& e) {
    fail(ParseErrorKind::NotBistochastic, path, e.what());
  }
}

json ranking_json(const Preference& pref) {
  json a = json::array();
  for (int pos = 0; pos < pref.n(); ++pos) a.push_back(pref.object_at(pos) + 1);
  return a;
}

json preferences_json(const Profile& profile) {
  json a = json::array();
  for (int i = 0; i < profile.n(); ++i) a.push_back(ranking_json(profile.pref(i)));
  return a;
}

json rows_json(const AssignmentMatrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.n(); ++i) {
    json row = json::array();
    for (int x = 0; x < m.n(); ++x) row.push_back(m.at(i, x).str());
    rows.push_back(std::move(row));
  }
  return rows;
}

json matrix_json(const AssignmentMatrix& m) {
  json j;
  j["n"] = m.n();
  j["rows"] = rows_json(m);
  return j;
}

Profile to_profile(const json& prefs, int n, const std::string& path) {
  const json& a = to_array(prefs, path);
  if (static_cast<int>(a.size()) != n) {
    fail(ParseErrorKind::SizeMismatch, path,
         "expected " + std::to_string(n) + " preference lists");
  }
  std::vector<Preference> list;
  for (size_t i = 0; i < a.size(); ++i) {
    list.emplace_back(to_permutation(a[i], n, at(path, i)));
  }
  return Profile(std::move(list));
}

json report_json(const AxiomReport& report) {
  json j;
  j["axiom"] = axiom_name(report.axiom);
  j["holds"] = report.holds;
  if (report.counterexample) {
    const AxiomCounterexample& ce = *report.counterexample;
    json c;
    if (ce.profile_index) c["profile_index"] = *ce.profile_index;
    if (ce.profile) c["profile"] = preferences_json(*ce.profile);
    if (ce.agent) c["agent"] = *ce.agent + 1;
    if (ce.misreport) c["misreport"] = ranking_json(*ce.misreport);
    if (ce.witness_object) c["witness_object"] = *ce.witness_object + 1;
    if (ce.dominating) c["dominating"] = rows_json(*ce.dominating);
    if (ce.object_cycle) {
      json cyc = json::array();
      for (int x : *ce.object_cycle) cyc.push_back(x + 1);
      c["object_cycle"] = std::move(cyc);
    }
    c["detail"] = ce.detail;
    j["counterexample"] = std::move(c);
  }
  return j;
}

StepKind to_step_kind(const std::string& name, const std::string& path) {
  for (StepKind k : {StepKind::SingletonIr, StepKind::CycleClosure, StepKind::CycleEfficiency,
                     StepKind::TopSpTransfer, StepKind::InductionReduce}) {
    if (name == step_kind_name(k)) return k;
  }
  fail(ParseErrorKind::MalformedJson, path, "unknown step kind: " + name);
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

const char* parse_error_kind_name(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::MalformedJson: return "malformed-json";
    case ParseErrorKind::InvalidPermutation: return "invalid-permutation";
    case ParseErrorKind::SizeMismatch: return "size-mismatch";
    case ParseErrorKind::InvalidRational: return "invalid-rational";
    case ParseErrorKind::NotBistochastic: return "not-bistochastic";
    case ParseErrorKind::MissingEntry: return "missing-entry";
  }
  return "unknown";
}

ParseError::ParseError(ParseErrorKind kind, std::string path, const std::string& message)
    : std::runtime_error(path + ": " + message), kind_(kind), path_(std::move(path)) {}

ProfileDocument parse_profile(const std::string& text) {
  json j = parse_text(text);
  const int n = read_n(j, "$");
  std::vector<int> original(static_cast<size_t>(n));
  for (int x = 0; x < n; ++x) original[static_cast<size_t>(x)] = x + 1;
  Profile profile = to_profile(member(j, "preferences", "$"), n, "$.preferences");
  if (j.contains("endowment")) {
    // endowment[a] = object owned by agent a; rename objects so agent i owns
    // object i, keeping every ranking's order.
    std::vector<int> endow = to_permutation(j["endowment"], n, "$.endowment");
    std::vector<int> owner(static_cast<size_t>(n), -1);
    for (int a = 0; a < n; ++a) owner[static_cast<size_t>(endow[static_cast<size_t>(a)])] = a;
    std::vector<Preference> renamed;
    for (int a = 0; a < n; ++a) {
      std::vector<int> ranking;
      for (int pos = 0; pos < n; ++pos) {
        ranking.push_back(owner[static_cast<size_t>(profile.pref(a).object_at(pos))]);
      }
      renamed.emplace_back(std::move(ranking));
    }
    profile = Profile(std::move(renamed));
    for (int x = 0; x < n; ++x) original[static_cast<size_t>(x)] = endow[static_cast<size_t>(x)] + 1;
  }
  return ProfileDocument{std::move(profile), std::move(original)};
}

std::string format_profile(const Profile& profile) {
  json j;
  j["n"] = profile.n();
  j["preferences"] = preferences_json(profile);
  return j.dump(2);
}

std::string format_profile_line(long long index, const Profile& profile) {
  json j;
  j["index"] = index;
  j["preferences"] = preferences_json(profile);
  return j.dump();
}

AssignmentMatrix parse_matrix(const std::string& text) {
  json j = parse_text(text);
  const int n = read_n(j, "$");
  return to_matrix_rows(member(j, "rows", "$"), n, "$.rows");
}

std::string format_matrix(const AssignmentMatrix& matrix) { return matrix_json(matrix).dump(2); }

std::string format_ttc_result(const TtcResult& result, bool include_trace) {
  json j = matrix_json(AssignmentMatrix::from_permutation(result.assignment));
  if (include_trace) {
    json rounds = json::array();
    for (const TtcRound& r : result.trace.rounds) {
      json e;
      e["round"] = r.round;
      json cycles = json::array();
      for (const std::vector<int>& c : r.cycles) {
        json cyc = json::array();
        for (int a : c) cyc.push_back(a + 1);
        cycles.push_back(std::move(cyc));
      }
      e["cycles"] = std::move(cycles);
      json assignments = json::array();
      for (const auto& [agent, object] : r.assignments) {
        assignments.push_back({agent + 1, object + 1});
      }
      e["assignments"] = std::move(assignments);
      rounds.push_back(std::move(e));
    }
    j["trace"]["rounds"] = std::move(rounds);
  }
  return j.dump(2);
}

std::string format_axiom_report(const AxiomReport& report) { return report_json(report).dump(2); }

std::string format_certificate(const Certificate& certificate) {
  json j;
  j["n"] = certificate.n;
  j["rule"] = certificate.rule_name;
  json profiles = json::array();
  for (const Profile& p : certificate.profiles) {
    json entry;
    entry["index"] = p.index();
    entry["preferences"] = preferences_json(p);
    profiles.push_back(std::move(entry));
  }
  j["profiles"] = std::move(profiles);
  json steps = json::array();
  for (const DerivationStep& s : certificate.steps) {
    json e;
    e["kind"] = step_kind_name(s.kind);
    e["level"] = s.level;
    e["profile"] = s.profile_id;
    if (!s.cycle.empty()) {
      json cyc = json::array();
      for (int a : s.cycle) cyc.push_back(a + 1);
      e["cycle"] = std::move(cyc);
    }
    if (s.agent >= 0) e["agent"] = s.agent + 1;
    if (s.object >= 0) e["object"] = s.object + 1;
    if (s.chain_target >= 0) e["chain_target"] = s.chain_target + 1;
    if (s.chain_pos > 0) e["chain_pos"] = s.chain_pos;
    if (s.premise_profile_id >= 0) e["premise"] = s.premise_profile_id;
    if (!s.pins.empty()) {
      json pins = json::array();
      for (const PinFact& p : s.pins) pins.push_back({p.agent + 1, p.object + 1});
      e["pins"] = std::move(pins);
    }
    if (!s.removed_agents.empty()) {
      json rem = json::array();
      for (int a : s.removed_agents) rem.push_back(a + 1);
      e["removed"] = std::move(rem);
    }
    steps.push_back(std::move(e));
  }
  j["steps"] = std::move(steps);
  j["conclusion"] = rows_json(certificate.conclusion);
  if (!certificate.notes.empty()) j["notes"] = certificate.notes;
  return j.dump(2);
}

Certificate parse_certificate(const std::string& text) {
  json j = parse_text(text);
  const int n = read_n(j, "$");
  std::string rule = "ttc";
  if (j.contains("rule")) {
    if (!j["rule"].is_string()) fail(ParseErrorKind::MalformedJson, "$.rule", "expected a string");
    rule = j["rule"].get<std::string>();
  }
  const json& profs = to_array(member(j, "profiles", "$"), "$.profiles");
  if (profs.empty()) fail(ParseErrorKind::SizeMismatch, "$.profiles", "needs at least one profile");
  std::vector<Profile> profiles;
  for (size_t i = 0; i < profs.size(); ++i) {
    const std::string path = at("$.profiles", i);
    profiles.push_back(to_profile(member(profs[i], "preferences", path), n,
                                  path + ".preferences"));
  }
  const json& steps_j = to_array(member(j, "steps", "$"), "$.steps");
  std::vector<DerivationStep> steps;
  for (size_t i = 0; i < steps_j.size(); ++i) {
    const std::string path = at("$.steps", i);
    const json& e = steps_j[i];
    DerivationStep s;
    const json& kind = member(e, "kind", path);
    if (!kind.is_string()) fail(ParseErrorKind::MalformedJson, path + ".kind", "expected a string");
    s.kind = to_step_kind(kind.get<std::string>(), path + ".kind");
    s.level = static_cast<int>(to_int(member(e, "level", path), path + ".level"));
    s.profile_id = to_int(member(e, "profile", path), path + ".profile");
    if (e.contains("cycle")) s.cycle = to_label_list(e["cycle"], n, path + ".cycle");
    if (e.contains("agent")) s.agent = to_label(e["agent"], n, path + ".agent");
    if (e.contains("object")) s.object = to_label(e["object"], n, path + ".object");
    if (e.contains("chain_target")) {
      s.chain_target = to_label(e["chain_target"], n, path + ".chain_target");
    }
    if (e.contains("chain_pos")) {
      s.chain_pos = static_cast<int>(to_int(e["chain_pos"], path + ".chain_pos"));
    }
    if (e.contains("premise")) s.premise_profile_id = to_int(e["premise"], path + ".premise");
    if (e.contains("pins")) {
      const json& pins = to_array(e["pins"], path + ".pins");
      for (size_t p = 0; p < pins.size(); ++p) {
        const std::string ppath = at(path + ".pins", p);
        const json& pin = to_array(pins[p], ppath);
        if (pin.size() != 2) fail(ParseErrorKind::SizeMismatch, ppath, "expected [agent, object]");
        s.pins.push_back(PinFact{to_label(pin[0], n, at(ppath, 0)),
                                 to_label(pin[1], n, at(ppath, 1))});
      }
    }
    if (e.contains("removed")) {
      s.removed_agents = to_label_list(e["removed"], n, path + ".removed");
    }
    steps.push_back(std::move(s));
  }
  AssignmentMatrix conclusion = to_matrix_rows(member(j, "conclusion", "$"), n, "$.conclusion");
  std::vector<std::string> notes;
  if (j.contains("notes")) {
    const json& ns = to_array(j["notes"], "$.notes");
    for (size_t i = 0; i < ns.size(); ++i) {
      if (!ns[i].is_string()) fail(ParseErrorKind::MalformedJson, at("$.notes", i), "expected a string");
      notes.push_back(ns[i].get<std::string>());
    }
  }
  Profile target = profiles.front();
  return Certificate{n,          std::move(rule),  std::move(target), std::move(profiles),
                     std::move(steps), std::move(conclusion), std::move(notes)};
}

std::string format_batch_result(const BatchResult& result, bool include_timing) {
  json j;
  j["task"] = result.task;
  j["n"] = result.n;
  j["rule"] = result.rule_name;
  j["space_size"] = result.space_size;
  j["ok"] = result.ok;
  j["detail"] = result.detail;
  if (!result.tallies.empty()) {
    json tallies = json::array();
    for (const AxiomTally& t : result.tallies) {
      json e;
      e["axiom"] = axiom_name(t.axiom);
      e["passed"] = t.passed;
      e["failed"] = t.failed;
      tallies.push_back(std::move(e));
    }
    j["tallies"] = std::move(tallies);
  }
  if (!result.counterexamples.empty()) {
    json ces = json::array();
    for (const AxiomReport& r : result.counterexamples) ces.push_back(report_json(r));
    j["counterexamples"] = std::move(ces);
  }
  if (result.certificates_total > 0) {
    json c;
    c["total"] = result.certificates_total;
    c["valid"] = result.certificates_valid;
    c["replays_valid"] = result.replays_valid;
    c["replay_checks"] = result.replay_checks;
    j["certificates"] = std::move(c);
  }
  if (!result.failures.empty()) {
    json fs = json::array();
    for (const CertifyFailure& f : result.failures) {
      json e;
      e["profile_index"] = f.profile_index;
      e["stage"] = f.stage;
      e["message"] = f.message;
      fs.push_back(std::move(e));
    }
    j["failures"] = std::move(fs);
  }
  if (result.survivors >= 0) {
    j["survivors"] = result.survivors;
    j["survivor_is_ttc"] = result.survivor_is_ttc;
  }
  if (include_timing) j["wall_seconds"] = result.wall_seconds;
  return j.dump(2);
}

std::string batch_result_csv(const BatchResult& result) {
  std::string out;
  if (result.task == "certify") {
    out = "profile_index,stage,message\n";
    for (const CertifyFailure& f : result.failures) {
      out += std::to_string(f.profile_index) + "," + csv_escape(f.stage) + "," +
             csv_escape(f.message) + "\n";
    }
  } else if (result.task == "verify-uniqueness") {
    out = "survivors,survivor_is_ttc\n";
    out += std::to_string(result.survivors) + "," + (result.survivor_is_ttc ? "true" : "false") +
           "\n";
  } else {
    out = "axiom,profile_index,agent,misreport,witness_object,detail\n";
    for (const AxiomReport& r : result.counterexamples) {
      std::string row = axiom_name(r.axiom);
      row += ",";
      if (r.counterexample) {
        const AxiomCounterexample& ce = *r.counterexample;
        if (ce.profile_index) row += std::to_string(*ce.profile_index);
        row += ",";
        if (ce.agent) row += std::to_string(*ce.agent + 1);
        row += ",";
        if (ce.misreport) {
          std::string mis;
          for (int pos = 0; pos < ce.misreport->n(); ++pos) {
            if (pos) mis += ">";
            mis += std::to_string(ce.misreport->object_at(pos) + 1);
          }
          row += mis;
        }
        row += ",";
        if (ce.witness_object) row += std::to_string(*ce.witness_object + 1);
        row += "," + csv_escape(ce.detail);
      } else {
        row += ",,,,";
      }
      out += row + "\n";
    }
  }
  return out;
}

RuleOracle parse_rule_table(const std::string& text) {
  json j = parse_text(text);
  const int n = read_n(j, "$");
  if (n > 4) fail(ParseErrorKind::SizeMismatch, "$.n", "rule tables support at most n = 4");
  std::string name = "table";
  if (j.contains("name")) {
    if (!j["name"].is_string()) fail(ParseErrorKind::MalformedJson, "$.name", "expected a string");
    name = j["name"].get<std::string>();
  }
  const json& outcomes = member(j, "outcomes", "$");
  if (!outcomes.is_object()) fail(ParseErrorKind::MalformedJson, "$.outcomes", "expected an object");
  const long long total = Profile::space_size(n);
  for (const auto& [key, value] : outcomes.items()) {
    (void)value;
    size_t used = 0;
    long long idx = -1;
    try {
      idx = std::stoll(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || idx < 0 || idx >= total || key != std::to_string(idx)) {
      fail(ParseErrorKind::MalformedJson, "$.outcomes", "not a profile index: \"" + key + "\"");
    }
  }
  std::vector<AssignmentMatrix> table;
  table.reserve(static_cast<size_t>(total));
  for (long long idx = 0; idx < total; ++idx) {
    const std::string key = std::to_string(idx);
    auto it = outcomes.find(key);
    if (it == outcomes.end()) {
      fail(ParseErrorKind::MissingEntry, "$.outcomes." + key,
           "rule table lacks an outcome for this profile");
    }
    table.push_back(to_matrix_rows(*it, n, "$.outcomes." + key));
  }
  return make_table_rule(n, std::move(table), std::move(name));
}

}  // namespace ttcv
