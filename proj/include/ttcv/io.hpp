#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ttcv/checkers.hpp"
#include "ttcv/derivation.hpp"
#include "ttcv/harness.hpp"
#include "ttcv/ttc.hpp"

namespace ttcv {

// JSON conventions: agents and objects carry the 1-based labels used in
// human-facing text; profile encodings (base-n! indices) stay 0-based.
// Rationals travel as canonical strings ("1/3", "0"), never as floats.

enum class ParseErrorKind {
  MalformedJson,
  InvalidPermutation,
  SizeMismatch,
  InvalidRational,
  NotBistochastic,
  MissingEntry,
};

const char* parse_error_kind_name(ParseErrorKind k);

// what() reads "<path>: <message>"; path is a JSON pointer-ish locator like
// "$.rows[2][0]".
class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, std::string path, const std::string& message);
  ParseErrorKind kind() const { return kind_; }
  const std::string& path() const { return path_; }

 private:
  ParseErrorKind kind_;
  std::string path_;
};

// The parsed profile in canonical labeling. When the document names an
// "endowment", objects are renamed so agent i owns object i and
// original_label[x] keeps canonical object x's 1-based name from the
// document (identity otherwise).
struct ProfileDocument {
  Profile profile;
  std::vector<int> original_label;
};

// {"n": 2, "preferences": [[2,1],[1,2]], "endowment": [2,1]?}
ProfileDocument parse_profile(const std::string& text);
std::string format_profile(const Profile& profile);
// Compact single line {"index": ..., "preferences": [...]} for streaming.
std::string format_profile_line(long long index, const Profile& profile);

// {"n": 2, "rows": [["1","0"],["0","1"]]}
AssignmentMatrix parse_matrix(const std::string& text);
std::string format_matrix(const AssignmentMatrix& matrix);

// MatrixDocument for the outcome; with include_trace, a "trace" field lists
// each round's cycles and (agent, object) assignments. The result still
// parses as a MatrixDocument.
std::string format_ttc_result(const TtcResult& result, bool include_trace);

std::string format_axiom_report(const AxiomReport& report);

// Steps in derivation order; parse(format(c)) == c.
std::string format_certificate(const Certificate& certificate);
Certificate parse_certificate(const std::string& text);

std::string format_batch_result(const BatchResult& result, bool include_timing = true);
// One row per stored counterexample or failure, headed by task-specific columns.
std::string batch_result_csv(const BatchResult& result);

// {"n": N, "name"?: string, "outcomes": {"<profile index>": [["1","0"],...]}}
// needs one entry per profile index; totality is enforced at load time.
RuleOracle parse_rule_table(const std::string& text);

}  // namespace ttcv
