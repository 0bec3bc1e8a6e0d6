#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ttcv/io.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int default_jobs() {
  if (const char* env = std::getenv("TTCV_JOBS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

// Matrix documents accompanying a relabeled profile use the document's object
// names; bring the columns into canonical order (agent i owns object i).
ttcv::AssignmentMatrix canonical_columns(const ttcv::AssignmentMatrix& m,
                                         const std::vector<int>& original_label) {
  const int n = m.n();
  bool identity = true;
  for (int x = 0; x < n; ++x) {
    if (original_label[static_cast<size_t>(x)] != x + 1) identity = false;
  }
  if (identity) return m;
  std::vector<ttcv::Rational> entries;
  entries.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int x = 0; x < n; ++x) {
      entries.push_back(m.at(i, original_label[static_cast<size_t>(x)] - 1));
    }
  }
  return ttcv::AssignmentMatrix(n, std::move(entries));
}

void note_relabel(const std::vector<int>& original_label) {
  for (size_t x = 0; x < original_label.size(); ++x) {
    if (original_label[x] != static_cast<int>(x) + 1) {
      std::cerr << "note: objects relabeled to the canonical endowment; canonical object i is "
                   "the document object owned by agent i\n";
      return;
    }
  }
}

void print_batch(const ttcv::BatchResult& result, const std::string& format) {
  if (format == "csv") {
    std::cout << ttcv::batch_result_csv(result);
  } else {
    std::cout << ttcv::format_batch_result(result) << "\n";
  }
  std::cerr << result.detail << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact verification toolkit for object reallocation with endowments"};
  app.require_subcommand(1);

  std::string profile_path;
  std::string matrix_path;
  std::string axiom;
  std::string rule_path;
  std::string cert_dir;
  std::string format = "json";
  bool trace = false;
  bool literal_rounds = false;
  int n = 0;
  int jobs = default_jobs();

  CLI::App* c_ttc = app.add_subcommand("ttc", "compute the trading-cycles outcome of a profile");
  c_ttc->add_option("--profile", profile_path, "profile document (JSON)")->required();
  c_ttc->add_flag("--trace", trace, "include the round-by-round trace");
  c_ttc->add_flag("--literal-rounds", literal_rounds,
                  "clear only the smallest cycle each round (same outcome)");

  CLI::App* c_check = app.add_subcommand("check", "check one axiom on a profile and a matrix");
  c_check->add_option("--axiom", axiom, "ir or eff")
      ->required()
      ->check(CLI::IsMember({"ir", "eff"}));
  c_check->add_option("--profile", profile_path, "profile document (JSON)")->required();
  c_check->add_option("--matrix", matrix_path, "matrix document (JSON)")->required();

  CLI::App* c_axioms =
      app.add_subcommand("verify-axioms", "verify all four axioms for trading cycles exhaustively");
  c_axioms->add_option("--n", n, "instance size")->required()->check(CLI::Range(2, 4));
  c_axioms->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  c_axioms->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  CLI::App* c_unique = app.add_subcommand(
      "verify-uniqueness", "search all efficient individually-rational deterministic rules");
  c_unique->add_option("--n", n, "instance size")->required()->check(CLI::Range(2, 3));
  c_unique->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  CLI::App* c_certify =
      app.add_subcommand("certify", "derive and replay a certificate at every profile");
  c_certify->add_option("--n", n, "instance size")->required()->check(CLI::Range(2, 4));
  c_certify->add_option("--rule", rule_path, "table-rule document (JSON); default trading cycles");
  c_certify->add_option("--certificates", cert_dir, "directory to write certificates into");
  c_certify->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  c_certify->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  CLI::App* c_enum = app.add_subcommand("enumerate", "stream every profile, one JSON per line");
  c_enum->add_option("--n", n, "instance size")->required()->check(CLI::Range(2, 4));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (c_ttc->parsed()) {
      ttcv::ProfileDocument doc = ttcv::parse_profile(read_file(profile_path));
      note_relabel(doc.original_label);
      ttcv::TtcResult result = ttcv::run_ttc(
          doc.profile, literal_rounds ? ttcv::RoundMode::SmallestCycleOnly
                                      : ttcv::RoundMode::AllCycles);
      std::cout << ttcv::format_ttc_result(result, trace) << "\n";
      return 0;
    }
    if (c_check->parsed()) {
      ttcv::ProfileDocument doc = ttcv::parse_profile(read_file(profile_path));
      ttcv::AssignmentMatrix matrix = ttcv::parse_matrix(read_file(matrix_path));
      if (matrix.n() != doc.profile.n()) {
        std::cerr << "error: matrix order " << matrix.n() << " does not match profile order "
                  << doc.profile.n() << "\n";
        return 2;
      }
      note_relabel(doc.original_label);
      matrix = canonical_columns(matrix, doc.original_label);
      ttcv::AxiomReport report = axiom == "ir" ? ttcv::check_sd_ir(doc.profile, matrix)
                                               : ttcv::check_sd_efficient(doc.profile, matrix);
      std::cout << ttcv::format_axiom_report(report) << "\n";
      return report.holds ? 0 : 1;
    }
    if (c_axioms->parsed()) {
      ttcv::BatchResult result = ttcv::verify_ttc_axioms(n, jobs);
      print_batch(result, format);
      return result.ok ? 0 : 1;
    }
    if (c_unique->parsed()) {
      ttcv::BatchResult result = ttcv::verify_uniqueness_deterministic(n);
      print_batch(result, format);
      return result.ok ? 0 : 1;
    }
    if (c_certify->parsed()) {
      ttcv::RuleOracle rule =
          rule_path.empty() ? ttcv::make_ttc_rule(n) : ttcv::parse_rule_table(read_file(rule_path));
      if (rule.n != n) {
        std::cerr << "error: rule table order " << rule.n << " does not match --n " << n << "\n";
        return 2;
      }
      ttcv::CertifyOptions options;
      options.jobs = jobs;
      if (!cert_dir.empty()) {
        std::filesystem::create_directories(cert_dir);
        options.on_certificate = [&cert_dir](long long idx, const ttcv::Certificate& cert) {
          std::filesystem::path file =
              std::filesystem::path(cert_dir) / ("cert_" + std::to_string(idx) + ".json");
          std::ofstream out(file);
          out << ttcv::format_certificate(cert) << "\n";
        };
        std::cerr << "writing certificates to " << cert_dir << "\n";
      }
      ttcv::BatchResult result = ttcv::certify_all(n, rule, options);
      print_batch(result, format);
      return result.ok ? 0 : 1;
    }
    if (c_enum->parsed()) {
      ttcv::ProfileSpace space(n);
      for (long long idx = 0; idx < space.size(); ++idx) {
        std::cout << ttcv::format_profile_line(idx, space.at(idx)) << "\n";
      }
      return 0;
    }
  } catch (const ttcv::ParseError& e) {
    std::cerr << "parse error (" << ttcv::parse_error_kind_name(e.kind()) << ") at " << e.what()
              << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
