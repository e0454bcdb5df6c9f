// Acceptance suite: one check per release criterion, one pass/fail line each.
// Exits non-zero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "semlens/experiment.hpp"
#include "semlens/oracle.hpp"
#include "semlens/report.hpp"
#include "semlens/util.hpp"
#include "test_support.hpp"

using namespace semlens;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct JudgedCounts {
  int applied = 0;
  int equivalent = 0;
  int changed = 0;
  int inconclusive = 0;
  int anomalies_flagged = 0;
};

JudgedCounts judge_operators(const std::vector<FunctionUnit>& units,
                             const std::vector<std::string>& operator_ids) {
  JudgedCounts counts;
  OracleConfig config;
  std::mutex mu;
  parallel_for(units.size(), 2, [&](std::size_t i) {
    OracleSession session(config);
    for (const auto& op : operator_ids) {
      auto outcome = apply(units[i], op, 0);
      if (outcome.status != ApplyStatus::Applied) continue;
      auto v = session.judge(units[i], outcome);
      std::lock_guard<std::mutex> lk(mu);
      ++counts.applied;
      switch (v.label) {
        case VerdictLabel::Equivalent: ++counts.equivalent; break;
        case VerdictLabel::Changed: ++counts.changed; break;
        case VerdictLabel::Inconclusive: ++counts.inconclusive; break;
      }
      if (v.anomaly) ++counts.anomalies_flagged;
    }
  });
  return counts;
}

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

}  // namespace

int main() {
  auto units = semlens::testing::all_sample_units();
  int n_python = 0, n_java = 0;
  bool tests_ok = true;
  for (const auto& u : units) {
    (u.language == Language::Python ? n_python : n_java) += 1;
    if (u.tests.size() < 3) tests_ok = false;
  }

  // 1. SP preservation: every Applied SP outcome judged Equivalent, < 2 min.
  {
    auto start = Clock::now();
    JudgedCounts sp = judge_operators(
        units, {"sp.rename_var", "sp.reorder_params", "sp.swap_branches_negate",
                "sp.for_to_while"});
    double elapsed = seconds_since(start);
    bool corpus_ok = n_python >= 20 && n_java >= 20 && tests_ok;
    bool pass = corpus_ok && sp.applied > 0 && sp.equivalent == sp.applied &&
                elapsed < 120.0;
    report(1, "SP preservation", pass,
           fmt("%.0f/%.0f applied SP outcomes Equivalent in %.1fs",
               static_cast<double>(sp.equivalent), static_cast<double>(sp.applied),
               elapsed) +
               (corpus_ok ? "" : " [corpus size/tests requirement unmet]"));
  }

  // 2. SNP effectiveness: >= 90% of negate_condition/remove_conditional
  //    outcomes judged Changed; every exception flagged as an anomaly.
  {
    JudgedCounts snp =
        judge_operators(units, {"snp.negate_condition", "snp.remove_conditional"});
    double changed_rate =
        snp.applied == 0 ? 0.0 : static_cast<double>(snp.changed) / snp.applied;
    int exceptions = snp.applied - snp.changed;
    bool pass = snp.applied > 0 && changed_rate >= 0.90 &&
                snp.anomalies_flagged >= exceptions && snp.inconclusive == 0;
    report(2, "SNP effectiveness", pass,
           fmt("changed %.0f of %.0f applied (%.1f%%), exceptions flagged",
               static_cast<double>(snp.changed), static_cast<double>(snp.applied),
               changed_rate * 100.0));
  }

  // 3. Dependence oracle equivalence on all corpus functions <= 12 statements.
  {
    int checked = 0, mismatched = 0, oversized = 0;
    for (const auto& u : units) {
      if (u.statements.size() > 12) {
        ++oversized;
        continue;
      }
      ++checked;
      if (control_dependence(u) != semlens::testing::oracle_control_pairs(u))
        ++mismatched;
      if (data_dependence(u) != semlens::testing::oracle_data_pairs(u)) ++mismatched;
    }
    bool pass = checked > 0 && mismatched == 0;
    report(3, "Dependence oracle equivalence", pass,
           fmt("%.0f functions checked, %.0f mismatches, %.0f skipped (oversize)",
               checked, mismatched, oversized));
  }

  // 4. Metric algebra: frozen hand-derived values.
  {
    auto name = name_similarity("isPalindromeAndSumLessThen", "isSymmetric");
    bool name_ok = std::abs(name.lexical - 0.25) < 1e-9 && !name.exact;

    DependenceGraph truth;
    truth.control_pairs = {{6, 7}, {6, 9}, {17, 18}, {17, 21}, {17, 19}, {17, 22}};
    auto scores = dependence_scores({{6, 7}, {6, 9}}, truth, DependenceKind::Control);
    bool deps_ok = std::abs(scores.precision - 1.0) < 1e-9 &&
                   std::abs(scores.recall - 1.0 / 3.0) <= 0.001 &&
                   std::abs(scores.f1 - 0.5) < 1e-9;

    struct Case {
      const char* a;
      const char* b;
      Language lang;
      bool want;
    };
    const Case table[] = {
        {"1", "1", Language::Python, true},
        {"True", "true", Language::Python, true},
        {"[1, 2]", "[1,2]", Language::Python, true},
        {"1.0", "1", Language::Java, true},
        {"'a'", "\"a\"", Language::Python, true},
        {"[1, 2]", "[2, 1]", Language::Python, false},
        {"1", "2", Language::Python, false},
        {"3.14159", "3.1415926", Language::Python, false},
        {"1.0000001", "1.0", Language::Python, true},
        {"None", "null", Language::Python, true},
        {"[[1], [2]]", "[[1],[2]]", Language::Java, true},
        {"abc", "abd", Language::Python, false},
    };
    int table_pass = 0;
    for (const auto& c : table)
      if (output_equality(c.a, c.b, c.lang) == c.want) ++table_pass;
    bool pass = name_ok && deps_ok && table_pass == 12;
    report(4, "Metric algebra", pass,
           fmt("name F1 %.4f, dependence (%.3f, %.3f", name.lexical, scores.precision,
               scores.recall) +
               fmt(", %.3f), equality table %.0f/12", scores.f1,
                   static_cast<double>(table_pass)));
  }

  // 5. Closed-loop sanity: echo RQ1 all-1/all-0 and oracle RQ4 all-1, < 60 s.
  fs::path work = fs::temp_directory_path() / "semlens_acceptance";
  fs::remove_all(work);
  {
    auto start = Clock::now();
    ExperimentConfig config;
    config.corpus_paths = {semlens::testing::python_corpus_path(),
                           semlens::testing::java_corpus_path()};
    config.runs_dir = (work / "runs").string();
    config.concurrency = 2;
    auto rq1 = run_rq1(config);
    bool rows_ok = !rq1.operator_rows.empty();
    for (const auto& row : rq1.operator_rows) {
      if (row.n == 0) continue;
      if (row.robustness && std::abs(*row.robustness - 1.0) > 1e-12) rows_ok = false;
      if (row.sensitivity && std::abs(*row.sensitivity) > 1e-12) rows_ok = false;
    }
    ExperimentConfig oc = config;
    ModelConfig mock;
    mock.kind = "oracle";
    mock.model_id = "oracle-1";
    oc.models = {mock};
    auto rq4 = run_rq4(oc);
    bool deps_ok = !rq4.dependence_rows.empty();
    for (const auto& row : rq4.dependence_rows) {
      if (std::abs(row.precision - 1.0) > 1e-12 || std::abs(row.recall - 1.0) > 1e-12 ||
          std::abs(row.f1 - 1.0) > 1e-12)
        deps_ok = false;
    }
    double elapsed = seconds_since(start);
    bool pass = rows_ok && deps_ok && elapsed < 60.0;
    report(5, "Closed-loop sanity", pass,
           std::string("echo RQ1 ") + (rows_ok ? "ideal" : "off-ideal") +
               ", oracle RQ4 " + (deps_ok ? "ideal" : "off-ideal") +
               fmt(", %.1fs", elapsed));
  }

  // 6. Replay determinism: reports re-derived from the recorded cache are
  //    byte-identical (CSV and JSON).
  {
    ExperimentConfig config;
    config.corpus_paths = {semlens::testing::python_corpus_path(),
                           semlens::testing::java_corpus_path()};
    config.runs_dir = (work / "runs").string();
    config.concurrency = 2;
    auto first = run_rq1(config);
    std::string csv_a = read_file(first.run_dir / "reports" / "rq1_summary.csv");
    std::string json_a = read_file(first.run_dir / "reports" / "rq1_summary.json");
    std::string ops_a = read_file(first.run_dir / "reports" / "rq1_operator_rows.csv");
    fs::remove_all(first.run_dir);
    auto second = run_rq1(config);  // served from the recorded cache
    bool pass = read_file(second.run_dir / "reports" / "rq1_summary.csv") == csv_a &&
                read_file(second.run_dir / "reports" / "rq1_summary.json") == json_a &&
                read_file(second.run_dir / "reports" / "rq1_operator_rows.csv") == ops_a;
    report(6, "Replay determinism", pass,
           pass ? "re-derived reports byte-identical" : "report bytes diverged");
  }

  // 7. Round-trip parsing: serialize(parse(source)) is the identity on the
  //    whole corpus, both languages.
  {
    int failures = 0;
    for (const auto& u : units) {
      if (serialize(u) != u.source) ++failures;
      auto again = parse_function(u.source, u.language, u.entry_point);
      if (!ir_equivalent(u, again)) ++failures;
    }
    report(7, "Round-trip parsing", failures == 0,
           fmt("%.0f units byte-identical, %.0f failures",
               static_cast<double>(units.size()), static_cast<double>(failures)));
  }

  // 8. Report shape: regenerated mock reports match the committed goldens.
  {
    ExperimentConfig config;
    config.corpus_paths = {semlens::testing::python_corpus_path(),
                           semlens::testing::java_corpus_path()};
    config.runs_dir = (work / "runs_shape").string();
    config.concurrency = 2;
    auto rq1 = run_rq1(config);
    std::string got_summary = read_file(rq1.run_dir / "reports" / "rq1_summary.csv");
    std::string want_summary =
        read_file(fs::path(SEMLENS_TEST_DIR) / "golden" / "rq1_summary.csv");

    ExperimentConfig oc = config;
    ModelConfig mock;
    mock.kind = "oracle";
    mock.model_id = "oracle-1";
    oc.models = {mock};
    auto rq4 = run_rq4(oc);
    std::string got_deps = read_file(rq4.run_dir / "reports" / "rq4_dependence.csv");
    std::string want_deps =
        read_file(fs::path(SEMLENS_TEST_DIR) / "golden" / "rq4_dependence.csv");

    bool header_ok =
        got_summary.rfind("model,language,task,operator,semantic_class,n,robustness,"
                          "sensitivity,exact_rate,f1,semantic,lexical,"
                          "parse_failure_rate,stratum",
                          0) == 0 &&
        got_deps.rfind("model,language,kind,n_units,precision,recall,f1,"
                       "empty_prediction_rate",
                       0) == 0;
    bool pass = header_ok && got_summary == want_summary && got_deps == want_deps;
    report(8, "Report shape", pass,
           pass ? "columns and groupings match the golden reports"
                : "golden mismatch (regenerate goldens if the corpus changed)");
  }

  std::printf("%d/8 criteria passed\n", 8 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
