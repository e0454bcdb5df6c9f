#include "semlens/oracle.hpp"

#include <atomic>
#include <filesystem>
#include <sstream>

#include <nlohmann/json.hpp>

#include <unistd.h>

#include "semlens/javarun.hpp"
#include "semlens/subprocess.hpp"
#include "semlens/util.hpp"

namespace semlens {

using json = nlohmann::json;

const char* to_string(VerdictLabel label) {
  switch (label) {
    case VerdictLabel::Equivalent: return "equivalent";
    case VerdictLabel::Changed: return "changed";
    case VerdictLabel::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

std::string build_python_driver(const std::string& source,
                                const std::vector<TestCase>& tests, int timeout_s) {
  json src = source;
  json test_list = json::array();
  for (const auto& t : tests) test_list.push_back({t.expression, t.expected});
  std::ostringstream d;
  d << "import signal, sys\n"
    << "SRC = " << src.dump() << "\n"
    << "TESTS = " << test_list.dump() << "\n"
    << "TIMEOUT = " << timeout_s << "\n"
    << "def _alarm(sig, frame):\n"
    << "    raise TimeoutError()\n"
    << "signal.signal(signal.SIGALRM, _alarm)\n"
    << "env = {}\n"
    << "try:\n"
    << "    exec(compile(SRC, '<unit>', 'exec'), env)\n"
    << "except BaseException:\n"
    << "    for i in range(len(TESTS)):\n"
    << "        print('T%d ERROR CompileOrImport' % i)\n"
    << "    sys.exit(0)\n"
    << "for i, (expr, want) in enumerate(TESTS):\n"
    << "    signal.alarm(TIMEOUT)\n"
    << "    try:\n"
    << "        actual = eval(expr, env)\n"
    << "        expected = eval(want, {})\n"
    << "        if actual == expected:\n"
    << "            print('T%d PASS' % i)\n"
    << "        else:\n"
    << "            print('T%d FAIL %s' % (i, repr(actual)))\n"
    << "    except TimeoutError:\n"
    << "        print('T%d ERROR Timeout' % i)\n"
    << "    except BaseException as e:\n"
    << "        print('T%d ERROR %s' % (i, type(e).__name__))\n"
    << "    finally:\n"
    << "        signal.alarm(0)\n";
  return d.str();
}

std::vector<TestResult> all_error(std::size_t n, const std::string& kind) {
  std::vector<TestResult> out(n);
  for (auto& r : out) {
    r.status = TestStatus::Error;
    r.error_kind = kind;
  }
  return out;
}

std::vector<TestResult> run_python(const FunctionUnit& unit, const std::string& source,
                                   const std::vector<TestCase>& tests,
                                   const OracleConfig& config) {
  namespace fs = std::filesystem;
  static std::atomic<unsigned> counter{0};
  fs::path dir = config.work_dir.empty() ? fs::temp_directory_path()
                                         : fs::path(config.work_dir);
  fs::create_directories(dir);
  fs::path script = dir / ("semlens_drv_" + std::to_string(::getpid()) + "_" +
                           std::to_string(counter.fetch_add(1)) + ".py");
  write_file(script, build_python_driver(source, tests, config.per_test_timeout_s));

  std::vector<std::string> argv;
  for (const auto& part : config.python_command) {
    if (part == "{script}") argv.push_back(script.string());
    else argv.push_back(part);
  }
  int outer_ms = static_cast<int>(tests.size()) * config.per_test_timeout_s * 1000 + 10000;
  ProcessResult proc = run_process(argv, "", outer_ms);
  std::error_code ec;
  fs::remove(script, ec);

  if (proc.spawn_failed) return all_error(tests.size(), "RuntimeUnavailable");

  std::vector<TestResult> results = all_error(tests.size(), proc.timed_out
                                                                ? "Timeout"
                                                                : "Harness");
  for (const auto& line : split_lines(proc.out)) {
    if (line.size() < 2 || line[0] != 'T') continue;
    std::size_t sp = line.find(' ');
    if (sp == std::string::npos) continue;
    int idx = -1;
    try {
      idx = std::stoi(line.substr(1, sp - 1));
    } catch (...) {
      continue;
    }
    if (idx < 0 || idx >= static_cast<int>(tests.size())) continue;
    std::string rest = line.substr(sp + 1);
    TestResult r;
    if (rest == "PASS") {
      r.status = TestStatus::Pass;
    } else if (rest.rfind("FAIL ", 0) == 0) {
      r.status = TestStatus::Fail;
      r.actual = rest.substr(5);
    } else if (rest.rfind("ERROR ", 0) == 0) {
      r.status = TestStatus::Error;
      r.error_kind = rest.substr(6);
    } else {
      continue;
    }
    results[idx] = std::move(r);
  }
  (void)unit;
  return results;
}

std::vector<TestResult> run_java(const FunctionUnit& unit, const std::string& source,
                                 const std::vector<TestCase>& tests,
                                 const OracleConfig& config) {
  (void)unit;
  if (config.java_runtime != "builtin")
    return all_error(tests.size(), "RuntimeUnavailable");
  auto raw = javarun::run_java_tests(source, tests, config.java_step_budget);
  std::vector<TestResult> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    switch (raw[i].status) {
      case javarun::JavaTestResult::Status::Pass:
        out[i].status = TestStatus::Pass;
        break;
      case javarun::JavaTestResult::Status::Fail:
        out[i].status = TestStatus::Fail;
        out[i].actual = raw[i].actual;
        break;
      case javarun::JavaTestResult::Status::Error:
        out[i].status = TestStatus::Error;
        out[i].error_kind = raw[i].error_kind;
        break;
    }
  }
  return out;
}

bool results_match(const TestResult& a, const TestResult& b) {
  if (a.status != b.status) return false;
  if (a.status == TestStatus::Fail) return a.actual == b.actual;
  if (a.status == TestStatus::Error) return a.error_kind == b.error_kind;
  return true;
}

bool is_unavailable(const std::vector<TestResult>& rs) {
  for (const auto& r : rs)
    if (r.status == TestStatus::Error &&
        (r.error_kind == "RuntimeUnavailable" || r.error_kind == "Harness"))
      return true;
  return false;
}

ExecutionVerdict judge_with(const FunctionUnit& unit, const TransformOutcome& outcome,
                            const std::vector<TestResult>& original,
                            const OracleConfig& config) {
  ExecutionVerdict v;
  v.unit_id = unit.id;
  v.operator_id = outcome.operator_id;
  v.total = static_cast<int>(unit.tests.size());
  if (outcome.status != ApplyStatus::Applied) {
    v.label = VerdictLabel::Inconclusive;
    v.note = "outcome not applied";
    return v;
  }
  const std::vector<TestCase>* tests =
      outcome.transformed_tests ? &*outcome.transformed_tests : nullptr;
  std::vector<TestResult> transformed =
      run_tests(unit, outcome.transformed_source, config, tests);

  for (const auto& r : original)
    if (r.status == TestStatus::Pass) ++v.original_pass;
  for (const auto& r : transformed)
    if (r.status == TestStatus::Pass) ++v.transformed_pass;
  for (std::size_t i = 0; i < original.size() && i < transformed.size(); ++i)
    v.per_test.emplace_back(original[i], transformed[i]);

  if (is_unavailable(original) || is_unavailable(transformed) ||
      original.size() != transformed.size() || original.empty()) {
    v.label = VerdictLabel::Inconclusive;
    v.note = "execution unavailable";
    return v;
  }
  bool all_match = true;
  for (const auto& [o, t] : v.per_test)
    if (!results_match(o, t)) all_match = false;
  v.label = all_match ? VerdictLabel::Equivalent : VerdictLabel::Changed;

  const TransformOperator* op = find_operator(outcome.operator_id);
  if (op) {
    if (op->semantic_class == SemanticClass::SP && v.label == VerdictLabel::Changed) {
      v.anomaly = true;
      v.note = "SP outcome judged Changed";
    }
    if (op->semantic_class == SemanticClass::SNP && v.label == VerdictLabel::Equivalent) {
      v.anomaly = true;
      v.note = "SNP outcome judged Equivalent";
    }
  }
  return v;
}

}  // namespace

std::vector<TestResult> run_tests(const FunctionUnit& unit, const std::string& source,
                                  const OracleConfig& config,
                                  const std::vector<TestCase>* tests) {
  const std::vector<TestCase>& t = tests ? *tests : unit.tests;
  if (t.empty()) return {};
  return unit.language == Language::Python ? run_python(unit, source, t, config)
                                           : run_java(unit, source, t, config);
}

ExecutionVerdict judge(const FunctionUnit& unit, const TransformOutcome& outcome,
                       const OracleConfig& config) {
  auto original = run_tests(unit, unit.source, config);
  return judge_with(unit, outcome, original, config);
}

ExecutionVerdict OracleSession::judge(const FunctionUnit& unit,
                                      const TransformOutcome& outcome) {
  return judge_with(unit, outcome, original_results(unit), config_);
}

std::optional<bool> OracleSession::correctness(const FunctionUnit& unit) {
  const auto& rs = original_results(unit);
  if (rs.empty() || is_unavailable(rs)) return std::nullopt;
  for (const auto& r : rs)
    if (r.status != TestStatus::Pass) return false;
  return true;
}

const std::vector<TestResult>& OracleSession::original_results(const FunctionUnit& unit) {
  auto it = originals_.find(unit.id);
  if (it != originals_.end()) return it->second;
  auto rs = run_tests(unit, unit.source, config_);
  return originals_.emplace(unit.id, std::move(rs)).first->second;
}

namespace {

json result_to_json(const TestResult& r) {
  json j;
  j["status"] = r.status == TestStatus::Pass   ? "pass"
                : r.status == TestStatus::Fail ? "fail"
                                               : "error";
  if (r.status == TestStatus::Fail) j["actual"] = r.actual;
  if (r.status == TestStatus::Error) j["kind"] = r.error_kind;
  return j;
}

TestResult result_from_json(const json& j) {
  TestResult r;
  std::string s = j.at("status").get<std::string>();
  r.status = s == "pass" ? TestStatus::Pass : s == "fail" ? TestStatus::Fail
                                                          : TestStatus::Error;
  r.actual = j.value("actual", "");
  r.error_kind = j.value("kind", "");
  return r;
}

}  // namespace

std::string verdict_to_json(const ExecutionVerdict& v) {
  json j;
  j["unit_id"] = v.unit_id;
  j["operator"] = v.operator_id;
  j["label"] = to_string(v.label);
  j["original_pass"] = v.original_pass;
  j["transformed_pass"] = v.transformed_pass;
  j["total"] = v.total;
  j["anomaly"] = v.anomaly;
  if (!v.note.empty()) j["note"] = v.note;
  json per = json::array();
  for (const auto& [o, t] : v.per_test)
    per.push_back({{"original", result_to_json(o)}, {"transformed", result_to_json(t)}});
  j["per_test"] = per;
  return j.dump();
}

ExecutionVerdict verdict_from_json(const std::string& line) {
  json j = json::parse(line);
  ExecutionVerdict v;
  v.unit_id = j.at("unit_id").get<std::string>();
  v.operator_id = j.at("operator").get<std::string>();
  std::string label = j.at("label").get<std::string>();
  v.label = label == "equivalent" ? VerdictLabel::Equivalent
            : label == "changed"  ? VerdictLabel::Changed
                                  : VerdictLabel::Inconclusive;
  v.original_pass = j.value("original_pass", 0);
  v.transformed_pass = j.value("transformed_pass", 0);
  v.total = j.value("total", 0);
  v.anomaly = j.value("anomaly", false);
  v.note = j.value("note", "");
  for (const auto& p : j.value("per_test", json::array()))
    v.per_test.emplace_back(result_from_json(p.at("original")),
                            result_from_json(p.at("transformed")));
  return v;
}

}  // namespace semlens
