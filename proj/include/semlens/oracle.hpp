// Execution oracle: runs a unit's bundled tests against original and
// transformed sources and labels each transformation outcome Equivalent,
// Changed or Inconclusive.
//
// Python units execute in an isolated python3 subprocess (one process per
// source version, per-test alarm timeouts inside). Java units execute on the
// built-in interpreter runtime with a deterministic step budget. Runtime
// commands are configurable; a missing runtime yields Inconclusive verdicts,
// never false Equivalent/Changed labels.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semlens/code_model.hpp"
#include "semlens/transform.hpp"

namespace semlens {

enum class TestStatus { Pass, Fail, Error };

struct TestResult {
  TestStatus status = TestStatus::Error;
  std::string actual;      // rendered actual value when status == Fail
  std::string error_kind;  // Timeout, CompileOrImport, RuntimeUnavailable, ...
};

enum class VerdictLabel { Equivalent, Changed, Inconclusive };

const char* to_string(VerdictLabel label);

struct ExecutionVerdict {
  std::string unit_id;
  std::string operator_id;
  int original_pass = 0;
  int transformed_pass = 0;
  int total = 0;
  std::vector<std::pair<TestResult, TestResult>> per_test;  // (original, transformed)
  VerdictLabel label = VerdictLabel::Inconclusive;
  bool anomaly = false;  // SP judged Changed, or SNP judged Equivalent
  std::string note;
};

struct OracleConfig {
  // {script} is replaced by the driver file path.
  std::vector<std::string> python_command = {"python3", "-I", "{script}"};
  int per_test_timeout_s = 5;
  long long java_step_budget = 10'000'000;
  // "builtin" runs the embedded interpreter; anything else requires an
  // external toolchain and reports RuntimeUnavailable when missing.
  std::string java_runtime = "builtin";
  std::string work_dir = "";  // temp scripts; empty = std::filesystem::temp_directory_path
};

// Runs every bundled test of `unit` against `source` (which may be a
// transformed variant). `tests` overrides the unit's own tests when provided.
std::vector<TestResult> run_tests(const FunctionUnit& unit, const std::string& source,
                                  const OracleConfig& config,
                                  const std::vector<TestCase>* tests = nullptr);

// Judges one Applied outcome against the original unit.
ExecutionVerdict judge(const FunctionUnit& unit, const TransformOutcome& outcome,
                       const OracleConfig& config);

// Caches the original run so judging N outcomes executes the original once.
class OracleSession {
 public:
  explicit OracleSession(const OracleConfig& config) : config_(config) {}
  ExecutionVerdict judge(const FunctionUnit& unit, const TransformOutcome& outcome);
  // True when all bundled tests pass on the original source; nullopt when the
  // runtime is unavailable.
  std::optional<bool> correctness(const FunctionUnit& unit);

 private:
  const std::vector<TestResult>& original_results(const FunctionUnit& unit);
  OracleConfig config_;
  std::map<std::string, std::vector<TestResult>> originals_;
};

std::string verdict_to_json(const ExecutionVerdict& v);
ExecutionVerdict verdict_from_json(const std::string& line);

}  // namespace semlens
