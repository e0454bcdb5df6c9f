// Built-in Java runtime: a tree-walking interpreter covering the method-level
// Java subset the corpus uses (long/double/boolean/String/List values,
// arithmetic with Java division semantics, if/while/for/enhanced-for, calls
// into Math/Integer/String/Arrays/Collections helpers, recursion).
//
// Used by the execution oracle when no external Java toolchain is configured.
// Loops are bounded by a step budget instead of wall-clock time, which keeps
// verdicts deterministic.
#pragma once

#include <string>
#include <vector>

#include "semlens/code_model.hpp"

namespace semlens::javarun {

struct JavaTestResult {
  enum class Status { Pass, Fail, Error };
  Status status = Status::Error;
  std::string actual;      // rendered actual value on Fail
  std::string error_kind;  // Timeout, CompileOrImport, ArithmeticException, ...
};

// Runs each test (call expression vs expected literal) against the source.
// A source that fails to parse yields Error(CompileOrImport) for every test.
std::vector<JavaTestResult> run_java_tests(const std::string& source,
                                           const std::vector<TestCase>& tests,
                                           long long step_budget = 10'000'000);

}  // namespace semlens::javarun
