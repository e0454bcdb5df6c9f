// Statement-indexed intermediate representation for single Java/Python
// functions, plus corpus ingestion.
//
// The IR is span-oriented: every statement remembers the byte range it
// occupies in the original source, and serialization returns the original
// bytes. Rewrites are expressed as span edits applied to the source text and
// re-parsed, so parse -> serialize is the identity by construction.
//
// Supported subset: a single top-level function (nested helpers are opaque
// statements) with assignments, declarations, if/elif/else, for/while,
// return, break/continue and expression statements. Constructs outside the
// subset (try, switch, with, classes, ...) raise UnsupportedConstruct.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "semlens/common.hpp"

namespace semlens {

enum class StatementKind { Assign, Return, If, Loop, Call, Decl, Other };

const char* to_string(StatementKind k);

// Position of a statement relative to its parent guard.
enum class Branch { None, Body, Then, Else };

// Break/continue markers needed for control-flow construction.
enum class FlowTag { None, Break, Continue };

struct StatementNode {
  int index = 0;  // 1-based, source order
  StatementKind kind = StatementKind::Other;
  Span span;                  // full extent, including nested body
  Span header;                // header/statement-only extent
  std::optional<Span> guard;  // condition (If/Loop)
  std::set<std::string> defs;
  std::set<std::string> weak_defs;  // subset of defs that do not kill prior defs
  std::set<std::string> uses;
  std::optional<int> parent;  // nearest enclosing If/Loop statement
  Branch branch = Branch::None;
  FlowTag flow = FlowTag::None;

  // Structural extras used by the transformation engine.
  std::optional<Span> body_span;      // then-block (If) or loop body
  std::optional<Span> else_span;      // else-block content
  std::optional<Span> else_all_span;  // whole else clause including keyword
  bool is_elif = false;               // elif / "else if" chain link
  bool body_braced = false;           // Java: body wrapped in {}
  bool else_braced = false;
};

struct TestCase {
  std::string expression;  // call expression, e.g. "fibfib(2)"
  std::string expected;    // literal expected value text
  std::string raw;         // original assertion text
};

struct FunctionUnit {
  std::string id;
  Language language = Language::Python;
  std::string source;
  std::string entry_point;
  std::vector<StatementNode> statements;  // statements[i].index == i+1
  std::vector<TestCase> tests;
  std::optional<bool> correctness;

  // Signature details (filled by the parser).
  std::vector<std::string> params;            // in declaration order
  std::vector<Span> param_spans;              // full parameter text
  std::vector<Span> param_name_spans;         // just the name token
  Span params_list_span;                      // inside the ()
  Span body_span;                             // function body extent
  std::map<std::string, std::string> var_types;  // Java: name -> declared type
  bool params_reorderable = true;  // false when defaults/varargs present

  const StatementNode& stmt(int index) const { return statements.at(index - 1); }
  std::string_view text(const Span& s) const {
    return std::string_view(source).substr(s.begin, s.size());
  }
};

// Parses a function definition; throws ParseError on failure.
FunctionUnit parse_function(const std::string& source, Language language,
                            const std::string& entry_point);

// Emits source text for the unit. Unedited units round-trip byte-identically.
std::string serialize(const FunctionUnit& unit);

// Per-statement (defs, uses); row with index 0 carries parameter definitions.
struct DefUseRow {
  int index = 0;
  std::set<std::string> defs;
  std::set<std::string> uses;
};
std::vector<DefUseRow> extract_def_use(const FunctionUnit& unit);

// Structural equivalence: same statement kinds, def/use sets, parents and
// branches; spans and concrete text may differ.
bool ir_equivalent(const FunctionUnit& a, const FunctionUnit& b);

// ---- Corpus ingestion ----

// Parses "assert <expr> == <expected>" into a TestCase.
std::optional<TestCase> parse_assertion(const std::string& assertion);

struct CorpusRecord {
  std::string task_id;
  Language language = Language::Python;
  std::string source;
  std::string entry_point;
  std::vector<std::string> tests;  // assertion strings
  std::optional<bool> correct;
};

std::vector<CorpusRecord> load_corpus_records(const std::string& jsonl_path);
void save_corpus_records(const std::vector<CorpusRecord>& records,
                         const std::string& jsonl_path);

// Parses a corpus record into a FunctionUnit.
FunctionUnit unit_from_record(const CorpusRecord& rec);
std::vector<FunctionUnit> load_corpus(const std::string& jsonl_path);

// HumanEval-format adapter: maps prompt+canonical_solution -> source and
// extracts equality assertions from the check function in `test`.
// Returns the number of converted problems.
int convert_humaneval(const std::string& in_jsonl, const std::string& out_jsonl);

}  // namespace semlens
