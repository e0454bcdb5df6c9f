#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "semlens/code_model.hpp"
#include "semlens/util.hpp"
#include "test_support.hpp"

using namespace semlens;
using semlens::testing::all_sample_units;

TEST_CASE("single-statement python function") {
  auto u = parse_function("def f(x):\n    return x + 1\n", Language::Python, "f");
  REQUIRE(u.statements.size() == 1);
  CHECK(u.statements[0].kind == StatementKind::Return);
  CHECK(u.statements[0].uses == std::set<std::string>{"x"});
  CHECK(u.statements[0].defs.empty());
  CHECK(u.params == std::vector<std::string>{"x"});
}

TEST_CASE("java straight-line def-use") {
  auto u = parse_function("public static int f(int x){ int y = x; return y; }",
                          Language::Java, "f");
  REQUIRE(u.statements.size() == 2);
  CHECK(u.statements[0].kind == StatementKind::Decl);
  CHECK(u.statements[0].defs == std::set<std::string>{"y"});
  CHECK(u.statements[0].uses == std::set<std::string>{"x"});
  CHECK(u.statements[1].kind == StatementKind::Return);
  CHECK(u.statements[1].uses == std::set<std::string>{"y"});
}

TEST_CASE("guard parenting matches a brute-force containment walk") {
  auto u = parse_function("def g(a):\n    if a < 0:\n        return 1\n    return 2\n",
                          Language::Python, "g");
  REQUIRE(u.statements.size() == 3);
  CHECK(u.statements[0].kind == StatementKind::If);
  CHECK(u.statements[1].kind == StatementKind::Return);
  CHECK(u.statements[2].kind == StatementKind::Return);
  CHECK(u.statements[1].parent == 1);
  CHECK_FALSE(u.statements[2].parent.has_value());

  // Cross-check every parent in the corpus against span containment.
  for (const auto& unit : all_sample_units()) {
    for (const auto& s : unit.statements) {
      const StatementNode* nearest = nullptr;
      for (const auto& g : unit.statements) {
        if (g.index == s.index) continue;
        if (g.kind != StatementKind::If && g.kind != StatementKind::Loop) continue;
        if (!(g.span.begin <= s.span.begin && s.span.end <= g.span.end)) continue;
        if (!nearest || g.span.size() < nearest->span.size()) nearest = &g;
      }
      if (nearest) {
        REQUIRE(s.parent.has_value());
        CHECK(*s.parent == nearest->index);
      } else {
        CHECK_FALSE(s.parent.has_value());
      }
    }
  }
}

TEST_CASE("def-use extraction: self reference and augmented assignment") {
  auto u = parse_function("def f(x, v):\n    x = x + 1\n    total = 0\n    total += v\n    return total\n",
                          Language::Python, "f");
  auto table = extract_def_use(u);
  REQUIRE(table.size() == 5);  // virtual row + 4 statements
  CHECK(table[0].index == 0);
  CHECK(table[0].defs == std::set<std::string>{"x", "v"});
  CHECK(table[1].defs == std::set<std::string>{"x"});
  CHECK(table[1].uses == std::set<std::string>{"x"});
  CHECK(table[3].defs == std::set<std::string>{"total"});
  CHECK(table[3].uses == std::set<std::string>{"total", "v"});
}

TEST_CASE("round-trip and determinism over the bundled corpus") {
  auto units = all_sample_units();
  REQUIRE(units.size() >= 40);
  for (const auto& u : units) {
    CHECK(serialize(u) == u.source);  // byte-identity
    auto again = parse_function(u.source, u.language, u.entry_point);
    CHECK(ir_equivalent(u, again));
    REQUIRE(again.statements.size() == u.statements.size());
    for (std::size_t i = 0; i < u.statements.size(); ++i)
      CHECK(again.statements[i].span == u.statements[i].span);
  }
}

TEST_CASE("span invariants over the bundled corpus") {
  for (const auto& u : all_sample_units()) {
    for (const auto& s : u.statements) {
      // Child contained in parent.
      if (s.parent) {
        const auto& p = u.stmt(*s.parent);
        CHECK(p.span.contains(s.span));
      }
      // Span text contains every def/use identifier.
      std::string text(u.text(s.span));
      for (const auto& name : s.defs) {
        CAPTURE(u.id);
        CHECK(text.find(name) != std::string::npos);
      }
      for (const auto& name : s.uses) CHECK(text.find(name) != std::string::npos);
    }
    // Sibling spans do not overlap.
    for (const auto& a : u.statements) {
      for (const auto& b : u.statements) {
        if (a.index >= b.index || a.parent != b.parent) continue;
        CHECK_FALSE(a.span.overlaps(b.span));
      }
    }
  }
}

TEST_CASE("statement indices are 1..n in source order") {
  for (const auto& u : all_sample_units()) {
    for (std::size_t i = 0; i < u.statements.size(); ++i) {
      CHECK(u.statements[i].index == static_cast<int>(i) + 1);
      if (i > 0) CHECK(u.statements[i].span.begin > u.statements[i - 1].span.begin);
    }
  }
}

TEST_CASE("parse errors carry the right kind") {
  CHECK_THROWS_AS(parse_function("def f(:\n    return 1\n", Language::Python, "f"),
                  ParseError);
  try {
    parse_function("def g():\n    return 1\n", Language::Python, "f");
    FAIL("expected MissingEntryPoint");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseErrorKind::MissingEntryPoint);
  }
  try {
    parse_function("def f():\n    with open('x') as h:\n        return h\n",
                   Language::Python, "f");
    FAIL("expected UnsupportedConstruct");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseErrorKind::UnsupportedConstruct);
  }
  try {
    parse_function("public class C { static int f(int x) { switch (x) { default: return 1; } } }",
                   Language::Java, "f");
    FAIL("expected UnsupportedConstruct");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseErrorKind::UnsupportedConstruct);
  }
}

TEST_CASE("elif chains parent onto the preceding guard") {
  auto u = parse_function(
      "def f(x):\n    if x < 0:\n        return -1\n    elif x == 0:\n        return 0\n    else:\n        return 1\n",
      Language::Python, "f");
  REQUIRE(u.statements.size() == 5);
  CHECK(u.statements[0].kind == StatementKind::If);       // if
  CHECK(u.statements[2].kind == StatementKind::If);       // elif
  CHECK(u.statements[2].is_elif);
  CHECK(u.statements[2].parent == 1);
  CHECK(u.statements[3].parent == 3);  // elif body on the elif
  CHECK(u.statements[4].parent == 3);  // else body on the last guard
  CHECK(u.statements[4].branch == Branch::Else);
}

TEST_CASE("assertion strings parse into test cases") {
  auto tc = parse_assertion("assert fibfib(2) == 1");
  REQUIRE(tc.has_value());
  CHECK(tc->expression == "fibfib(2)");
  CHECK(tc->expected == "1");
  CHECK(tc->raw == "assert fibfib(2) == 1");

  auto list_tc = parse_assertion("assert f([1, 2]) == [2, 1]");
  REQUIRE(list_tc.has_value());
  CHECK(list_tc->expression == "f([1, 2])");
  CHECK(list_tc->expected == "[2, 1]");

  CHECK_FALSE(parse_assertion("assert f(1) > 0").has_value());
  CHECK_FALSE(parse_assertion("print(f(1))").has_value());
  // '==' inside a string argument is not a split point.
  auto s_tc = parse_assertion("assert g('a == b') == 'x'");
  REQUIRE(s_tc.has_value());
  CHECK(s_tc->expression == "g('a == b')");
}

TEST_CASE("humaneval adapter maps prompt+solution and candidate calls") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "semlens_he_test";
  fs::create_directories(dir);
  fs::path in = dir / "he.jsonl";
  std::ofstream out(in);
  out << R"({"task_id": "HumanEval/0", "prompt": "def inc(x):\n", "canonical_solution": "    return x + 1\n", "entry_point": "inc", "test": "def check(candidate):\n    assert candidate(1) == 2\n    assert candidate(0) == 1\n    assert abs(candidate(2) - 3) < 1e-6\n"})"
      << "\n";
  out.close();
  fs::path converted = dir / "corpus.jsonl";
  int n = convert_humaneval(in.string(), converted.string());
  CHECK(n == 1);
  auto units = load_corpus(converted.string());
  REQUIRE(units.size() == 1);
  CHECK(units[0].entry_point == "inc");
  REQUIRE(units[0].tests.size() == 2);  // the tolerance assert is skipped
  CHECK(units[0].tests[0].expression == "inc(1)");
  CHECK(units[0].tests[0].expected == "2");
  CHECK(units[0].source.find("def inc(x):") != std::string::npos);
}

TEST_CASE("corpus units stay within the twelve-statement analysis budget") {
  for (const auto& u : all_sample_units()) {
    CAPTURE(u.id);
    CHECK(u.statements.size() <= 12);
    CHECK(u.tests.size() >= 3);
  }
}
