#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "semlens/transform.hpp"
#include "test_support.hpp"

using namespace semlens;
using semlens::testing::all_sample_units;

TEST_CASE("registry holds exactly eight operators, balanced by class and axis") {
  const auto& ops = list_operators();
  REQUIRE(ops.size() == 8);
  std::vector<std::string> ids;
  for (const auto& op : ops) ids.push_back(op.id);
  CHECK(ids == std::vector<std::string>{
                   "sp.rename_var", "sp.reorder_params", "sp.swap_branches_negate",
                   "sp.for_to_while", "snp.negate_condition", "snp.remove_conditional",
                   "snp.swap_noncommutative_operands", "snp.rewire_variable_use"});
  std::map<std::pair<SemanticClass, DependenceAxis>, int> cell;
  int sp = 0;
  for (const auto& op : ops) {
    if (op.semantic_class == SemanticClass::SP) ++sp;
    ++cell[{op.semantic_class, op.dependence_axis}];
  }
  CHECK(sp == 4);
  for (const auto& [k, n] : cell) CHECK(n == 2);
  // Determinism: two calls, identical list.
  const auto& again = list_operators();
  for (std::size_t i = 0; i < ops.size(); ++i) CHECK(ops[i].id == again[i].id);
}

TEST_CASE("unknown operator throws") {
  auto u = parse_function("def f(x):\n    return x\n", Language::Python, "f");
  CHECK_THROWS_AS(apply(u, "sp.nope", 0), UnknownOperator);
}

TEST_CASE("rename_var renames every occurrence to a fresh neutral name") {
  auto u = parse_function("def f(x):\n    return x + 1\n", Language::Python, "f");
  auto o = apply(u, "sp.rename_var", 0);
  REQUIRE(o.status == ApplyStatus::Applied);
  CHECK(o.transformed_source == "def f(v0):\n    return v0 + 1\n");
  CHECK(o.edit_log.size() == 2);
}

TEST_CASE("rename_var picks a non-colliding fresh name") {
  auto u = parse_function("def f(v0):\n    v1 = v0 + 1\n    return v1\n",
                          Language::Python, "f");
  auto o = apply(u, "sp.rename_var", 0);
  REQUIRE(o.status == ApplyStatus::Applied);
  // v0 and v1 are taken; the victim (v0) becomes v2.
  CHECK(o.transformed_source.find("v2") != std::string::npos);
  auto t = parse_function(o.transformed_source, Language::Python, "f");
  std::set<std::string> names(t.params.begin(), t.params.end());
  for (const auto& s : t.statements)
    names.insert(s.defs.begin(), s.defs.end());
  CHECK(names.size() == 2);  // no capture/merge
}

TEST_CASE("rename_var skips member accesses with the same name") {
  auto u = parse_function(
      "public static int f(java.util.List<Integer> size){ return size.size(); }",
      Language::Java, "f");
  auto o = apply(u, "sp.rename_var", 0);
  REQUIRE(o.status == ApplyStatus::Applied);
  CHECK(o.transformed_source.find("v0.size()") != std::string::npos);
}

TEST_CASE("negate_condition flips a single relation in place") {
  auto u = parse_function(
      "public static boolean f(int balance){ if (balance < 0) return true; return false; }",
      Language::Java, "f");
  auto o = apply(u, "snp.negate_condition", 0);
  REQUIRE(o.status == ApplyStatus::Applied);
  CHECK(o.transformed_source.find("balance >= 0") != std::string::npos);
  REQUIRE(o.edit_log.size() == 1);
  CHECK(o.edit_log[0].before == "<");
  CHECK(o.edit_log[0].after == ">=");
}

TEST_CASE("negate_condition wraps compound guards") {
  auto u = parse_function("def f(a, b):\n    if a and b:\n        return 1\n    return 0\n",
                          Language::Python, "f");
  auto o = apply(u, "snp.negate_condition", 0);
  REQUIRE(o.status == ApplyStatus::Applied);
  CHECK(o.transformed_source.find("if not (a and b):") != std::string::npos);
}

TEST_CASE("apply_all marks control operators NotApplicable on straight-line code") {
  auto u = parse_function("def f(x):\n    y = x + 1\n    return y\n", Language::Python,
                          "f");
  auto outcomes = apply_all(u, 0);
  std::map<std::string, ApplyStatus> status;
  for (const auto& o : outcomes) status[o.operator_id] = o.status;
  CHECK(status["snp.remove_conditional"] == ApplyStatus::NotApplicable);
  CHECK(status["snp.negate_condition"] == ApplyStatus::NotApplicable);
  CHECK(status["sp.swap_branches_negate"] == ApplyStatus::NotApplicable);
  CHECK(status["sp.for_to_while"] == ApplyStatus::NotApplicable);
  CHECK(status["sp.reorder_params"] == ApplyStatus::NotApplicable);  // one param
  CHECK(status["sp.rename_var"] == ApplyStatus::Applied);
}

TEST_CASE("apply is deterministic for a fixed seed") {
  for (const auto& u : all_sample_units()) {
    auto a = apply_all(u, 7);
    auto b = apply_all(u, 7);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].status == b[i].status);
      CHECK(a[i].transformed_source == b[i].transformed_source);
    }
  }
}

TEST_CASE("reorder_params permutes signature and rewrites all call sites") {
  auto u = parse_function(
      "def f(a, b):\n    if a == 0:\n        return b\n    return f(a - 1, b + 1)\n",
      Language::Python, "f");
  u.tests.push_back(*parse_assertion("assert f(2, 5) == 7"));
  auto o = apply(u, "sp.reorder_params", 0);
  REQUIRE(o.status == ApplyStatus::Applied);
  CHECK(o.transformed_source.find("def f(b, a):") != std::string::npos);
  CHECK(o.transformed_source.find("f(b + 1, a - 1)") != std::string::npos);
  REQUIRE(o.transformed_tests.has_value());
  CHECK((*o.transformed_tests)[0].expression == "f(5, 2)");
  CHECK((*o.transformed_tests)[0].raw == "assert f(5, 2) == 7");
}

TEST_CASE("reorder_params is NotApplicable for single parameters and defaults") {
  auto one = parse_function("def f(x):\n    return x\n", Language::Python, "f");
  CHECK(apply(one, "sp.reorder_params", 0).status == ApplyStatus::NotApplicable);
  auto dflt = parse_function("def f(a, b=1):\n    return a + b\n", Language::Python, "f");
  CHECK(apply(dflt, "sp.reorder_params", 0).status == ApplyStatus::NotApplicable);
}

TEST_CASE("swap_branches_negate composes with itself to a parse-equivalent unit") {
  int applied = 0;
  for (const auto& u : all_sample_units()) {
    auto once = apply(u, "sp.swap_branches_negate", 0);
    if (once.status != ApplyStatus::Applied) continue;
    ++applied;
    auto mid = parse_function(once.transformed_source, u.language, u.entry_point);
    auto twice = apply(mid, "sp.swap_branches_negate", 0);
    REQUIRE(twice.status == ApplyStatus::Applied);
    auto back = parse_function(twice.transformed_source, u.language, u.entry_point);
    CAPTURE(u.id);
    CAPTURE(twice.transformed_source);
    CHECK(ir_equivalent(u, back));
  }
  CHECK(applied >= 2);  // parity + clamp in both languages
}

TEST_CASE("swap_noncommutative_operands swaps a - / % site") {
  auto u = parse_function("def f(a, b):\n    return a - b\n", Language::Python, "f");
  auto o = apply(u, "snp.swap_noncommutative_operands", 0);
  REQUIRE(o.status == ApplyStatus::Applied);
  CHECK(o.transformed_source == "def f(a, b):\n    return b - a\n");
  // Commutative-only function has no site.
  auto add = parse_function("def f(a, b):\n    return a + b\n", Language::Python, "f");
  CHECK(apply(add, "snp.swap_noncommutative_operands", 0).status ==
        ApplyStatus::NotApplicable);
  // Unary minus is not a swap site.
  auto neg = parse_function("def f(a):\n    return -a\n", Language::Python, "f");
  CHECK(apply(neg, "snp.swap_noncommutative_operands", 0).status ==
        ApplyStatus::NotApplicable);
}

TEST_CASE("rewire_variable_use swaps in a same-role variable") {
  auto u = parse_function(
      "public static int f(int a, int b){ int t = b; return t + a; }", Language::Java,
      "f");
  auto o = apply(u, "snp.rewire_variable_use", 0);
  REQUIRE(o.status == ApplyStatus::Applied);
  // First use with an alternative is `b` in `int t = b;`; alternative is `a`.
  CHECK(o.transformed_source.find("int t = a;") != std::string::npos);
  REQUIRE(o.edit_log.size() == 1);
  CHECK(o.edit_log[0].before == "b");
  CHECK(o.edit_log[0].after == "a");
}

TEST_CASE("rewire respects declared types in Java") {
  auto u = parse_function(
      "public static int f(String s, int a){ int t = a + 1; return t; }", Language::Java,
      "f");
  auto o = apply(u, "snp.rewire_variable_use", 0);
  // The only use with a same-typed alternative is `t` in the return (alt a).
  REQUIRE(o.status == ApplyStatus::Applied);
  CHECK(o.transformed_source.find("return a;") != std::string::npos);
}

TEST_CASE("remove_conditional promotes the then branch and drops the chain") {
  auto u = parse_function(
      "def f(x):\n"
      "    if x < 0:\n"
      "        x = -x\n"
      "    elif x == 0:\n"
      "        x = 1\n"
      "    else:\n"
      "        x = x + 2\n"
      "    return x\n",
      Language::Python, "f");
  auto o = apply(u, "snp.remove_conditional", 0);
  REQUIRE(o.status == ApplyStatus::Applied);
  CHECK(o.transformed_source == "def f(x):\n    x = -x\n    return x\n");
}

TEST_CASE("remove_conditional on an unbraced java then-branch") {
  auto u = parse_function(
      "public static int f(int x){ if (x < 0) return -x; return x; }", Language::Java,
      "f");
  auto o = apply(u, "snp.remove_conditional", 0);
  REQUIRE(o.status == ApplyStatus::Applied);
  CHECK(o.transformed_source ==
        "public static int f(int x){ return -x; return x; }");
}

TEST_CASE("every applied outcome re-parses and keeps edits minimal") {
  for (const auto& u : all_sample_units()) {
    for (const auto& o : apply_all(u, 0)) {
      if (o.status != ApplyStatus::Applied) continue;
      CAPTURE(u.id);
      CAPTURE(o.operator_id);
      REQUIRE_FALSE(o.edit_log.empty());
      // The edit log reconstructs the transformed source exactly; bytes
      // outside logged spans are unchanged by construction of apply_edits.
      std::vector<SpanEdit> edits = o.edit_log;
      for (const auto& e : edits)
        CHECK(u.source.substr(e.span.begin, e.span.size()) == e.before);
      CHECK(apply_edits(u.source, edits) == o.transformed_source);
      CHECK_NOTHROW(parse_function(o.transformed_source, u.language, u.entry_point));
    }
  }
}

TEST_CASE("fresh rename names never collide with existing identifiers") {
  for (const auto& u : all_sample_units()) {
    auto o = apply(u, "sp.rename_var", 0);
    if (o.status != ApplyStatus::Applied) continue;
    const std::string& fresh = o.edit_log[0].after;
    CHECK(u.source.find(fresh) == std::string::npos);
  }
}

TEST_CASE("randomized mode selects sites by seed but stays reproducible") {
  auto u = parse_function(
      "def f(a, b):\n    x = a - b\n    y = b - a\n    return x - y\n",
      Language::Python, "f");
  TransformOptions opts;
  opts.randomized = true;
  std::set<std::string> variants;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    auto o1 = apply(u, "snp.swap_noncommutative_operands", seed, opts);
    auto o2 = apply(u, "snp.swap_noncommutative_operands", seed, opts);
    REQUIRE(o1.status == ApplyStatus::Applied);
    CHECK(o1.transformed_source == o2.transformed_source);
    variants.insert(o1.transformed_source);
  }
  CHECK(variants.size() > 1);
}

TEST_CASE("outcome JSONL round-trips") {
  auto u = parse_function("def f(x):\n    return x + 1\n", Language::Python, "f");
  u.id = "u1";
  auto o = apply(u, "sp.rename_var", 3);
  auto [unit_id, back] = outcome_from_json(outcome_to_json("u1", o));
  CHECK(unit_id == "u1");
  CHECK(back.operator_id == o.operator_id);
  CHECK(back.status == o.status);
  CHECK(back.transformed_source == o.transformed_source);
  CHECK(back.seed == 3);
  REQUIRE(back.edit_log.size() == o.edit_log.size());
  CHECK(back.edit_log[0].before == o.edit_log[0].before);
}
