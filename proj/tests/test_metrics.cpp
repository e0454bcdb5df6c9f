#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "semlens/metrics.hpp"

using namespace semlens;

namespace {

ParsedPayload payload(const std::string& text) {
  ParsedPayload p;
  p.ok = true;
  p.text = text;
  return p;
}

ParsedPayload failed_payload() {
  ParsedPayload p;
  p.ok = false;
  p.error = "parse failure";
  return p;
}

}  // namespace

TEST_CASE("summary token F1: identity, hand-derived partial overlap, disjoint") {
  auto same = summary_similarity("it returns the sum", "it returns the sum");
  CHECK(same.exact);
  CHECK(same.lexical == doctest::Approx(1.0));

  // Tokens: {returns,true,if,negative} vs {returns,false}; overlap = 1
  // F1 = 2*1/(4+2) = 1/3.
  auto partial = summary_similarity("returns true if negative", "returns false");
  CHECK_FALSE(partial.exact);
  CHECK(partial.lexical == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

  auto disjoint = summary_similarity("alpha beta", "gamma delta");
  CHECK(disjoint.lexical == doctest::Approx(0.0));
}

TEST_CASE("summary similarity normalizes case and punctuation") {
  auto s = summary_similarity("Returns the sum.", "returns the sum");
  CHECK(s.lexical == doctest::Approx(1.0));
  CHECK_FALSE(s.exact);
}

TEST_CASE("semantic similarity appears only with an embedder") {
  auto without = summary_similarity("a b", "a c");
  CHECK_FALSE(without.semantic.has_value());
  HashEmbedder embedder;
  auto with = summary_similarity("a b", "a b", &embedder);
  REQUIRE(with.semantic.has_value());
  CHECK(*with.semantic == doctest::Approx(1.0));
  auto far = summary_similarity("alpha beta", "gamma delta", &embedder);
  REQUIRE(far.semantic.has_value());
  CHECK(*far.semantic < 0.8);
}

TEST_CASE("name similarity: hand-derived sub-token F1 for a rename-style pair") {
  // Sub-tokens: {is,palindrome,and,sum,less,then} (6) vs {is,symmetric} (2);
  // overlap = 1; F1 = 2/(6+2) = 0.25.
  auto s = name_similarity("isPalindromeAndSumLessThen", "isSymmetric");
  CHECK_FALSE(s.exact);
  CHECK(s.lexical == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("name similarity is case-convention invariant and symmetric") {
  auto s = name_similarity("belowZero", "below_zero");
  CHECK_FALSE(s.exact);
  CHECK(s.lexical == doctest::Approx(1.0));
  auto t = name_similarity("below_zero", "belowZero");
  CHECK(t.lexical == doctest::Approx(s.lexical));

  auto digits = name_similarity("sumTo2", "sum_to_2");
  CHECK(digits.lexical == doctest::Approx(1.0));

  auto exact = name_similarity("foo", "foo");
  CHECK(exact.exact);
  CHECK(exact.lexical == doctest::Approx(1.0));

  std::mt19937 rng(7);
  const char* names[] = {"fooBar", "foo_bar", "parseHTTPResponse", "a1b2", "x"};
  for (const char* a : names)
    for (const char* b : names)
      CHECK(name_similarity(a, b).lexical ==
            doctest::Approx(name_similarity(b, a).lexical));
}

TEST_CASE("output equality: the twelve-case normalization table") {
  struct Case {
    const char* a;
    const char* b;
    Language lang;
    bool want;
  };
  const Case cases[] = {
      {"1", "1", Language::Python, true},
      {"True", "true", Language::Python, true},
      {"[1, 2]", "[1,2]", Language::Python, true},
      {"1.0", "1", Language::Java, true},
      {"'a'", "\"a\"", Language::Python, true},
      {"[1, 2]", "[2, 1]", Language::Python, false},
      {"1", "2", Language::Python, false},
      {"3.14159", "3.1415926", Language::Python, false},  // beyond 1e-6
      {"1.0000001", "1.0", Language::Python, true},       // within 1e-6
      {"None", "null", Language::Python, true},
      {"[[1], [2]]", "[[1],[2]]", Language::Java, true},
      {"abc", "abd", Language::Python, false},
  };
  for (const auto& c : cases) {
    CAPTURE(c.a);
    CAPTURE(c.b);
    CHECK(output_equality(c.a, c.b, c.lang) == c.want);
  }
}

TEST_CASE("output equality handles java list constructors") {
  CHECK(output_equality("Arrays.asList(1, 2)", "[1, 2]", Language::Java));
  CHECK(output_equality("List.of()", "[]", Language::Java));
  CHECK_FALSE(output_equality("Arrays.asList(1)", "[2]", Language::Java));
}

TEST_CASE("robustness: identity, the 62-of-100 name-match rate, summary means") {
  std::vector<PayloadPair> identical;
  for (int i = 0; i < 10; ++i) identical.push_back({payload("same"), payload("same")});
  CHECK(robustness(identical, Task::MethodName, Language::Java) == doctest::Approx(1.0));
  CHECK(sensitivity(identical, Task::MethodName, Language::Java) == doctest::Approx(0.0));

  // 62 identical of 100 -> 0.62 exact-match robustness.
  std::vector<PayloadPair> names;
  for (int i = 0; i < 62; ++i) names.push_back({payload("check"), payload("check")});
  for (int i = 0; i < 38; ++i) names.push_back({payload("check"), payload("verify")});
  CHECK(robustness(names, Task::MethodName, Language::Java) == doctest::Approx(0.62));

  // 54 of 100 different -> sensitivity 0.54.
  std::vector<PayloadPair> snp_names;
  for (int i = 0; i < 46; ++i) snp_names.push_back({payload("go"), payload("go")});
  for (int i = 0; i < 54; ++i) snp_names.push_back({payload("go"), payload("stop")});
  CHECK(sensitivity(snp_names, Task::MethodName, Language::Java) == doctest::Approx(0.54));

  // Four hand-computed summary pairs, averaged.
  std::vector<PayloadPair> sums = {
      {payload("a b"), payload("a b")},        // 1.0
      {payload("a b"), payload("a c")},        // 2*1/(2+2) = 0.5
      {payload("a b c d"), payload("a")},      // 2*1/(4+1) = 0.4
      {payload("x"), payload("y")},            // 0.0
  };
  double expect = (1.0 + 0.5 + 0.4 + 0.0) / 4.0;
  CHECK(robustness(sums, Task::Summarize, Language::Python) ==
        doctest::Approx(expect).epsilon(1e-9));
  // Sensitivity is one minus similarity for summaries: 0.91 -> 0.09.
  std::vector<PayloadPair> nearly;
  for (int i = 0; i < 91; ++i) nearly.push_back({payload("a"), payload("a")});
  for (int i = 0; i < 9; ++i) nearly.push_back({payload("a"), payload("b")});
  CHECK(sensitivity(nearly, Task::Summarize, Language::Python) ==
        doctest::Approx(0.09).epsilon(1e-9));
}

TEST_CASE("parse failures count as maximally different") {
  std::vector<PayloadPair> pairs = {{payload("x"), payload("x")},
                                    {payload("x"), failed_payload()}};
  CHECK(robustness(pairs, Task::MethodName, Language::Java) == doctest::Approx(0.5));
  CHECK(sensitivity(pairs, Task::MethodName, Language::Java) == doctest::Approx(0.5));
}

TEST_CASE("empty input is an error") {
  std::vector<PayloadPair> none;
  CHECK_THROWS_AS(robustness(none, Task::Summarize, Language::Python), MetricError);
  CHECK_THROWS_AS(sensitivity(none, Task::Summarize, Language::Python), MetricError);
}

TEST_CASE("dependence scores: identity, the sort_even fixture, empty prediction") {
  DependenceGraph truth;
  truth.control_pairs = {{6, 7}, {6, 9}, {17, 18}, {17, 21}, {17, 19}, {17, 22}};

  auto perfect = dependence_scores(truth.control_pairs, truth, DependenceKind::Control);
  CHECK(perfect.precision == doctest::Approx(1.0));
  CHECK(perfect.recall == doctest::Approx(1.0));
  CHECK(perfect.f1 == doctest::Approx(1.0));

  // The model finds (6,7) and (6,9): all predictions correct, 2 of 6 found.
  PairSet predicted = {{6, 7}, {6, 9}};
  auto s = dependence_scores(predicted, truth, DependenceKind::Control);
  CHECK(s.precision == doctest::Approx(1.0));
  CHECK(s.recall == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
  CHECK(s.f1 == doctest::Approx(0.5).epsilon(1e-9));

  auto empty = dependence_scores({}, truth, DependenceKind::Control);
  CHECK(empty.empty_prediction);
  CHECK(empty.precision == doctest::Approx(0.0));
  CHECK(empty.recall == doctest::Approx(0.0));
  CHECK(empty.f1 == doctest::Approx(0.0));

  DependenceGraph no_truth;
  auto et = dependence_scores({{1, 2}}, no_truth, DependenceKind::Data);
  CHECK(et.empty_truth);
  CHECK(et.recall == doctest::Approx(0.0));
}

TEST_CASE("out-of-range predictions lower precision") {
  DependenceGraph truth;
  truth.control_pairs = {{1, 2}};
  PairSet predicted = {{1, 2}, {40, 41}};
  auto s = dependence_scores(predicted, truth, DependenceKind::Control);
  CHECK(s.precision == doctest::Approx(0.5));
  CHECK(s.recall == doctest::Approx(1.0));
}

TEST_CASE("f1 algebra: zero product forces zero, otherwise harmonic mean") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    // Build a random prediction/truth configuration.
    DependenceGraph truth;
    PairSet predicted;
    int n_truth = static_cast<int>(rng() % 6);
    int n_pred = static_cast<int>(rng() % 6);
    for (int k = 0; k < n_truth; ++k)
      truth.data_pairs.insert({static_cast<int>(rng() % 5), static_cast<int>(rng() % 5)});
    for (int k = 0; k < n_pred; ++k)
      predicted.insert({static_cast<int>(rng() % 5), static_cast<int>(rng() % 5)});
    auto s = dependence_scores(predicted, truth, DependenceKind::Data);
    CHECK(s.precision >= 0.0);
    CHECK(s.precision <= 1.0);
    CHECK(s.recall >= 0.0);
    CHECK(s.recall <= 1.0);
    if (s.precision * s.recall == 0.0) {
      CHECK(s.f1 == doctest::Approx(0.0));
    } else {
      CHECK(s.f1 ==
            doctest::Approx(2 * s.precision * s.recall / (s.precision + s.recall)));
    }
  }
}

TEST_CASE("aggregation averages operator rows and rejects mixed classes") {
  auto row = [](const char* op, const char* cls, std::optional<double> rob,
                std::optional<double> sen, long n) {
    MetricRow r;
    r.model_id = "m";
    r.language = "java";
    r.task = "method_name";
    r.operator_id = op;
    r.semantic_class = cls;
    r.n = n;
    r.robustness = rob;
    r.sensitivity = sen;
    return r;
  };
  // Single row aggregates to itself.
  auto single = aggregate_over_operators({row("sp.rename_var", "SP", 0.8, {}, 10)});
  REQUIRE(single.size() == 1);
  CHECK(single[0].operator_id == "ALL");
  CHECK(*single[0].robustness == doctest::Approx(0.8));

  // Two SP rows 0.8 and 0.6 -> 0.7.
  auto two = aggregate_over_operators({row("sp.rename_var", "SP", 0.8, {}, 10),
                                       row("sp.reorder_params", "SP", 0.6, {}, 10)});
  REQUIRE(two.size() == 1);
  CHECK(*two[0].robustness == doctest::Approx(0.7));
  CHECK(two[0].n == 20);

  // Permutation invariance.
  auto swapped = aggregate_over_operators({row("sp.reorder_params", "SP", 0.6, {}, 10),
                                           row("sp.rename_var", "SP", 0.8, {}, 10)});
  CHECK(*swapped[0].robustness == doctest::Approx(*two[0].robustness));

  // SP and SNP rows aggregate into separate groups.
  auto split = aggregate_over_operators({row("sp.rename_var", "SP", 0.8, {}, 10),
                                         row("snp.negate_condition", "SNP", {}, 0.3, 10)});
  CHECK(split.size() == 2);

  // A forged mixed group is rejected.
  auto bad_sp = row("sp.rename_var", "SP", 0.8, {}, 10);
  auto bad_snp = row("snp.negate_condition", "SP", {}, 0.3, 10);  // mislabeled class
  CHECK_THROWS_AS(aggregate_over_operators({bad_sp, bad_snp}), MetricError);
}

TEST_CASE("score_pairs fills the per-task breakdown columns") {
  std::vector<PayloadPair> names = {{payload("belowZero"), payload("below_zero")},
                                    {payload("foo"), payload("foo")}};
  auto row = score_pairs("m", Language::Java, Task::MethodName, "sp.rename_var",
                         SemanticClass::SP, "all", names);
  CHECK(row.n == 2);
  REQUIRE(row.robustness.has_value());
  CHECK(*row.robustness == doctest::Approx(0.5));  // one exact match of two
  REQUIRE(row.f1.has_value());
  CHECK(*row.f1 == doctest::Approx(1.0));  // both pairs share all sub-tokens
  CHECK(row.parse_failure_rate == doctest::Approx(0.0));

  std::vector<PayloadPair> outs = {{payload("1"), payload("1")},
                                   {payload("2"), failed_payload()}};
  auto snp = score_pairs("m", Language::Python, Task::OutputPredict,
                         "snp.negate_condition", SemanticClass::SNP, "all", outs);
  REQUIRE(snp.sensitivity.has_value());
  CHECK(*snp.sensitivity == doctest::Approx(0.5));
  CHECK(snp.parse_failure_rate == doctest::Approx(0.5));
}
