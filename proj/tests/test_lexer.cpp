#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "semlens/lexer.hpp"

using namespace semlens;

namespace {

std::vector<std::string> texts(const std::vector<Token>& toks) {
  std::vector<std::string> out;
  for (const auto& t : toks)
    if (t.kind != TokenKind::Newline) out.emplace_back(t.text);
  return out;
}

}  // namespace

TEST_CASE("python comments and strings are opaque single tokens") {
  auto toks = lex("x = 'a # not a comment' # real\ny = 1", Language::Python);
  std::vector<std::string> want = {"x", "=", "'a # not a comment'", "y", "=", "1"};
  std::vector<std::string> got;
  for (const auto& t : toks)
    if (t.kind != TokenKind::Comment && t.kind != TokenKind::Newline)
      got.emplace_back(t.text);
  CHECK(got == want);
}

TEST_CASE("java block comments and char literals") {
  auto toks = lex("int x = 'a'; /* mid */ x += 2; // tail", Language::Java);
  auto got = texts(toks);
  std::vector<std::string> want = {"int", "x", "=", "'a'", ";", "/* mid */",
                                   "x", "+=", "2", ";", "// tail"};
  CHECK(got == want);
}

TEST_CASE("multi-character operators lex greedily") {
  auto toks = lex("a <= b != c // d ** e", Language::Python);
  auto got = texts(toks);
  std::vector<std::string> want = {"a", "<=", "b", "!=", "c", "//", "d", "**", "e"};
  CHECK(got == want);
}

TEST_CASE("python newlines only at bracket depth zero") {
  auto toks = lex("f(1,\n  2)\ny = 3\n", Language::Python);
  int newlines = 0;
  for (const auto& t : toks)
    if (t.kind == TokenKind::Newline) ++newlines;
  CHECK(newlines == 2);  // the newline inside f(...) is suppressed
}

TEST_CASE("token spans index the original buffer") {
  std::string src = "foo = bar + 12";
  for (const auto& t : lex(src, Language::Python))
    CHECK(src.substr(t.span.begin, t.span.end - t.span.begin) == t.text);
}

TEST_CASE("float and suffixed number forms") {
  auto toks = lex("a = 1.5e-3 + 2L + 0x1F", Language::Java);
  auto got = texts(toks);
  CHECK(got == std::vector<std::string>{"a", "=", "1.5e-3", "+", "2L", "+", "0x1F"});
}
