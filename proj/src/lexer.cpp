#include "semlens/lexer.hpp"

#include <array>
#include <cctype>

#include "semlens/util.hpp"

namespace semlens {

namespace {

bool starts_with_at(std::string_view s, std::size_t i, std::string_view pat) {
  return s.size() - i >= pat.size() && s.substr(i, pat.size()) == pat;
}

// Longest first.
constexpr std::array<std::string_view, 27> kMultiOps = {
    "<<=", ">>=", "**=", "//=", "...",
    "==", "!=", "<=", ">=", "&&", "||", "++", "--",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "->", "**", "//", "<<", ">>", ":=",
};

std::size_t scan_python_string(std::string_view s, std::size_t i) {
  // i points at the opening quote (prefix already consumed by caller).
  char q = s[i];
  bool triple = starts_with_at(s, i, q == '\'' ? "'''" : "\"\"\"");
  std::size_t j = i + (triple ? 3 : 1);
  while (j < s.size()) {
    if (s[j] == '\\') {
      j += 2;
      continue;
    }
    if (triple) {
      if (starts_with_at(s, j, q == '\'' ? "'''" : "\"\"\"")) return j + 3;
      ++j;
    } else {
      if (s[j] == q) return j + 1;
      if (s[j] == '\n') return j;  // unterminated, stop at line end
      ++j;
    }
  }
  return j;
}

std::size_t scan_java_string(std::string_view s, std::size_t i) {
  char q = s[i];
  std::size_t j = i + 1;
  while (j < s.size()) {
    if (s[j] == '\\') {
      j += 2;
      continue;
    }
    if (s[j] == q) return j + 1;
    if (s[j] == '\n') return j;
    ++j;
  }
  return j;
}

std::size_t scan_number(std::string_view s, std::size_t i) {
  std::size_t j = i;
  bool seen_dot = false;
  if (starts_with_at(s, j, "0x") || starts_with_at(s, j, "0X")) {
    j += 2;
    while (j < s.size() && std::isxdigit(static_cast<unsigned char>(s[j]))) ++j;
    return j;
  }
  while (j < s.size()) {
    char c = s[j];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '_') {
      ++j;
    } else if (c == '.' && !seen_dot && j + 1 < s.size() &&
               std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
      seen_dot = true;
      ++j;
    } else if ((c == 'e' || c == 'E') && j + 1 < s.size() &&
               (std::isdigit(static_cast<unsigned char>(s[j + 1])) ||
                ((s[j + 1] == '+' || s[j + 1] == '-') && j + 2 < s.size() &&
                 std::isdigit(static_cast<unsigned char>(s[j + 2]))))) {
      j += 2;
    } else if (c == 'L' || c == 'l' || c == 'f' || c == 'F' || c == 'd' || c == 'D') {
      ++j;  // Java numeric suffix
      break;
    } else {
      break;
    }
  }
  // trailing "1." (Python float like "1.")
  if (j < s.size() && s[j] == '.' && !seen_dot &&
      (j + 1 >= s.size() || !is_ident_start(s[j + 1]))) {
    ++j;
  }
  return j;
}

bool is_py_string_prefix(std::string_view s, std::size_t i, std::size_t& quote_at) {
  // r, b, f, u and two-letter combos immediately followed by a quote.
  std::size_t j = i;
  int n = 0;
  while (j < s.size() && n < 2) {
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s[j])));
    if (c == 'r' || c == 'b' || c == 'f' || c == 'u') {
      ++j;
      ++n;
    } else {
      break;
    }
  }
  if (n > 0 && j < s.size() && (s[j] == '\'' || s[j] == '"')) {
    quote_at = j;
    return true;
  }
  return false;
}

}  // namespace

std::vector<Token> lex(std::string_view source, Language language) {
  std::vector<Token> out;
  const bool py = language == Language::Python;
  int bracket_depth = 0;
  std::size_t i = 0;
  auto push = [&](TokenKind k, std::size_t b, std::size_t e) {
    out.push_back({k, {b, e}, source.substr(b, e - b)});
  };
  while (i < source.size()) {
    char c = source[i];
    if (c == '\n') {
      if (py && bracket_depth == 0) push(TokenKind::Newline, i, i + 1);
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (py && c == '\\' && i + 1 < source.size() && source[i + 1] == '\n') {
      i += 2;  // explicit line continuation
      continue;
    }
    if (py && c == '#') {
      std::size_t j = i;
      while (j < source.size() && source[j] != '\n') ++j;
      push(TokenKind::Comment, i, j);
      i = j;
      continue;
    }
    if (!py && c == '/' && starts_with_at(source, i, "//")) {
      std::size_t j = i;
      while (j < source.size() && source[j] != '\n') ++j;
      push(TokenKind::Comment, i, j);
      i = j;
      continue;
    }
    if (!py && starts_with_at(source, i, "/*")) {
      std::size_t j = source.find("*/", i + 2);
      j = (j == std::string_view::npos) ? source.size() : j + 2;
      push(TokenKind::Comment, i, j);
      i = j;
      continue;
    }
    if (c == '"' || c == '\'') {
      std::size_t j = py ? scan_python_string(source, i) : scan_java_string(source, i);
      push(TokenKind::Str, i, j);
      i = j;
      continue;
    }
    if (py) {
      std::size_t quote_at = 0;
      if (is_ident_start(c) && is_py_string_prefix(source, i, quote_at)) {
        std::size_t j = scan_python_string(source, quote_at);
        push(TokenKind::Str, i, j);
        i = j;
        continue;
      }
    }
    if (is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < source.size() && is_ident_char(source[j])) ++j;
      push(TokenKind::Ident, i, j);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = scan_number(source, i);
      push(TokenKind::Number, i, j);
      i = j;
      continue;
    }
    if (c == '(' || c == '[' || c == '{') ++bracket_depth;
    if (c == ')' || c == ']' || c == '}') bracket_depth = std::max(0, bracket_depth - 1);
    bool multi = false;
    for (std::string_view op : kMultiOps) {
      if (starts_with_at(source, i, op)) {
        // Python has no && / || / ++ / -- / ->; Java has no ** / // / :=.
        if (py && (op == "&&" || op == "||" || op == "++" || op == "--" || op == "->")) break;
        if (!py && (op == "**" || op == "//" || op == ":=" || op == "**=" || op == "//=")) break;
        push(TokenKind::Op, i, i + op.size());
        i += op.size();
        multi = true;
        break;
      }
    }
    if (multi) continue;
    push(TokenKind::Op, i, i + 1);
    ++i;
  }
  return out;
}

}  // namespace semlens
