#include "semlens/code_model.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "semlens/lexer.hpp"
#include "semlens/util.hpp"

namespace semlens {

using json = nlohmann::json;

const char* to_string(StatementKind k) {
  switch (k) {
    case StatementKind::Assign: return "Assign";
    case StatementKind::Return: return "Return";
    case StatementKind::If: return "If";
    case StatementKind::Loop: return "Loop";
    case StatementKind::Call: return "Call";
    case StatementKind::Decl: return "Decl";
    case StatementKind::Other: return "Other";
  }
  return "?";
}

namespace {

const std::unordered_set<std::string>& python_keywords() {
  static const std::unordered_set<std::string> kw = {
      "False", "None",   "True",   "and",    "as",     "assert", "async",
      "await", "break",  "class",  "continue", "def",  "del",    "elif",
      "else",  "except", "finally", "for",    "from",  "global", "if",
      "import", "in",    "is",     "lambda", "nonlocal", "not",  "or",
      "pass",  "raise",  "return", "try",    "while",  "with",   "yield"};
  return kw;
}

const std::unordered_set<std::string>& java_keywords() {
  static const std::unordered_set<std::string> kw = {
      "abstract", "assert", "boolean", "break", "byte", "case", "catch",
      "char", "class", "const", "continue", "default", "do", "double",
      "else", "enum", "extends", "final", "finally", "float", "for", "goto",
      "if", "implements", "import", "instanceof", "int", "interface", "long",
      "native", "new", "package", "private", "protected", "public", "return",
      "short", "static", "strictfp", "super", "switch", "synchronized",
      "this", "throw", "throws", "transient", "try", "void", "volatile",
      "while", "var", "true", "false", "null"};
  return kw;
}

bool is_mutator_method(const std::string& name, Language lang) {
  static const std::unordered_set<std::string> py = {
      "append", "extend", "insert", "remove", "pop", "clear",
      "sort",   "reverse", "add",   "update", "discard", "setdefault"};
  static const std::unordered_set<std::string> jv = {
      "add", "addAll", "set", "remove", "clear", "sort",
      "put", "putAll", "append", "insert", "push"};
  return lang == Language::Python ? py.count(name) > 0 : jv.count(name) > 0;
}

const std::unordered_set<std::string>& aug_ops() {
  static const std::unordered_set<std::string> ops = {
      "+=", "-=", "*=", "/=", "//=", "**=", "%=",
      "&=", "|=", "^=", "<<=", ">>="};
  return ops;
}

// Identifier tokens that read a value: skips attribute/member names after '.'
// and Python keyword-argument names inside call parentheses.
std::vector<std::string> collect_use_idents(const std::vector<Token>& toks,
                                            std::size_t begin, std::size_t end,
                                            Language lang) {
  const auto& kws = lang == Language::Python ? python_keywords() : java_keywords();
  std::vector<std::string> out;
  int depth = 0;
  for (std::size_t i = begin; i < end; ++i) {
    const Token& t = toks[i];
    if (t.kind == TokenKind::Op) {
      char c = t.text.empty() ? ' ' : t.text[0];
      if (t.text.size() == 1) {
        if (c == '(' || c == '[' || c == '{') ++depth;
        if (c == ')' || c == ']' || c == '}') --depth;
      }
      continue;
    }
    if (t.kind != TokenKind::Ident) continue;
    std::string name(t.text);
    if (kws.count(name)) continue;
    if (i > begin && toks[i - 1].kind == TokenKind::Op && toks[i - 1].text == ".") continue;
    // Python kwarg: f(name=expr) reads no variable named "name".
    if (lang == Language::Python && depth > 0 && i + 1 < end &&
        toks[i + 1].kind == TokenKind::Op && toks[i + 1].text == "=" &&
        i > begin &&
        (toks[i - 1].text == "(" || toks[i - 1].text == ",")) {
      continue;
    }
    out.push_back(std::move(name));
  }
  return out;
}

// Finds the matching closer for the opener at toks[open_idx].
std::size_t find_matching(const std::vector<Token>& toks, std::size_t open_idx) {
  const std::string_view open = toks[open_idx].text;
  std::string_view close = open == "(" ? ")" : open == "[" ? "]" : "}";
  int depth = 0;
  for (std::size_t i = open_idx; i < toks.size(); ++i) {
    if (toks[i].kind != TokenKind::Op) continue;
    if (toks[i].text == open) ++depth;
    else if (toks[i].text == close) {
      if (--depth == 0) return i;
    }
  }
  throw ParseError(ParseErrorKind::SyntaxError, "unbalanced brackets");
}

std::size_t line_start_of(std::string_view source, std::size_t pos) {
  std::size_t ls = source.rfind('\n', pos == 0 ? 0 : pos - 1);
  return ls == std::string_view::npos ? 0 : ls + 1;
}

// ===========================================================================
// Python parser
// ===========================================================================

struct LogicalLine {
  std::vector<Token> toks;
  std::string indent;
};

class PythonParser {
 public:
  PythonParser(const std::string& source, const std::string& entry)
      : src_(source), entry_(entry) {}

  FunctionUnit parse() {
    unit_.language = Language::Python;
    unit_.source = src_;
    unit_.entry_point = entry_;
    build_lines();
    std::size_t def_idx = find_entry_def();
    parse_signature(lines_[def_idx]);
    parse_body(def_idx);
    finalize_uses();
    return std::move(unit_);
  }

 private:
  void build_lines() {
    auto toks = lex(src_, Language::Python);
    LogicalLine cur;
    bool has_content = false;
    for (const Token& t : toks) {
      if (t.kind == TokenKind::Newline) {
        if (has_content) lines_.push_back(std::move(cur));
        cur = {};
        has_content = false;
        continue;
      }
      if (t.kind == TokenKind::Comment) continue;
      if (!has_content) {
        std::size_t ls = line_start_of(src_, t.span.begin);
        cur.indent = src_.substr(ls, t.span.begin - ls);
        // Indentation must be pure whitespace (it is, by lexer construction).
        has_content = true;
      }
      cur.toks.push_back(t);
    }
    if (has_content) lines_.push_back(std::move(cur));
  }

  std::size_t find_entry_def() {
    std::size_t best = lines_.size();
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      const auto& l = lines_[i];
      if (l.toks.size() >= 2 && l.toks[0].text == "def" && l.toks[1].text == entry_) {
        if (best == lines_.size() || l.indent.size() < lines_[best].indent.size()) best = i;
      }
    }
    if (best == lines_.size())
      throw ParseError(ParseErrorKind::MissingEntryPoint,
                       "entry point '" + entry_ + "' not defined");
    return best;
  }

  void parse_signature(const LogicalLine& def_line) {
    const auto& t = def_line.toks;
    if (t.size() < 5 || t[2].text != "(")
      throw ParseError(ParseErrorKind::SyntaxError, "malformed def header");
    std::vector<Token> toks(t.begin(), t.end());
    std::size_t close = find_matching(toks, 2);
    unit_.params_list_span = {t[2].span.end, t[close].span.begin};
    // Split parameter chunks on top-level commas.
    std::size_t chunk_start = 3;
    for (std::size_t i = 3; i <= close; ++i) {
      bool at_comma = toks[i].kind == TokenKind::Op && toks[i].text == "," &&
                      bracket_depth(toks, 3, i) == 0;
      if (i == close || at_comma) {
        if (i > chunk_start) add_param(toks, chunk_start, i);
        chunk_start = i + 1;
      } else if (toks[i].kind == TokenKind::Op &&
                 (toks[i].text == "(" || toks[i].text == "[" || toks[i].text == "{")) {
        i = find_matching(toks, i);
      }
    }
    // Header colon: first top-level ':' after the parameter list.
    header_colon_ = close;
    for (std::size_t i = close + 1; i < t.size(); ++i) {
      if (t[i].kind == TokenKind::Op && t[i].text == ":") {
        header_colon_ = i;
        break;
      }
    }
    if (t[header_colon_].text != ":")
      throw ParseError(ParseErrorKind::SyntaxError, "missing ':' in def header");
  }

  static int bracket_depth(const std::vector<Token>& toks, std::size_t begin,
                           std::size_t at) {
    int d = 0;
    for (std::size_t i = begin; i < at; ++i) {
      if (toks[i].kind != TokenKind::Op || toks[i].text.size() != 1) continue;
      char c = toks[i].text[0];
      if (c == '(' || c == '[' || c == '{') ++d;
      if (c == ')' || c == ']' || c == '}') --d;
    }
    return d;
  }

  void add_param(const std::vector<Token>& toks, std::size_t b, std::size_t e) {
    bool has_star = false, has_default = false;
    const Token* name_tok = nullptr;
    int depth = 0;
    for (std::size_t i = b; i < e; ++i) {
      const Token& t = toks[i];
      if (t.kind == TokenKind::Op) {
        if (t.text == "*" || t.text == "**") has_star = true;
        if (t.text == "=" && depth == 0) has_default = true;
        if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
        if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
      } else if (t.kind == TokenKind::Ident && !name_tok) {
        name_tok = &t;
      }
    }
    if (has_star || has_default) unit_.params_reorderable = false;
    if (!name_tok) return;
    unit_.params.emplace_back(name_tok->text);
    unit_.param_spans.push_back({toks[b].span.begin, toks[e - 1].span.end});
    unit_.param_name_spans.push_back(name_tok->span);
  }

  void parse_body(std::size_t def_idx) {
    const LogicalLine& def_line = lines_[def_idx];
    if (header_colon_ + 1 < def_line.toks.size()) {
      // Inline suite: def f(x): return x + 1
      std::vector<Token> rest(def_line.toks.begin() + header_colon_ + 1,
                              def_line.toks.end());
      unit_.body_span = {rest.front().span.begin, rest.back().span.end};
      parse_inline_suite(rest, std::nullopt, Branch::None);
      return;
    }
    std::size_t li = def_idx + 1;
    if (li >= lines_.size() || lines_[li].indent.size() <= def_line.indent.size())
      throw ParseError(ParseErrorKind::SyntaxError, "empty function body");
    std::string body_indent = lines_[li].indent;
    std::size_t first = line_start_of(src_, lines_[li].toks.front().span.begin);
    std::size_t end_li = li;
    parse_block(li, body_indent, def_line.indent, std::nullopt, Branch::None, end_li);
    unit_.body_span = {first, block_end_};
  }

  // Parses statements at exactly `indent` until a line with indent not longer
  // than `outer_indent` (or a shorter indent) is reached. `li` advances.
  std::vector<int> parse_block(std::size_t& li, const std::string& indent,
                               const std::string& outer_indent,
                               std::optional<int> parent, Branch branch,
                               std::size_t& end_li) {
    std::vector<int> created;
    while (li < lines_.size()) {
      const std::string& ind = lines_[li].indent;
      if (ind.size() <= outer_indent.size()) break;
      if (ind.size() < indent.size()) break;  // dedent to an enclosing level
      if (ind.size() > indent.size())
        throw ParseError(ParseErrorKind::SyntaxError, "unexpected indent");
      if (ind != indent)
        throw ParseError(ParseErrorKind::SyntaxError, "inconsistent indentation");
      end_li = li;
      parse_line(li, indent, parent, branch, created);
    }
    return created;
  }

  void parse_line(std::size_t& li, const std::string& indent,
                  std::optional<int> parent, Branch branch,
                  std::vector<int>& created) {
    const LogicalLine& line = lines_[li];
    const auto& t = line.toks;
    std::string_view head = t[0].kind == TokenKind::Ident ? t[0].text : "";
    if (head == "if" || head == "while" || head == "for") {
      created.push_back(parse_compound(li, indent, parent, branch));
      return;
    }
    if (head == "elif" || head == "else")
      throw ParseError(ParseErrorKind::SyntaxError,
                       "dangling '" + std::string(head) + "'");
    if (head == "def") {
      created.push_back(parse_nested_def(li, indent, parent, branch));
      return;
    }
    if (head == "with" || head == "try" || head == "class" || head == "match" ||
        head == "async" || head == "yield")
      throw ParseError(ParseErrorKind::UnsupportedConstruct,
                       "unsupported construct: " + std::string(head));
    // Simple statement(s); split top-level semicolons.
    std::size_t start = 0;
    for (std::size_t i = 0; i <= t.size(); ++i) {
      bool split = i == t.size() || (t[i].kind == TokenKind::Op && t[i].text == ";" &&
                                     bracket_depth(t, 0, i) == 0);
      if (!split) continue;
      if (i > start)
        created.push_back(add_simple(std::vector<Token>(t.begin() + start, t.begin() + i),
                                     parent, branch));
      start = i + 1;
    }
    ++li;
  }

  // if/elif/while/for with an indented or inline suite.
  int parse_compound(std::size_t& li, const std::string& indent,
                     std::optional<int> parent, Branch branch) {
    const LogicalLine& line = lines_[li];
    const auto& t = line.toks;
    std::string_view head = t[0].text;
    std::size_t colon = t.size();
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (t[i].kind == TokenKind::Op && t[i].text == ":" && bracket_depth(t, 0, i) == 0) {
        colon = i;
        break;
      }
    }
    if (colon == t.size())
      throw ParseError(ParseErrorKind::SyntaxError, "missing ':' after " + std::string(head));

    StatementNode node;
    node.index = static_cast<int>(unit_.statements.size()) + 1;
    node.kind = head == "if" ? StatementKind::If : StatementKind::Loop;
    node.parent = parent;
    node.branch = branch;
    node.span = {t[0].span.begin, t[colon].span.end};
    node.header = node.span;
    int idx = node.index;
    std::vector<std::string> cand;

    if (head == "for") {
      // for <targets> in <iter>:
      std::size_t in_pos = colon;
      for (std::size_t i = 1; i < colon; ++i) {
        if (t[i].kind == TokenKind::Ident && t[i].text == "in" &&
            bracket_depth(t, 0, i) == 0) {
          in_pos = i;
          break;
        }
      }
      if (in_pos == colon || in_pos + 1 >= colon)
        throw ParseError(ParseErrorKind::SyntaxError, "malformed for header");
      for (std::size_t i = 1; i < in_pos; ++i)
        if (t[i].kind == TokenKind::Ident) node.defs.insert(std::string(t[i].text));
      node.guard = Span{t[in_pos + 1].span.begin, t[colon - 1].span.end};
      cand = collect_use_idents(t, in_pos + 1, colon, Language::Python);
    } else {
      if (colon < 2)
        throw ParseError(ParseErrorKind::SyntaxError,
                         "empty condition after " + std::string(head));
      node.guard = Span{t[1].span.begin, t[colon - 1].span.end};
      cand = collect_use_idents(t, 1, colon, Language::Python);
    }
    push_stmt(std::move(node), std::move(cand));

    // Suite.
    std::size_t body_end = 0;
    if (colon + 1 < t.size()) {
      std::vector<Token> rest(t.begin() + colon + 1, t.end());
      auto kids = parse_inline_suite(rest, idx, head == "if" ? Branch::Then : Branch::Body);
      unit_.statements[idx - 1].body_span =
          Span{rest.front().span.begin, rest.back().span.end};
      body_end = rest.back().span.end;
      (void)kids;
      ++li;
    } else {
      ++li;
      if (li >= lines_.size() || lines_[li].indent.size() <= indent.size())
        throw ParseError(ParseErrorKind::SyntaxError, "empty suite");
      std::string inner = lines_[li].indent;
      std::size_t first = line_start_of(src_, lines_[li].toks.front().span.begin);
      std::size_t end_li = li;
      parse_block(li, inner, indent, idx, head == "if" ? Branch::Then : Branch::Body,
                  end_li);
      unit_.statements[idx - 1].body_span = Span{first, block_end_};
      body_end = block_end_;
    }
    unit_.statements[idx - 1].span.end = body_end;

    if (head == "if") {
      parse_chain(li, indent, idx);
    } else if (li < lines_.size() && lines_[li].indent == indent &&
               lines_[li].toks[0].text == "else") {
      throw ParseError(ParseErrorKind::UnsupportedConstruct, "loop else clause");
    }
    block_end_ = unit_.statements[idx - 1].span.end;
    return idx;
  }

  // elif/else chain following the guard statement `guard_idx`.
  void parse_chain(std::size_t& li, const std::string& indent, int guard_idx) {
    if (li >= lines_.size() || lines_[li].indent != indent) return;
    const auto& t = lines_[li].toks;
    if (t[0].kind != TokenKind::Ident) return;
    if (t[0].text == "elif") {
      std::size_t kw_begin = t[0].span.begin;
      // Reuse compound machinery by treating elif as an if.
      int elif_idx = parse_elif(li, indent, guard_idx);
      auto& g = unit_.statements[guard_idx - 1];
      g.else_all_span = Span{kw_begin, unit_.statements[elif_idx - 1].span.end};
      g.span.end = std::max(g.span.end, g.else_all_span->end);
    } else if (t[0].text == "else") {
      std::size_t kw_begin = t[0].span.begin;
      std::size_t colon = 1;
      if (t.size() < 2 || t[colon].text != ":")
        throw ParseError(ParseErrorKind::SyntaxError, "malformed else");
      std::size_t content_begin = 0, content_end = 0;
      if (colon + 1 < t.size()) {
        std::vector<Token> rest(t.begin() + colon + 1, t.end());
        parse_inline_suite(rest, guard_idx, Branch::Else);
        content_begin = rest.front().span.begin;
        content_end = rest.back().span.end;
        ++li;
      } else {
        ++li;
        if (li >= lines_.size() || lines_[li].indent.size() <= indent.size())
          throw ParseError(ParseErrorKind::SyntaxError, "empty else suite");
        std::string inner = lines_[li].indent;
        content_begin = line_start_of(src_, lines_[li].toks.front().span.begin);
        std::size_t end_li = li;
        parse_block(li, inner, indent, guard_idx, Branch::Else, end_li);
        content_end = block_end_;
      }
      auto& g = unit_.statements[guard_idx - 1];
      g.else_span = Span{content_begin, content_end};
      g.else_all_span = Span{kw_begin, content_end};
      g.span.end = std::max(g.span.end, content_end);
    }
  }

  int parse_elif(std::size_t& li, const std::string& indent, int parent_guard) {
    const LogicalLine& line = lines_[li];
    const auto& t = line.toks;
    std::size_t colon = t.size();
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (t[i].kind == TokenKind::Op && t[i].text == ":" && bracket_depth(t, 0, i) == 0) {
        colon = i;
        break;
      }
    }
    if (colon == t.size())
      throw ParseError(ParseErrorKind::SyntaxError, "missing ':' after elif");
    if (colon < 2)
      throw ParseError(ParseErrorKind::SyntaxError, "empty condition after elif");
    StatementNode node;
    node.index = static_cast<int>(unit_.statements.size()) + 1;
    node.kind = StatementKind::If;
    node.is_elif = true;
    node.parent = parent_guard;
    node.branch = Branch::Else;
    node.span = {t[0].span.begin, t[colon].span.end};
    node.header = node.span;
    node.guard = Span{t[1].span.begin, t[colon - 1].span.end};
    int idx = node.index;
    push_stmt(std::move(node), collect_use_idents(t, 1, colon, Language::Python));

    std::size_t body_end;
    if (colon + 1 < t.size()) {
      std::vector<Token> rest(t.begin() + colon + 1, t.end());
      parse_inline_suite(rest, idx, Branch::Then);
      unit_.statements[idx - 1].body_span =
          Span{rest.front().span.begin, rest.back().span.end};
      body_end = rest.back().span.end;
      ++li;
    } else {
      ++li;
      if (li >= lines_.size() || lines_[li].indent.size() <= indent.size())
        throw ParseError(ParseErrorKind::SyntaxError, "empty elif suite");
      std::string inner = lines_[li].indent;
      std::size_t first = line_start_of(src_, lines_[li].toks.front().span.begin);
      std::size_t end_li = li;
      parse_block(li, inner, indent, idx, Branch::Then, end_li);
      unit_.statements[idx - 1].body_span = Span{first, block_end_};
      body_end = block_end_;
    }
    unit_.statements[idx - 1].span.end = body_end;
    parse_chain(li, indent, idx);
    return idx;
  }

  std::vector<int> parse_inline_suite(const std::vector<Token>& toks,
                                      std::optional<int> parent, Branch branch) {
    std::vector<int> created;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= toks.size(); ++i) {
      bool split = i == toks.size() ||
                   (toks[i].kind == TokenKind::Op && toks[i].text == ";" &&
                    bracket_depth(toks, 0, i) == 0);
      if (!split) continue;
      if (i > start)
        created.push_back(add_simple(
            std::vector<Token>(toks.begin() + start, toks.begin() + i), parent, branch));
      start = i + 1;
    }
    return created;
  }

  int parse_nested_def(std::size_t& li, const std::string& indent,
                       std::optional<int> parent, Branch branch) {
    const LogicalLine& line = lines_[li];
    StatementNode node;
    node.index = static_cast<int>(unit_.statements.size()) + 1;
    node.kind = StatementKind::Other;
    node.parent = parent;
    node.branch = branch;
    node.span = {line.toks.front().span.begin, line.toks.back().span.end};
    node.header = node.span;
    if (line.toks.size() >= 2 && line.toks[1].kind == TokenKind::Ident)
      node.defs.insert(std::string(line.toks[1].text));
    int idx = node.index;
    push_stmt(std::move(node), {});
    // Swallow the nested body without creating statements.
    ++li;
    while (li < lines_.size() && lines_[li].indent.size() > indent.size()) {
      unit_.statements[idx - 1].span.end = lines_[li].toks.back().span.end;
      ++li;
    }
    block_end_ = unit_.statements[idx - 1].span.end;
    return idx;
  }

  int add_simple(std::vector<Token> toks, std::optional<int> parent, Branch branch) {
    StatementNode node;
    node.index = static_cast<int>(unit_.statements.size()) + 1;
    node.parent = parent;
    node.branch = branch;
    node.span = {toks.front().span.begin, toks.back().span.end};
    node.header = node.span;
    std::vector<std::string> cand;

    std::string_view head = toks[0].kind == TokenKind::Ident ? toks[0].text : "";
    if (head == "return") {
      node.kind = StatementKind::Return;
      cand = collect_use_idents(toks, 1, toks.size(), Language::Python);
    } else if (head == "break" || head == "continue") {
      node.kind = StatementKind::Other;
      node.flow = head == "break" ? FlowTag::Break : FlowTag::Continue;
    } else if (head == "pass" || head == "import" || head == "from" ||
               head == "global" || head == "nonlocal" || head == "del" ||
               head == "assert" || head == "raise") {
      node.kind = StatementKind::Other;
      cand = collect_use_idents(toks, 1, toks.size(), Language::Python);
    } else {
      // Assignment?
      std::size_t assign_at = toks.size();
      bool aug = false;
      for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].kind != TokenKind::Op) continue;
        if (bracket_depth(toks, 0, i) != 0) continue;
        if (toks[i].text == "=") {
          assign_at = i;
          break;
        }
        if (aug_ops().count(std::string(toks[i].text))) {
          assign_at = i;
          aug = true;
          break;
        }
      }
      if (assign_at < toks.size()) {
        node.kind = StatementKind::Assign;
        collect_targets(toks, 0, assign_at, node, cand, aug);
        auto rhs = collect_use_idents(toks, assign_at + 1, toks.size(), Language::Python);
        cand.insert(cand.end(), rhs.begin(), rhs.end());
      } else {
        bool has_call = false;
        for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
          if (toks[i].kind == TokenKind::Ident && toks[i + 1].text == "(") {
            has_call = true;
            break;
          }
        }
        node.kind = has_call ? StatementKind::Call : StatementKind::Other;
        cand = collect_use_idents(toks, 0, toks.size(), Language::Python);
        // Mutating method call: xs.append(v) writes xs without killing it.
        if (toks.size() >= 3 && toks[0].kind == TokenKind::Ident &&
            toks[1].text == "." && toks[2].kind == TokenKind::Ident &&
            is_mutator_method(std::string(toks[2].text), Language::Python)) {
          node.defs.insert(std::string(toks[0].text));
          node.weak_defs.insert(std::string(toks[0].text));
        }
      }
    }
    int idx = node.index;
    push_stmt(std::move(node), std::move(cand));
    block_end_ = unit_.statements[idx - 1].span.end;
    return idx;
  }

  // Assignment targets: plain names define strongly; subscript/attribute
  // targets define the base weakly and read it.
  void collect_targets(const std::vector<Token>& toks, std::size_t b, std::size_t e,
                       StatementNode& node, std::vector<std::string>& cand, bool aug) {
    std::size_t i = b;
    while (i < e) {
      // A top-level ':' starts a type annotation; everything after is a type.
      if (toks[i].kind == TokenKind::Op && toks[i].text == ":") break;
      if (toks[i].kind == TokenKind::Ident &&
          !python_keywords().count(std::string(toks[i].text))) {
        std::string name(toks[i].text);
        bool subscript = i + 1 < e && (toks[i + 1].text == "[" || toks[i + 1].text == ".");
        if (subscript) {
          node.defs.insert(name);
          node.weak_defs.insert(name);
          cand.push_back(name);
          if (toks[i + 1].text == "[") {
            std::size_t close = find_matching(toks, i + 1);
            auto inner = collect_use_idents(toks, i + 2, close, Language::Python);
            cand.insert(cand.end(), inner.begin(), inner.end());
            i = close + 1;
            continue;
          }
        } else {
          node.defs.insert(name);
          if (aug) cand.push_back(name);
        }
      }
      // Annotated assignment: skip over ': type' tokens (idents there are
      // types, filtered out by the known-name intersection anyway).
      ++i;
    }
  }

  void push_stmt(StatementNode node, std::vector<std::string> cand) {
    unit_.statements.push_back(std::move(node));
    use_candidates_.push_back(std::move(cand));
  }

  void finalize_uses() {
    std::set<std::string> known(unit_.params.begin(), unit_.params.end());
    known.insert(unit_.entry_point);
    for (const auto& s : unit_.statements) known.insert(s.defs.begin(), s.defs.end());
    for (std::size_t i = 0; i < unit_.statements.size(); ++i) {
      for (const auto& name : use_candidates_[i])
        if (known.count(name)) unit_.statements[i].uses.insert(name);
    }
  }

  const std::string& src_;
  std::string entry_;
  FunctionUnit unit_;
  std::vector<LogicalLine> lines_;
  std::vector<std::vector<std::string>> use_candidates_;
  std::size_t header_colon_ = 0;
  std::size_t block_end_ = 0;  // end offset of the most recently closed block
};

// ===========================================================================
// Java parser
// ===========================================================================

class JavaParser {
 public:
  JavaParser(const std::string& source, const std::string& entry)
      : src_(source), entry_(entry) {}

  FunctionUnit parse() {
    unit_.language = Language::Java;
    unit_.source = src_;
    unit_.entry_point = entry_;
    for (const Token& t : lex(src_, Language::Java))
      if (t.kind != TokenKind::Comment) toks_.push_back(t);
    std::size_t body_open = find_entry_method();
    std::size_t body_close = find_matching(toks_, body_open);
    unit_.body_span = {toks_[body_open].span.end, toks_[body_close].span.begin};
    parse_stmts(body_open + 1, body_close, std::nullopt, Branch::None);
    finalize_uses();
    return std::move(unit_);
  }

 private:
  std::size_t find_entry_method() {
    for (std::size_t i = 0; i + 1 < toks_.size(); ++i) {
      if (toks_[i].kind != TokenKind::Ident || toks_[i].text != entry_) continue;
      if (toks_[i + 1].text != "(") continue;
      // Preceded by a return type: identifier, generic closer or array closer.
      if (i == 0 || (toks_[i - 1].kind != TokenKind::Ident &&
                     toks_[i - 1].text != ">" && toks_[i - 1].text != "]"))
        continue;
      std::size_t close = find_matching(toks_, i + 1);
      std::size_t j = close + 1;
      while (j < toks_.size() && toks_[j].text != "{" && toks_[j].text != ";" &&
             toks_[j].text != ")")
        ++j;
      if (j < toks_.size() && toks_[j].text == "{") {
        parse_params(i + 1, close);
        return j;
      }
    }
    throw ParseError(ParseErrorKind::MissingEntryPoint,
                     "entry point '" + entry_ + "' not defined");
  }

  void parse_params(std::size_t open, std::size_t close) {
    unit_.params_list_span = {toks_[open].span.end, toks_[close].span.begin};
    std::size_t chunk = open + 1;
    int angle = 0;
    for (std::size_t i = open + 1; i <= close; ++i) {
      const auto& t = toks_[i];
      if (t.kind == TokenKind::Op) {
        if (t.text == "<") ++angle;
        else if (t.text == ">") --angle;
        else if (t.text == ">>") angle -= 2;
        else if (t.text == "(" || t.text == "[") i = find_matching(toks_, i);
      }
      bool at_comma = t.kind == TokenKind::Op && t.text == "," && angle == 0;
      if (i == close || at_comma) {
        if (i > chunk) add_param(chunk, i);
        chunk = i + 1;
      }
    }
  }

  void add_param(std::size_t b, std::size_t e) {
    const Token* name_tok = nullptr;
    for (std::size_t i = b; i < e; ++i) {
      if (toks_[i].kind == TokenKind::Ident &&
          !java_keywords().count(std::string(toks_[i].text)))
        name_tok = &toks_[i];
      if (toks_[i].kind == TokenKind::Op && toks_[i].text == "...")
        unit_.params_reorderable = false;
    }
    if (!name_tok) return;
    std::string name(name_tok->text);
    std::string type =
        trim(src_.substr(toks_[b].span.begin, name_tok->span.begin - toks_[b].span.begin));
    if (type.rfind("final ", 0) == 0) type = trim(type.substr(6));
    unit_.params.push_back(name);
    unit_.param_spans.push_back({toks_[b].span.begin, toks_[e - 1].span.end});
    unit_.param_name_spans.push_back(name_tok->span);
    unit_.var_types[name] = type;
  }

  // Parses the token range [b, e) as a statement sequence.
  void parse_stmts(std::size_t b, std::size_t e, std::optional<int> parent,
                   Branch branch) {
    std::size_t i = b;
    while (i < e) {
      i = parse_one(i, e, parent, branch);
    }
  }

  std::size_t parse_one(std::size_t i, std::size_t e, std::optional<int> parent,
                        Branch branch) {
    const Token& t = toks_[i];
    if (t.kind == TokenKind::Op && t.text == ";") return i + 1;  // empty statement
    if (t.kind == TokenKind::Op && t.text == "{")
      throw ParseError(ParseErrorKind::UnsupportedConstruct, "bare block");
    std::string_view head = t.kind == TokenKind::Ident ? t.text : "";
    if (head == "if") return parse_if(i, e, parent, branch);
    if (head == "while" || head == "for") return parse_loop(i, e, parent, branch);
    if (head == "do" || head == "switch" || head == "try" || head == "throw" ||
        head == "synchronized" || head == "class")
      throw ParseError(ParseErrorKind::UnsupportedConstruct,
                       "unsupported construct: " + std::string(head));
    if (head == "else")
      throw ParseError(ParseErrorKind::SyntaxError, "dangling else");
    return parse_simple(i, e, parent, branch);
  }

  std::size_t parse_if(std::size_t i, std::size_t e, std::optional<int> parent,
                       Branch branch, bool is_elif = false) {
    std::size_t open = i + 1;
    if (open >= e || toks_[open].text != "(")
      throw ParseError(ParseErrorKind::SyntaxError, "malformed if");
    std::size_t close = find_matching(toks_, open);

    StatementNode node;
    node.index = static_cast<int>(unit_.statements.size()) + 1;
    node.kind = StatementKind::If;
    node.is_elif = is_elif;
    node.parent = parent;
    node.branch = branch;
    node.header = {toks_[i].span.begin, toks_[close].span.end};
    node.span = node.header;
    node.guard = Span{toks_[open].span.end, toks_[close].span.begin};
    int idx = node.index;
    push_stmt(std::move(node),
              collect_use_idents(toks_, open + 1, close, Language::Java));

    auto [body_span, braced, next] = parse_suite(close + 1, e, idx, Branch::Then);
    unit_.statements[idx - 1].body_span = body_span;
    unit_.statements[idx - 1].body_braced = braced;
    unit_.statements[idx - 1].span.end = end_of_suite_;

    // else / else-if chain.
    if (next < e && toks_[next].kind == TokenKind::Ident && toks_[next].text == "else") {
      std::size_t else_kw = next;
      if (next + 1 < e && toks_[next + 1].text == "if") {
        std::size_t after = parse_if(next + 1, e, idx, Branch::Else, true);
        auto& g = unit_.statements[idx - 1];
        g.else_all_span = Span{toks_[else_kw].span.begin,
                               unit_.statements.back().span.end};
        // The chained if is the last statement created at this level; its span
        // end is the chain end.
        g.else_all_span->end = chain_end_;
        g.span.end = std::max(g.span.end, g.else_all_span->end);
        chain_end_ = g.span.end;
        return after;
      }
      auto [espan, ebraced, after] = parse_suite(next + 1, e, idx, Branch::Else);
      auto& g = unit_.statements[idx - 1];
      g.else_span = espan;
      g.else_braced = ebraced;
      g.else_all_span = Span{toks_[else_kw].span.begin, end_of_suite_};
      g.span.end = std::max(g.span.end, end_of_suite_);
      chain_end_ = g.span.end;
      return after;
    }
    chain_end_ = unit_.statements[idx - 1].span.end;
    return next;
  }

  std::size_t parse_loop(std::size_t i, std::size_t e, std::optional<int> parent,
                         Branch branch) {
    std::string_view head = toks_[i].text;
    std::size_t open = i + 1;
    if (open >= e || toks_[open].text != "(")
      throw ParseError(ParseErrorKind::SyntaxError, "malformed loop header");
    std::size_t close = find_matching(toks_, open);

    StatementNode node;
    node.index = static_cast<int>(unit_.statements.size()) + 1;
    node.kind = StatementKind::Loop;
    node.parent = parent;
    node.branch = branch;
    node.header = {toks_[i].span.begin, toks_[close].span.end};
    node.span = node.header;
    int idx = node.index;
    std::vector<std::string> cand;

    if (head == "while") {
      node.guard = Span{toks_[open].span.end, toks_[close].span.begin};
      cand = collect_use_idents(toks_, open + 1, close, Language::Java);
    } else {
      // Classic for has two top-level ';'; enhanced for has a top-level ':'.
      std::vector<std::size_t> semis;
      std::size_t colon_at = 0;
      for (std::size_t j = open + 1; j < close; ++j) {
        if (toks_[j].kind != TokenKind::Op) continue;
        if (toks_[j].text == "(" || toks_[j].text == "[") {
          j = find_matching(toks_, j);
          continue;
        }
        if (toks_[j].text == ";") semis.push_back(j);
        if (toks_[j].text == ":" && colon_at == 0) colon_at = j;
      }
      if (semis.size() == 2) {
        // init; cond; update
        collect_for_init(open + 1, semis[0], node, cand);
        node.guard = Span{toks_[semis[0]].span.end, toks_[semis[1]].span.begin};
        auto cu = collect_use_idents(toks_, semis[0] + 1, semis[1], Language::Java);
        cand.insert(cand.end(), cu.begin(), cu.end());
        auto uu = collect_use_idents(toks_, semis[1] + 1, close, Language::Java);
        cand.insert(cand.end(), uu.begin(), uu.end());
        // update writes its target as well
        for (std::size_t j = semis[1] + 1; j < close; ++j)
          if (toks_[j].kind == TokenKind::Ident &&
              !java_keywords().count(std::string(toks_[j].text))) {
            node.defs.insert(std::string(toks_[j].text));
            break;
          }
      } else if (colon_at != 0) {
        // for (Type x : expr)
        const Token* name_tok = nullptr;
        for (std::size_t j = open + 1; j < colon_at; ++j)
          if (toks_[j].kind == TokenKind::Ident &&
              !java_keywords().count(std::string(toks_[j].text)))
            name_tok = &toks_[j];
        if (!name_tok)
          throw ParseError(ParseErrorKind::SyntaxError, "malformed enhanced for");
        std::string name(name_tok->text);
        node.defs.insert(name);
        std::string type = trim(src_.substr(toks_[open + 1].span.begin,
                                            name_tok->span.begin -
                                                toks_[open + 1].span.begin));
        if (type.rfind("final ", 0) == 0) type = trim(type.substr(6));
        if (!type.empty()) unit_.var_types[name] = type;
        node.guard = Span{toks_[colon_at].span.end, toks_[close].span.begin};
        cand = collect_use_idents(toks_, colon_at + 1, close, Language::Java);
      } else {
        throw ParseError(ParseErrorKind::SyntaxError, "malformed for header");
      }
    }
    push_stmt(std::move(node), std::move(cand));

    auto [body_span, braced, next] = parse_suite(close + 1, e, idx, Branch::Body);
    unit_.statements[idx - 1].body_span = body_span;
    unit_.statements[idx - 1].body_braced = braced;
    unit_.statements[idx - 1].span.end = end_of_suite_;
    return next;
  }

  void collect_for_init(std::size_t b, std::size_t e, StatementNode& node,
                        std::vector<std::string>& cand) {
    if (b >= e) return;
    // "int i = 0" or "i = 0"
    std::size_t eq = e;
    for (std::size_t j = b; j < e; ++j)
      if (toks_[j].kind == TokenKind::Op && toks_[j].text == "=") {
        eq = j;
        break;
      }
    const Token* name_tok = nullptr;
    for (std::size_t j = b; j < (eq == e ? e : eq); ++j)
      if (toks_[j].kind == TokenKind::Ident &&
          !java_keywords().count(std::string(toks_[j].text)))
        name_tok = &toks_[j];
    if (name_tok) {
      std::string name(name_tok->text);
      node.defs.insert(name);
      if (name_tok->span.begin > toks_[b].span.begin) {
        std::string type = trim(src_.substr(
            toks_[b].span.begin, name_tok->span.begin - toks_[b].span.begin));
        if (type.rfind("final ", 0) == 0) type = trim(type.substr(6));
        if (!type.empty()) unit_.var_types[name] = type;
      }
    }
    if (eq != e) {
      auto rhs = collect_use_idents(toks_, eq + 1, e, Language::Java);
      cand.insert(cand.end(), rhs.begin(), rhs.end());
    }
  }

  // A braced block or a single statement; returns (content span, braced, next index).
  std::tuple<Span, bool, std::size_t> parse_suite(std::size_t i, std::size_t e,
                                                  int parent, Branch branch) {
    if (i >= e) throw ParseError(ParseErrorKind::SyntaxError, "missing body");
    if (toks_[i].kind == TokenKind::Op && toks_[i].text == "{") {
      std::size_t close = find_matching(toks_, i);
      parse_stmts(i + 1, close, parent, branch);
      end_of_suite_ = toks_[close].span.end;
      return {Span{toks_[i].span.end, toks_[close].span.begin}, true, close + 1};
    }
    std::size_t before = unit_.statements.size();
    std::size_t next = parse_one(i, e, parent, branch);
    // The statement created at this level is the first one pushed; nested
    // children may have been appended after it.
    const auto& created = unit_.statements[before];
    end_of_suite_ = created.span.end;
    return {created.span, false, next};
  }

  std::size_t parse_simple(std::size_t i, std::size_t e, std::optional<int> parent,
                           Branch branch) {
    // Find terminating top-level ';'.
    std::size_t semi = e;
    for (std::size_t j = i; j < e; ++j) {
      if (toks_[j].kind != TokenKind::Op) continue;
      if (toks_[j].text == "(" || toks_[j].text == "[" || toks_[j].text == "{") {
        j = find_matching(toks_, j);
        continue;
      }
      if (toks_[j].text == ";") {
        semi = j;
        break;
      }
    }
    if (semi == e) throw ParseError(ParseErrorKind::SyntaxError, "missing ';'");

    StatementNode node;
    node.index = static_cast<int>(unit_.statements.size()) + 1;
    node.parent = parent;
    node.branch = branch;
    node.span = {toks_[i].span.begin, toks_[semi].span.end};
    node.header = node.span;
    std::vector<std::string> cand;

    std::string_view head = toks_[i].kind == TokenKind::Ident ? toks_[i].text : "";
    if (head == "return") {
      node.kind = StatementKind::Return;
      cand = collect_use_idents(toks_, i + 1, semi, Language::Java);
    } else if (head == "break" || head == "continue") {
      node.kind = StatementKind::Other;
      node.flow = head == "break" ? FlowTag::Break : FlowTag::Continue;
    } else if (is_declaration(i, semi)) {
      node.kind = StatementKind::Decl;
      parse_declarators(i, semi, node, cand);
    } else {
      classify_expr_statement(i, semi, node, cand);
    }
    push_stmt(std::move(node), std::move(cand));
    return semi + 1;
  }

  bool is_declaration(std::size_t i, std::size_t semi) {
    std::size_t j = i;
    if (toks_[j].kind == TokenKind::Ident && toks_[j].text == "final") ++j;
    if (j >= semi || toks_[j].kind != TokenKind::Ident) return false;
    std::string first(toks_[j].text);
    if (java_keywords().count(first) &&
        !(first == "int" || first == "long" || first == "double" ||
          first == "boolean" || first == "char" || first == "float" ||
          first == "short" || first == "byte" || first == "var"))
      return false;
    ++j;
    // Generic arguments.
    if (j < semi && toks_[j].text == "<") {
      int angle = 0;
      while (j < semi) {
        if (toks_[j].text == "<") ++angle;
        else if (toks_[j].text == ">") --angle;
        else if (toks_[j].text == ">>") angle -= 2;
        ++j;
        if (angle == 0) break;
      }
    }
    while (j < semi && toks_[j].text == "[") {
      j = find_matching(toks_, j) + 1;  // array type
    }
    return j < semi && toks_[j].kind == TokenKind::Ident;
  }

  void parse_declarators(std::size_t i, std::size_t semi, StatementNode& node,
                         std::vector<std::string>& cand) {
    std::size_t j = i;
    if (toks_[j].text == "final") ++j;
    std::size_t type_begin = j;
    // Skip type (ident + generics + array brackets).
    ++j;
    if (j < semi && toks_[j].text == "<") {
      int angle = 0;
      while (j < semi) {
        if (toks_[j].text == "<") ++angle;
        else if (toks_[j].text == ">") --angle;
        else if (toks_[j].text == ">>") angle -= 2;
        ++j;
        if (angle == 0) break;
      }
    }
    while (j < semi && toks_[j].text == "[") j = find_matching(toks_, j) + 1;
    std::string type = trim(
        src_.substr(toks_[type_begin].span.begin,
                    toks_[j].span.begin - toks_[type_begin].span.begin));
    // Declarators separated by top-level commas.
    while (j < semi) {
      if (toks_[j].kind != TokenKind::Ident) break;
      std::string name(toks_[j].text);
      node.defs.insert(name);
      unit_.var_types[name] = type;
      ++j;
      if (j < semi && toks_[j].text == "=") {
        std::size_t k = j + 1;
        int depth = 0;
        while (k < semi) {
          const auto& tk = toks_[k];
          if (tk.kind == TokenKind::Op) {
            if (tk.text == "(" || tk.text == "[" || tk.text == "{") ++depth;
            if (tk.text == ")" || tk.text == "]" || tk.text == "}") --depth;
            if (tk.text == "," && depth == 0) break;
          }
          ++k;
        }
        auto rhs = collect_use_idents(toks_, j + 1, k, Language::Java);
        cand.insert(cand.end(), rhs.begin(), rhs.end());
        j = k;
      }
      if (j < semi && toks_[j].text == ",") ++j;
    }
  }

  void classify_expr_statement(std::size_t i, std::size_t semi, StatementNode& node,
                               std::vector<std::string>& cand) {
    // Assignment / compound assignment / increment?
    std::size_t assign_at = semi;
    bool aug = false;
    for (std::size_t j = i; j < semi; ++j) {
      if (toks_[j].kind != TokenKind::Op) continue;
      if (toks_[j].text == "(" || toks_[j].text == "[") {
        j = find_matching(toks_, j);
        continue;
      }
      if (toks_[j].text == "=") {
        assign_at = j;
        break;
      }
      if (aug_ops().count(std::string(toks_[j].text))) {
        assign_at = j;
        aug = true;
        break;
      }
    }
    if (assign_at < semi) {
      node.kind = StatementKind::Assign;
      // Target: first identifier; subscript/field makes it a weak def.
      if (toks_[i].kind == TokenKind::Ident &&
          !java_keywords().count(std::string(toks_[i].text))) {
        std::string name(toks_[i].text);
        node.defs.insert(name);
        bool plain = (i + 1 == assign_at);
        if (!plain) {
          node.weak_defs.insert(name);
          cand.push_back(name);
          auto inner = collect_use_idents(toks_, i + 1, assign_at, Language::Java);
          cand.insert(cand.end(), inner.begin(), inner.end());
        } else if (aug) {
          cand.push_back(name);
        }
      }
      auto rhs = collect_use_idents(toks_, assign_at + 1, semi, Language::Java);
      cand.insert(cand.end(), rhs.begin(), rhs.end());
      return;
    }
    // x++ / x-- / ++x / --x
    for (std::size_t j = i; j + 1 < semi + 1 && j < semi; ++j) {
      if (toks_[j].kind == TokenKind::Op &&
          (toks_[j].text == "++" || toks_[j].text == "--")) {
        const Token* target = nullptr;
        if (j > i && toks_[j - 1].kind == TokenKind::Ident) target = &toks_[j - 1];
        else if (j + 1 < semi && toks_[j + 1].kind == TokenKind::Ident)
          target = &toks_[j + 1];
        if (target) {
          node.kind = StatementKind::Assign;
          std::string name(target->text);
          node.defs.insert(name);
          cand.push_back(name);
          return;
        }
      }
    }
    bool has_call = false;
    for (std::size_t j = i; j + 1 < semi; ++j)
      if (toks_[j].kind == TokenKind::Ident && toks_[j + 1].text == "(") {
        has_call = true;
        break;
      }
    node.kind = has_call ? StatementKind::Call : StatementKind::Other;
    cand = collect_use_idents(toks_, i, semi, Language::Java);
    if (toks_[i].kind == TokenKind::Ident && i + 2 < semi && toks_[i + 1].text == "." &&
        toks_[i + 2].kind == TokenKind::Ident &&
        is_mutator_method(std::string(toks_[i + 2].text), Language::Java)) {
      node.defs.insert(std::string(toks_[i].text));
      node.weak_defs.insert(std::string(toks_[i].text));
    }
  }

  void push_stmt(StatementNode node, std::vector<std::string> cand) {
    unit_.statements.push_back(std::move(node));
    use_candidates_.push_back(std::move(cand));
  }

  void finalize_uses() {
    std::set<std::string> known(unit_.params.begin(), unit_.params.end());
    known.insert(unit_.entry_point);
    for (const auto& s : unit_.statements) known.insert(s.defs.begin(), s.defs.end());
    for (std::size_t i = 0; i < unit_.statements.size(); ++i) {
      for (const auto& name : use_candidates_[i])
        if (known.count(name)) unit_.statements[i].uses.insert(name);
    }
  }

  const std::string& src_;
  std::string entry_;
  FunctionUnit unit_;
  std::vector<Token> toks_;
  std::vector<std::vector<std::string>> use_candidates_;
  std::size_t end_of_suite_ = 0;
  std::size_t chain_end_ = 0;
};

void check_invariants(const FunctionUnit& unit) {
  for (const auto& s : unit.statements) {
    if (s.parent) {
      const auto& p = unit.stmt(*s.parent);
      if (!p.span.contains(s.span))
        throw ParseError(ParseErrorKind::SyntaxError,
                         "internal: child span escapes parent");
    }
  }
}

}  // namespace

FunctionUnit parse_function(const std::string& source, Language language,
                            const std::string& entry_point) {
  FunctionUnit unit = language == Language::Python
                          ? PythonParser(source, entry_point).parse()
                          : JavaParser(source, entry_point).parse();
  check_invariants(unit);
  return unit;
}

std::string serialize(const FunctionUnit& unit) {
  if (!unit.statements.empty() && unit.statements.back().span.end > unit.source.size())
    throw ParseError(ParseErrorKind::SerializationError, "inconsistent IR spans");
  return unit.source;
}

std::vector<DefUseRow> extract_def_use(const FunctionUnit& unit) {
  std::vector<DefUseRow> rows;
  DefUseRow params;
  params.index = 0;
  for (const auto& p : unit.params) params.defs.insert(p);
  rows.push_back(std::move(params));
  for (const auto& s : unit.statements)
    rows.push_back({s.index, s.defs, s.uses});
  return rows;
}

bool ir_equivalent(const FunctionUnit& a, const FunctionUnit& b) {
  if (a.language != b.language || a.entry_point != b.entry_point) return false;
  if (a.params != b.params) return false;
  if (a.statements.size() != b.statements.size()) return false;
  for (std::size_t i = 0; i < a.statements.size(); ++i) {
    const auto& x = a.statements[i];
    const auto& y = b.statements[i];
    if (x.kind != y.kind || x.parent != y.parent || x.branch != y.branch ||
        x.defs != y.defs || x.uses != y.uses || x.flow != y.flow)
      return false;
  }
  return true;
}

// ---- Corpus ingestion ----

std::optional<TestCase> parse_assertion(const std::string& assertion) {
  std::string a = trim(assertion);
  if (a.rfind("assert ", 0) != 0) return std::nullopt;
  std::string rest = a.substr(7);
  // Split on the first top-level '=='.
  int depth = 0;
  bool in_str = false;
  char quote = 0;
  for (std::size_t i = 0; i + 1 < rest.size(); ++i) {
    char c = rest[i];
    if (in_str) {
      if (c == '\\') ++i;
      else if (c == quote) in_str = false;
      continue;
    }
    if (c == '"' || c == '\'') {
      in_str = true;
      quote = c;
      continue;
    }
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (depth == 0 && c == '=' && rest[i + 1] == '=' &&
        (i == 0 || (rest[i - 1] != '!' && rest[i - 1] != '<' && rest[i - 1] != '>' &&
                    rest[i - 1] != '='))) {
      TestCase tc;
      tc.expression = trim(rest.substr(0, i));
      tc.expected = trim(rest.substr(i + 2));
      tc.raw = a;
      if (tc.expression.empty() || tc.expected.empty()) return std::nullopt;
      return tc;
    }
  }
  return std::nullopt;
}

std::vector<CorpusRecord> load_corpus_records(const std::string& jsonl_path) {
  std::ifstream in(jsonl_path);
  if (!in) throw ConfigError("cannot open corpus: " + jsonl_path);
  std::vector<CorpusRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw ConfigError("corpus line " + std::to_string(line_no) + ": invalid JSON");
    CorpusRecord rec;
    rec.task_id = j.at("task_id").get<std::string>();
    auto lang = language_from_string(j.at("language").get<std::string>());
    if (!lang)
      throw ConfigError("corpus line " + std::to_string(line_no) + ": unknown language");
    rec.language = *lang;
    rec.source = j.at("source").get<std::string>();
    rec.entry_point = j.at("entry_point").get<std::string>();
    if (j.contains("tests"))
      for (const auto& t : j["tests"]) rec.tests.push_back(t.get<std::string>());
    if (j.contains("correct") && !j["correct"].is_null())
      rec.correct = j["correct"].get<bool>();
    out.push_back(std::move(rec));
  }
  return out;
}

void save_corpus_records(const std::vector<CorpusRecord>& records,
                         const std::string& jsonl_path) {
  std::ostringstream out;
  for (const auto& rec : records) {
    json j;
    j["task_id"] = rec.task_id;
    j["language"] = to_string(rec.language);
    j["source"] = rec.source;
    j["entry_point"] = rec.entry_point;
    j["tests"] = rec.tests;
    if (rec.correct) j["correct"] = *rec.correct;
    out << j.dump() << "\n";
  }
  write_file_atomic(jsonl_path, out.str());
}

FunctionUnit unit_from_record(const CorpusRecord& rec) {
  FunctionUnit unit = parse_function(rec.source, rec.language, rec.entry_point);
  unit.id = rec.task_id;
  unit.correctness = rec.correct;
  for (const auto& t : rec.tests) {
    auto tc = parse_assertion(t);
    if (tc) unit.tests.push_back(*tc);
  }
  return unit;
}

std::vector<FunctionUnit> load_corpus(const std::string& jsonl_path) {
  std::vector<FunctionUnit> units;
  for (const auto& rec : load_corpus_records(jsonl_path))
    units.push_back(unit_from_record(rec));
  return units;
}

int convert_humaneval(const std::string& in_jsonl, const std::string& out_jsonl) {
  std::ifstream in(in_jsonl);
  if (!in) throw ConfigError("cannot open file: " + in_jsonl);
  std::vector<CorpusRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    CorpusRecord rec;
    rec.task_id = j.value("task_id", "");
    rec.language = Language::Python;
    rec.entry_point = j.value("entry_point", "");
    rec.source = j.value("prompt", "") + j.value("canonical_solution", "");
    std::string test_src = j.value("test", "");
    for (const auto& raw : split_lines(test_src)) {
      std::string t = trim(raw);
      if (t.rfind("assert ", 0) != 0) continue;
      // Rewrite the conventional 'candidate' callee to the entry point.
      std::string rewritten;
      for (std::size_t i = 0; i < t.size();) {
        if (t.compare(i, 9, "candidate") == 0 &&
            (i == 0 || !is_ident_char(t[i - 1])) &&
            (i + 9 >= t.size() || !is_ident_char(t[i + 9]))) {
          rewritten += rec.entry_point;
          i += 9;
        } else {
          rewritten += t[i];
          ++i;
        }
      }
      if (parse_assertion(rewritten)) rec.tests.push_back(rewritten);
    }
    if (!rec.task_id.empty() && !rec.entry_point.empty()) out.push_back(std::move(rec));
  }
  save_corpus_records(out, out_jsonl);
  return static_cast<int>(out.size());
}

}  // namespace semlens
