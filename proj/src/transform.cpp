#include "semlens/transform.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

#include "semlens/lexer.hpp"
#include "semlens/util.hpp"

namespace semlens {

using json = nlohmann::json;

const char* to_string(SemanticClass c) { return c == SemanticClass::SP ? "SP" : "SNP"; }
const char* to_string(DependenceAxis a) {
  return a == DependenceAxis::Control ? "control" : "data";
}

const std::vector<TransformOperator>& list_operators() {
  static const std::vector<TransformOperator> ops = {
      {"sp.rename_var", SemanticClass::SP, DependenceAxis::Data,
       "rename one variable to a fresh neutral name at every occurrence"},
      {"sp.reorder_params", SemanticClass::SP, DependenceAxis::Data,
       "permute the parameter list and rewrite call sites consistently"},
      {"sp.swap_branches_negate", SemanticClass::SP, DependenceAxis::Control,
       "negate a guard and swap its then/else branches"},
      {"sp.for_to_while", SemanticClass::SP, DependenceAxis::Control,
       "rewrite a counted for loop into an equivalent while loop"},
      {"snp.negate_condition", SemanticClass::SNP, DependenceAxis::Control,
       "negate the condition of a conditional statement"},
      {"snp.remove_conditional", SemanticClass::SNP, DependenceAxis::Control,
       "delete a guard, promote its then-branch and drop any else-branch"},
      {"snp.swap_noncommutative_operands", SemanticClass::SNP, DependenceAxis::Data,
       "swap the operands of a -, / or % operation"},
      {"snp.rewire_variable_use", SemanticClass::SNP, DependenceAxis::Data,
       "replace one variable use with a different in-scope variable"},
  };
  return ops;
}

const TransformOperator* find_operator(const std::string& id) {
  for (const auto& op : list_operators())
    if (op.id == id) return &op;
  return nullptr;
}

std::string apply_edits(const std::string& source, std::vector<SpanEdit> edits) {
  std::sort(edits.begin(), edits.end(),
            [](const SpanEdit& a, const SpanEdit& b) { return a.span.begin < b.span.begin; });
  for (std::size_t i = 1; i < edits.size(); ++i)
    if (edits[i - 1].span.end > edits[i].span.begin)
      throw std::logic_error("overlapping edits");
  std::string out;
  std::size_t pos = 0;
  for (const auto& e : edits) {
    out.append(source, pos, e.span.begin - pos);
    out.append(e.after);
    pos = e.span.end;
  }
  out.append(source, pos, source.size() - pos);
  return out;
}

namespace {

bool aug_op(std::string_view t) {
  static const std::set<std::string_view> ops = {"+=", "-=", "*=", "/=", "//=", "**=",
                                                 "%=", "&=", "|=", "^=", "<<=", ">>="};
  return ops.count(t) > 0;
}

bool keyword_like(std::string_view t) {
  static const std::set<std::string_view> kws = {
      "return", "in", "and", "or", "not", "if", "elif", "while", "else",
      "new", "case", "assert", "instanceof", "is", "lambda"};
  return kws.count(t) > 0;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t pick_site(std::size_t n_sites, std::uint64_t seed, const TransformOptions& o) {
  if (n_sites == 0) return 0;
  return o.randomized ? static_cast<std::size_t>(splitmix64(seed) % n_sites) : 0;
}

SpanEdit make_edit(const FunctionUnit& u, Span span, std::string after) {
  return {span, std::string(u.text(span)), std::move(after)};
}

std::vector<Token> lex_span(const FunctionUnit& u, Span span) {
  std::string_view text = u.text(span);
  auto toks = lex(std::string(text), u.language);
  // Rebase spans onto the full source.
  std::vector<Token> out;
  for (auto& t : toks) {
    if (t.kind == TokenKind::Newline || t.kind == TokenKind::Comment) continue;
    Token r = t;
    r.span.begin += span.begin;
    r.span.end += span.begin;
    r.text = std::string_view(u.source).substr(r.span.begin, r.span.end - r.span.begin);
    out.push_back(r);
  }
  return out;
}

std::string indent_of_pos(const std::string& src, std::size_t pos) {
  std::size_t ls = src.rfind('\n', pos == 0 ? 0 : pos - 1);
  ls = (ls == std::string::npos) ? 0 : ls + 1;
  std::string ind;
  for (std::size_t i = ls; i < src.size() && (src[i] == ' ' || src[i] == '\t'); ++i)
    ind += src[i];
  return ind;
}

std::size_t line_start(const std::string& src, std::size_t pos) {
  std::size_t ls = src.rfind('\n', pos == 0 ? 0 : pos - 1);
  return (ls == std::string::npos) ? 0 : ls + 1;
}

// Variables in first-appearance order: parameters, then locals by defining
// statement order. The entry point name is never a candidate.
std::vector<std::string> variable_order(const FunctionUnit& u) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& p : u.params)
    if (seen.insert(p).second) order.push_back(p);
  for (const auto& s : u.statements)
    for (const auto& d : s.defs)
      if (d != u.entry_point && seen.insert(d).second) order.push_back(d);
  return order;
}

// All identifier tokens in the function region (signature params + body).
std::vector<Token> function_tokens(const FunctionUnit& u) {
  std::vector<Token> toks = lex_span(u, u.params_list_span);
  auto body = lex_span(u, u.body_span);
  toks.insert(toks.end(), body.begin(), body.end());
  return toks;
}

bool token_is_member_access(const std::vector<Token>& toks, std::size_t i) {
  return i > 0 && toks[i - 1].kind == TokenKind::Op && toks[i - 1].text == ".";
}

// ---------------------------------------------------------------------------
// Guard negation, shared by swap_branches_negate and negate_condition.
// ---------------------------------------------------------------------------

const char* flipped_relation(std::string_view op) {
  if (op == "==") return "!=";
  if (op == "!=") return "==";
  if (op == "<") return ">=";
  if (op == ">=") return "<";
  if (op == ">") return "<=";
  if (op == "<=") return ">";
  return nullptr;
}

// Produces the edit that negates the guard expression.
SpanEdit negate_guard(const FunctionUnit& u, Span guard) {
  auto toks = lex_span(u, guard);
  const bool py = u.language == Language::Python;

  // Leading whole-guard negation: strip it.
  if (!toks.empty()) {
    bool leading_not = py ? (toks[0].kind == TokenKind::Ident && toks[0].text == "not")
                          : (toks[0].kind == TokenKind::Op && toks[0].text == "!");
    if (leading_not) {
      bool whole = toks.size() == 2;
      if (!whole && toks.size() > 2 && toks[1].text == "(") {
        int depth = 0;
        std::size_t match = 0;
        for (std::size_t i = 1; i < toks.size(); ++i) {
          if (toks[i].text == "(") ++depth;
          if (toks[i].text == ")" && --depth == 0) {
            match = i;
            break;
          }
        }
        whole = match == toks.size() - 1;
      }
      if (whole) {
        Span strip{toks[0].span.begin, toks[1].span.begin};
        return make_edit(u, strip, "");
      }
    }
  }

  // Single top-level relation with no top-level boolean connectives: flip it.
  int depth = 0;
  std::size_t rel_at = toks.size();
  int rel_count = 0;
  bool connectives = false;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const Token& t = toks[i];
    if (t.kind == TokenKind::Op) {
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
      if (depth == 0 && flipped_relation(t.text)) {
        ++rel_count;
        rel_at = i;
      }
      if (depth == 0 && (t.text == "&&" || t.text == "||" || t.text == "!" ||
                         t.text == "?" || t.text == ":"))
        connectives = true;
    } else if (t.kind == TokenKind::Ident && depth == 0 && py) {
      if (t.text == "and" || t.text == "or" || t.text == "not" || t.text == "in" ||
          t.text == "is" || t.text == "if" || t.text == "else")
        connectives = true;
    }
  }
  if (rel_count == 1 && !connectives) {
    const Token& rel = toks[rel_at];
    return make_edit(u, rel.span, flipped_relation(rel.text));
  }

  // General case: wrap.
  std::string g(u.text(guard));
  return make_edit(u, guard, py ? "not (" + g + ")" : "!(" + g + ")");
}

// ---------------------------------------------------------------------------
// Per-operator implementations. Each returns an outcome without re-parse
// validation; apply() finalizes.
// ---------------------------------------------------------------------------

TransformOutcome not_applicable(const std::string& op_id, std::uint64_t seed,
                                const std::string& why) {
  TransformOutcome o;
  o.operator_id = op_id;
  o.status = ApplyStatus::NotApplicable;
  o.seed = seed;
  o.note = why;
  return o;
}

TransformOutcome op_rename_var(const FunctionUnit& u, std::uint64_t seed,
                               const TransformOptions& opts) {
  auto vars = variable_order(u);
  if (vars.empty()) return not_applicable("sp.rename_var", seed, "no variables");
  std::string victim = vars[pick_site(vars.size(), seed, opts)];

  // Fresh name: v<k> with the smallest k colliding with nothing in source.
  std::set<std::string> used;
  for (const auto& t : lex(u.source, u.language))
    if (t.kind == TokenKind::Ident) used.insert(std::string(t.text));
  std::string fresh;
  for (int k = 0;; ++k) {
    fresh = "v" + std::to_string(k);
    if (!used.count(fresh)) break;
  }

  TransformOutcome o;
  o.operator_id = "sp.rename_var";
  o.seed = seed;
  auto toks = function_tokens(u);
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].kind != TokenKind::Ident || toks[i].text != victim) continue;
    if (token_is_member_access(toks, i)) continue;
    o.edit_log.push_back(make_edit(u, toks[i].span, fresh));
  }
  if (o.edit_log.empty())
    return not_applicable("sp.rename_var", seed, "victim has no occurrences");
  o.status = ApplyStatus::Applied;
  o.transformed_source = apply_edits(u.source, o.edit_log);
  return o;
}

// Splits the top-level comma-separated pieces between parens; returns inner
// spans, trimmed of surrounding whitespace.
std::vector<Span> split_call_args(const std::vector<Token>& toks, std::size_t open,
                                  std::size_t close, const std::string& src) {
  std::vector<Span> args;
  int depth = 0;
  std::size_t piece_begin = toks[open].span.end;
  for (std::size_t i = open; i <= close; ++i) {
    const Token& t = toks[i];
    if (t.kind == TokenKind::Op) {
      if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
    }
    bool at_comma = t.kind == TokenKind::Op && t.text == "," && depth == 1;
    bool at_close = i == close;
    if (at_comma || at_close) {
      Span piece{piece_begin, t.span.begin};
      while (piece.begin < piece.end && std::isspace(static_cast<unsigned char>(src[piece.begin])))
        ++piece.begin;
      while (piece.end > piece.begin && std::isspace(static_cast<unsigned char>(src[piece.end - 1])))
        --piece.end;
      if (piece.end > piece.begin) args.push_back(piece);
      piece_begin = t.span.end;
    }
  }
  return args;
}

// Rewrites every call to `entry` in `text` by permuting top-level arguments.
// Returns nullopt when a call cannot be rewritten consistently.
// Entry-point call sites in a token stream: (name token idx, close paren idx).
// Returns nullopt when calls nest inside each other (cannot be rewritten with
// flat span edits).
std::optional<std::vector<std::pair<std::size_t, std::size_t>>> entry_call_sites(
    const std::vector<Token>& toks, const std::string& entry) {
  std::vector<std::pair<std::size_t, std::size_t>> sites;
  for (std::size_t i = 0; i + 1 < toks.size(); ++i) {
    if (toks[i].kind != TokenKind::Ident || toks[i].text != entry) continue;
    if (i > 0 && toks[i - 1].kind == TokenKind::Op && toks[i - 1].text == ".") continue;
    if (toks[i + 1].kind != TokenKind::Op || toks[i + 1].text != "(") continue;
    int depth = 0;
    std::size_t close = 0;
    for (std::size_t j = i + 1; j < toks.size(); ++j) {
      if (toks[j].kind != TokenKind::Op) continue;
      if (toks[j].text == "(") ++depth;
      if (toks[j].text == ")" && --depth == 0) {
        close = j;
        break;
      }
    }
    if (close == 0) return std::nullopt;
    if (!sites.empty() && i < sites.back().second) return std::nullopt;  // nested
    sites.push_back({i, close});
  }
  return sites;
}

std::optional<std::string> permute_calls_in_text(const std::string& text,
                                                 Language lang, const std::string& entry,
                                                 const std::vector<std::size_t>& perm) {
  auto toks = lex(text, lang);
  auto sites = entry_call_sites(toks, entry);
  if (!sites || sites->empty()) return std::nullopt;
  std::vector<SpanEdit> edits;
  for (const auto& [i, close] : *sites) {
    auto args = split_call_args(toks, i + 1, close, text);
    if (args.size() != perm.size()) return std::nullopt;
    for (std::size_t k = 0; k < args.size(); ++k) {
      if (perm[k] == k) continue;
      std::string replacement(text.substr(args[perm[k]].begin, args[perm[k]].size()));
      edits.push_back({args[k], std::string(text.substr(args[k].begin, args[k].size())),
                       std::move(replacement)});
    }
  }
  return apply_edits(text, std::move(edits));
}

TransformOutcome op_reorder_params(const FunctionUnit& u, std::uint64_t seed,
                                   const TransformOptions& opts) {
  const std::size_t n = u.params.size();
  if (n < 2) return not_applicable("sp.reorder_params", seed, "fewer than two parameters");
  if (!u.params_reorderable)
    return not_applicable("sp.reorder_params", seed,
                          "defaults or varargs prevent reordering");

  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = n - 1 - i;
  if (opts.randomized) {
    std::uint64_t s = seed;
    do {
      for (std::size_t i = 0; i < n; ++i) perm[i] = i;
      for (std::size_t i = n - 1; i > 0; --i) {
        s = splitmix64(s);
        std::swap(perm[i], perm[s % (i + 1)]);
      }
    } while (std::is_sorted(perm.begin(), perm.end()));
  }

  TransformOutcome o;
  o.operator_id = "sp.reorder_params";
  o.seed = seed;
  // Signature.
  for (std::size_t i = 0; i < n; ++i) {
    if (perm[i] == i) continue;
    o.edit_log.push_back(
        make_edit(u, u.param_spans[i], std::string(u.text(u.param_spans[perm[i]]))));
  }
  // Recursive call sites inside the body.
  auto toks = lex_span(u, u.body_span);
  auto call_sites = entry_call_sites(toks, u.entry_point);
  if (!call_sites)
    return not_applicable("sp.reorder_params", seed, "nested recursive calls");
  for (const auto& [i, close] : *call_sites) {
    auto args = split_call_args(toks, i + 1, close, u.source);
    if (args.size() != n)
      return not_applicable("sp.reorder_params", seed,
                            "recursive call arity differs from signature");
    for (std::size_t k = 0; k < n; ++k) {
      if (perm[k] == k) continue;
      o.edit_log.push_back(
          make_edit(u, args[k], std::string(u.text(args[perm[k]]))));
    }
  }
  // Bundled test call sites.
  std::vector<TestCase> new_tests;
  for (const auto& tc : u.tests) {
    auto rewritten = permute_calls_in_text(tc.expression, u.language, u.entry_point, perm);
    if (!rewritten)
      return not_applicable("sp.reorder_params", seed,
                            "test call site cannot be rewritten: " + tc.expression);
    TestCase nt = tc;
    nt.expression = *rewritten;
    nt.raw = "assert " + nt.expression + " == " + nt.expected;
    new_tests.push_back(std::move(nt));
  }
  o.transformed_tests = std::move(new_tests);
  o.status = ApplyStatus::Applied;
  o.transformed_source = apply_edits(u.source, o.edit_log);
  return o;
}

TransformOutcome op_swap_branches_negate(const FunctionUnit& u, std::uint64_t seed,
                                         const TransformOptions& opts) {
  const char* id = "sp.swap_branches_negate";
  std::vector<const StatementNode*> sites;
  for (const auto& s : u.statements) {
    if (s.kind != StatementKind::If || !s.guard || !s.else_span || !s.body_span) continue;
    if (u.language == Language::Python) {
      // Require block suites at matching indentation on both sides.
      bool then_block = line_start(u.source, s.body_span->begin) == s.body_span->begin;
      bool else_block = line_start(u.source, s.else_span->begin) == s.else_span->begin;
      if (!then_block || !else_block) continue;
      if (indent_of_pos(u.source, s.body_span->begin) !=
          indent_of_pos(u.source, s.else_span->begin))
        continue;
    } else {
      if (s.body_braced != s.else_braced) continue;
    }
    sites.push_back(&s);
  }
  if (sites.empty()) return not_applicable(id, seed, "no if/else with compatible branches");
  const StatementNode& s = *sites[pick_site(sites.size(), seed, opts)];

  TransformOutcome o;
  o.operator_id = id;
  o.seed = seed;
  o.edit_log.push_back(negate_guard(u, *s.guard));
  o.edit_log.push_back(make_edit(u, *s.body_span, std::string(u.text(*s.else_span))));
  o.edit_log.push_back(make_edit(u, *s.else_span, std::string(u.text(*s.body_span))));
  o.status = ApplyStatus::Applied;
  o.transformed_source = apply_edits(u.source, o.edit_log);
  return o;
}

// Loop body descendants (statement subtree minus the header itself).
std::vector<const StatementNode*> descendants(const FunctionUnit& u, int root) {
  std::vector<const StatementNode*> out;
  for (const auto& s : u.statements) {
    std::optional<int> p = s.parent;
    while (p) {
      if (*p == root) {
        out.push_back(&s);
        break;
      }
      p = u.stmt(*p).parent;
    }
  }
  return out;
}

// Nearest enclosing Loop of a statement.
std::optional<int> nearest_loop(const FunctionUnit& u, const StatementNode& s) {
  std::optional<int> p = s.parent;
  while (p) {
    if (u.stmt(*p).kind == StatementKind::Loop) return p;
    p = u.stmt(*p).parent;
  }
  return std::nullopt;
}

bool body_has_continue(const FunctionUnit& u, int loop_idx) {
  for (const auto* d : descendants(u, loop_idx))
    if (d->flow == FlowTag::Continue && nearest_loop(u, *d) == loop_idx) return true;
  return false;
}

// "Stable" expression: only numbers, identifiers, len(ident) and + - * arith;
// none of its identifiers may be written inside the loop body.
bool stable_range_expr(const FunctionUnit& u, const std::vector<Token>& toks,
                       Span expr, int loop_idx) {
  std::set<std::string> idents;
  for (const auto& t : toks) {
    if (t.span.begin < expr.begin || t.span.end > expr.end) continue;
    if (t.kind == TokenKind::Ident) {
      if (t.text == "len") continue;
      idents.insert(std::string(t.text));
    } else if (t.kind == TokenKind::Number) {
      continue;
    } else if (t.kind == TokenKind::Op) {
      if (t.text == "+" || t.text == "-" || t.text == "*" || t.text == "(" ||
          t.text == ")")
        continue;
      return false;
    } else {
      return false;
    }
  }
  for (const auto* d : descendants(u, loop_idx))
    for (const auto& name : idents)
      if (d->defs.count(name)) return false;
  const auto& header = u.stmt(loop_idx);
  for (const auto& name : idents)
    if (header.defs.count(name)) return false;
  return true;
}

TransformOutcome op_for_to_while(const FunctionUnit& u, std::uint64_t seed,
                                 const TransformOptions& opts) {
  const char* id = "sp.for_to_while";
  struct Site {
    const StatementNode* stmt;
    std::string replacement_header;
    std::string increment;  // appended at body end ("" for Java update text)
  };
  std::vector<Site> sites;

  for (const auto& s : u.statements) {
    if (s.kind != StatementKind::Loop || !s.body_span) continue;
    auto header_toks = lex_span(u, s.header);
    if (header_toks.empty() || header_toks[0].text != "for") continue;
    if (body_has_continue(u, s.index)) continue;

    if (u.language == Language::Java) {
      if (!s.body_braced) continue;
      // for (init; cond; update)
      std::vector<std::size_t> semis;
      int depth = 0;
      for (std::size_t i = 1; i < header_toks.size(); ++i) {
        const auto& t = header_toks[i];
        if (t.kind != TokenKind::Op) continue;
        if (t.text == "(" || t.text == "[") ++depth;
        if (t.text == ")" || t.text == "]") --depth;
        if (t.text == ";" && depth == 1) semis.push_back(i);
      }
      if (semis.size() != 2) continue;  // enhanced for
      std::size_t open = 1;
      Span init{header_toks[open].span.end, header_toks[semis[0]].span.begin};
      Span cond{header_toks[semis[0]].span.end, header_toks[semis[1]].span.begin};
      Span update{header_toks[semis[1]].span.end, header_toks.back().span.begin};
      std::string init_text = trim(u.text(init));
      std::string cond_text = trim(u.text(cond));
      std::string update_text = trim(u.text(update));
      if (cond_text.empty()) cond_text = "true";
      std::string header = init_text.empty() ? "" : init_text + "; ";
      header += "while (" + cond_text + ")";
      sites.push_back({&s, header, update_text});
    } else {
      // for <var> in range(...):
      std::size_t in_pos = 0;
      for (std::size_t i = 1; i < header_toks.size(); ++i)
        if (header_toks[i].kind == TokenKind::Ident && header_toks[i].text == "in") {
          in_pos = i;
          break;
        }
      if (in_pos != 2 || header_toks[1].kind != TokenKind::Ident) continue;
      std::string var(header_toks[1].text);
      if (in_pos + 1 >= header_toks.size() || header_toks[in_pos + 1].text != "range")
        continue;
      if (header_toks[in_pos + 2].text != "(") continue;
      // Args of range(...): must be the whole iterable (next token after the
      // matching ')' is the colon).
      int depth = 0;
      std::size_t close = 0;
      for (std::size_t i = in_pos + 2; i < header_toks.size(); ++i) {
        if (header_toks[i].text == "(") ++depth;
        if (header_toks[i].text == ")" && --depth == 0) {
          close = i;
          break;
        }
      }
      if (close == 0 || close + 2 != header_toks.size() ||
          header_toks[close + 1].text != ":")
        continue;
      // Inline suites would put the appended increment outside the loop.
      if (line_start(u.source, s.body_span->begin) != s.body_span->begin) continue;
      auto args = split_call_args(header_toks, in_pos + 2, close, u.source);
      if (args.empty() || args.size() > 3) continue;

      // The loop variable must not be rewritten in the body or read after it.
      bool var_ok = true;
      for (const auto* d : descendants(u, s.index))
        if (d->defs.count(var)) var_ok = false;
      for (const auto& t : u.statements)
        if (t.index > s.index && t.span.begin >= s.span.end && t.uses.count(var))
          var_ok = false;
      if (!var_ok) continue;

      std::string step = "1";
      bool negative_step = false;
      if (args.size() == 3) {
        std::string st = trim(u.text(args[2]));
        if (st.empty()) continue;
        std::string digits = st[0] == '-' ? st.substr(1) : st;
        if (digits.empty() ||
            !std::all_of(digits.begin(), digits.end(),
                         [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
          continue;  // non-literal step: direction unknown
        if (digits == "0") continue;
        step = st;
        negative_step = st[0] == '-';
      }
      Span stop = args.size() == 1 ? args[0] : args[1];
      if (!stable_range_expr(u, header_toks, stop, s.index)) continue;
      std::string start_text = args.size() == 1 ? "0" : std::string(trim(u.text(args[0])));
      std::string stop_text(trim(u.text(stop)));
      std::string indent = indent_of_pos(u.source, s.header.begin);
      std::string header = var + " = " + start_text + "\n" + indent + "while " + var +
                           (negative_step ? " > " : " < ") + stop_text + ":";
      std::string body_indent = indent_of_pos(u.source, s.body_span->begin);
      std::string increment = "\n" + body_indent + var + " += " + step;
      sites.push_back({&s, header, increment});
    }
  }
  if (sites.empty()) return not_applicable(id, seed, "no convertible for loop");
  const Site& site = sites[pick_site(sites.size(), seed, opts)];
  const StatementNode& s = *site.stmt;

  TransformOutcome o;
  o.operator_id = id;
  o.seed = seed;
  o.edit_log.push_back(make_edit(u, s.header, site.replacement_header));
  if (u.language == Language::Java) {
    if (!site.increment.empty())
      o.edit_log.push_back(
          make_edit(u, Span{s.body_span->end, s.body_span->end}, site.increment + "; "));
  } else {
    o.edit_log.push_back(
        make_edit(u, Span{s.body_span->end, s.body_span->end}, site.increment));
  }
  o.status = ApplyStatus::Applied;
  o.transformed_source = apply_edits(u.source, o.edit_log);
  return o;
}

TransformOutcome op_negate_condition(const FunctionUnit& u, std::uint64_t seed,
                                     const TransformOptions& opts) {
  const char* id = "snp.negate_condition";
  std::vector<const StatementNode*> sites;
  for (const auto& s : u.statements)
    if (s.kind == StatementKind::If && s.guard) sites.push_back(&s);
  if (sites.empty()) return not_applicable(id, seed, "no conditional statement");
  const StatementNode& s = *sites[pick_site(sites.size(), seed, opts)];

  TransformOutcome o;
  o.operator_id = id;
  o.seed = seed;
  o.edit_log.push_back(negate_guard(u, *s.guard));
  o.status = ApplyStatus::Applied;
  o.transformed_source = apply_edits(u.source, o.edit_log);
  return o;
}

TransformOutcome op_remove_conditional(const FunctionUnit& u, std::uint64_t seed,
                                       const TransformOptions& opts) {
  const char* id = "snp.remove_conditional";
  std::vector<const StatementNode*> sites;
  for (const auto& s : u.statements)
    if (s.kind == StatementKind::If && !s.is_elif && s.body_span) sites.push_back(&s);
  if (sites.empty()) return not_applicable(id, seed, "no conditional statement");
  const StatementNode& s = *sites[pick_site(sites.size(), seed, opts)];

  TransformOutcome o;
  o.operator_id = id;
  o.seed = seed;

  if (u.language == Language::Java) {
    o.edit_log.push_back(make_edit(u, Span{s.header.begin, s.body_span->begin}, ""));
    if (s.body_braced)
      o.edit_log.push_back(make_edit(u, Span{s.body_span->end, s.body_span->end + 1}, ""));
    if (s.else_all_span)
      o.edit_log.push_back(make_edit(u, *s.else_all_span, ""));
  } else {
    bool inline_then = line_start(u.source, s.body_span->begin) != s.body_span->begin;
    if (inline_then) {
      o.edit_log.push_back(make_edit(u, Span{s.header.begin, s.body_span->begin}, ""));
      if (s.else_all_span) {
        std::size_t b = line_start(u.source, s.else_all_span->begin);
        std::size_t e = s.else_all_span->end;
        if (e < u.source.size() && u.source[e] == '\n') ++e;
        if (b > s.body_span->end) o.edit_log.push_back(make_edit(u, Span{b, e}, ""));
        else o.edit_log.push_back(make_edit(u, Span{s.body_span->end, e}, ""));
      }
    } else {
      std::string if_indent = indent_of_pos(u.source, s.header.begin);
      std::string body_indent = indent_of_pos(u.source, s.body_span->begin);
      std::size_t delta = body_indent.size() - if_indent.size();
      // Drop the header line.
      o.edit_log.push_back(
          make_edit(u, Span{line_start(u.source, s.header.begin), s.body_span->begin}, ""));
      // Dedent every line of the then-block by delta.
      std::size_t pos = s.body_span->begin;
      while (pos < s.body_span->end) {
        std::size_t eol = u.source.find('\n', pos);
        if (eol == std::string::npos || eol > s.body_span->end) eol = s.body_span->end;
        bool all_ws = true;
        for (std::size_t i = pos; i < pos + delta && i < eol; ++i)
          if (u.source[i] != ' ' && u.source[i] != '\t') all_ws = false;
        if (all_ws && pos + delta <= eol)
          o.edit_log.push_back(make_edit(u, Span{pos, pos + delta}, ""));
        pos = eol + 1;
      }
      // Drop any elif/else chain.
      if (s.else_all_span) {
        std::size_t b = line_start(u.source, s.else_all_span->begin);
        std::size_t e = s.else_all_span->end;
        if (e < u.source.size() && u.source[e] == '\n') ++e;
        o.edit_log.push_back(make_edit(u, Span{b, e}, ""));
      }
    }
  }
  o.status = ApplyStatus::Applied;
  o.transformed_source = apply_edits(u.source, o.edit_log);
  return o;
}

TransformOutcome op_swap_operands(const FunctionUnit& u, std::uint64_t seed,
                                  const TransformOptions& opts) {
  const char* id = "snp.swap_noncommutative_operands";
  struct Site {
    Span lhs, rhs;
  };
  std::vector<Site> sites;

  auto boundary_before = [](const std::vector<Token>& toks, std::size_t i) {
    if (i == 0) return true;
    const Token& p = toks[i - 1];
    if (p.kind == TokenKind::Ident) {
      return p.text == "return" || p.text == "in" || p.text == "and" ||
             p.text == "or" || p.text == "not" || p.text == "if" || p.text == "while" ||
             p.text == "else";
    }
    if (p.kind != TokenKind::Op) return false;
    return !(p.text == ")" || p.text == "]" || p.text == "." || p.text == "*" ||
             p.text == "/" || p.text == "%" || p.text == "**" || p.text == "+" ||
             p.text == "-" || p.text == "++" || p.text == "--");
  };
  auto boundary_after = [](const std::vector<Token>& toks, std::size_t i) {
    if (i + 1 >= toks.size()) return true;
    const Token& a = toks[i + 1];
    if (a.kind != TokenKind::Op) return true;
    return !(a.text == "(" || a.text == "[" || a.text == "." || a.text == "*" ||
             a.text == "/" || a.text == "%" || a.text == "**" || a.text == "++" ||
             a.text == "--");
  };

  for (const auto& s : u.statements) {
    Span region = s.kind == StatementKind::If || s.kind == StatementKind::Loop
                      ? (s.guard ? *s.guard : s.header)
                      : s.header;
    auto toks = lex_span(u, region);
    for (std::size_t i = 1; i + 1 < toks.size(); ++i) {
      const Token& op = toks[i];
      if (op.kind != TokenKind::Op ||
          !(op.text == "-" || op.text == "/" || op.text == "%"))
        continue;
      const Token& l = toks[i - 1];
      const Token& r = toks[i + 1];
      if (l.kind != TokenKind::Ident && l.kind != TokenKind::Number) continue;
      if (r.kind != TokenKind::Ident && r.kind != TokenKind::Number) continue;
      if (l.kind == TokenKind::Ident && keyword_like(l.text)) continue;
      if (r.kind == TokenKind::Ident && keyword_like(r.text)) continue;
      if (l.text == r.text) continue;  // no observable change
      if (!boundary_before(toks, i - 1) || !boundary_after(toks, i + 1)) continue;
      if (token_is_member_access(toks, i - 1)) continue;
      sites.push_back({l.span, r.span});
    }
  }
  if (sites.empty()) return not_applicable(id, seed, "no swappable -, / or % operation");
  const Site& site = sites[pick_site(sites.size(), seed, opts)];

  TransformOutcome o;
  o.operator_id = id;
  o.seed = seed;
  o.edit_log.push_back(make_edit(u, site.lhs, std::string(u.text(site.rhs))));
  o.edit_log.push_back(make_edit(u, site.rhs, std::string(u.text(site.lhs))));
  o.status = ApplyStatus::Applied;
  o.transformed_source = apply_edits(u.source, o.edit_log);
  return o;
}

TransformOutcome op_rewire_use(const FunctionUnit& u, std::uint64_t seed,
                               const TransformOptions& opts) {
  const char* id = "snp.rewire_variable_use";

  // In-scope alternatives for `var` at statement s: parameters and variables
  // defined strictly earlier, matching declared type for Java.
  auto alternatives = [&](const std::string& var, int stmt_index) {
    std::vector<std::string> alts;
    std::set<std::string> seen;
    auto type_ok = [&](const std::string& w) {
      if (u.language == Language::Python) return true;
      auto a = u.var_types.find(var);
      auto b = u.var_types.find(w);
      return a != u.var_types.end() && b != u.var_types.end() && a->second == b->second;
    };
    for (const auto& p : u.params)
      if (p != var && type_ok(p) && seen.insert(p).second) alts.push_back(p);
    for (const auto& s : u.statements) {
      if (s.index >= stmt_index) break;
      for (const auto& d : s.defs)
        if (d != var && d != u.entry_point && type_ok(d) && seen.insert(d).second)
          alts.push_back(d);
    }
    return alts;
  };

  struct Site {
    Span use;
    std::string replacement;
  };
  std::vector<Site> sites;
  for (const auto& s : u.statements) {
    if (s.uses.empty()) continue;
    // Use positions: guard for compound statements; value side for
    // assignments/declarations; the whole statement otherwise.
    Span region = s.header;
    if (s.kind == StatementKind::If || s.kind == StatementKind::Loop) {
      if (!s.guard) continue;
      region = *s.guard;
    }
    auto toks = lex_span(u, region);
    std::size_t begin_at = 0;
    if (s.kind == StatementKind::Assign || s.kind == StatementKind::Decl) {
      for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].kind == TokenKind::Op &&
            (toks[i].text == "=" || aug_op(toks[i].text))) {
          begin_at = i + 1;
          break;
        }
      }
      if (begin_at == 0) continue;  // x++ style: no use side to rewire
    } else if (s.kind == StatementKind::Return) {
      begin_at = 1;
    }
    for (std::size_t i = begin_at; i < toks.size(); ++i) {
      if (toks[i].kind != TokenKind::Ident) continue;
      if (token_is_member_access(toks, i)) continue;
      std::string name(toks[i].text);
      if (!s.uses.count(name)) continue;
      auto alts = alternatives(name, s.index);
      if (alts.empty()) continue;
      sites.push_back({toks[i].span, alts[0]});
    }
  }
  if (sites.empty()) return not_applicable(id, seed, "no use with an in-scope alternative");
  const Site& site = sites[pick_site(sites.size(), seed, opts)];

  TransformOutcome o;
  o.operator_id = id;
  o.seed = seed;
  o.edit_log.push_back(make_edit(u, site.use, site.replacement));
  o.status = ApplyStatus::Applied;
  o.transformed_source = apply_edits(u.source, o.edit_log);
  return o;
}

}  // namespace

TransformOutcome apply(const FunctionUnit& unit, const std::string& operator_id,
                       std::uint64_t seed, const TransformOptions& opts) {
  const TransformOperator* op = find_operator(operator_id);
  if (!op) throw UnknownOperator(operator_id);

  TransformOutcome o;
  if (operator_id == "sp.rename_var") o = op_rename_var(unit, seed, opts);
  else if (operator_id == "sp.reorder_params") o = op_reorder_params(unit, seed, opts);
  else if (operator_id == "sp.swap_branches_negate")
    o = op_swap_branches_negate(unit, seed, opts);
  else if (operator_id == "sp.for_to_while") o = op_for_to_while(unit, seed, opts);
  else if (operator_id == "snp.negate_condition") o = op_negate_condition(unit, seed, opts);
  else if (operator_id == "snp.remove_conditional")
    o = op_remove_conditional(unit, seed, opts);
  else if (operator_id == "snp.swap_noncommutative_operands")
    o = op_swap_operands(unit, seed, opts);
  else if (operator_id == "snp.rewire_variable_use") o = op_rewire_use(unit, seed, opts);
  else throw UnknownOperator(operator_id);

  if (o.status != ApplyStatus::Applied) return o;

  // An Applied outcome must re-parse; a regression is downgraded rather than
  // surfaced as a broken transformation.
  try {
    (void)parse_function(o.transformed_source, unit.language, unit.entry_point);
  } catch (const ParseError& e) {
    TransformOutcome na = not_applicable(o.operator_id, seed,
                                         std::string("parse regression: ") + e.what());
    return na;
  }
  std::sort(o.edit_log.begin(), o.edit_log.end(),
            [](const SpanEdit& a, const SpanEdit& b) { return a.span.begin < b.span.begin; });
  return o;
}

std::vector<TransformOutcome> apply_all(const FunctionUnit& unit, std::uint64_t seed,
                                        const TransformOptions& opts) {
  std::vector<TransformOutcome> out;
  for (const auto& op : list_operators()) out.push_back(apply(unit, op.id, seed, opts));
  return out;
}

std::string outcome_to_json(const std::string& unit_id, const TransformOutcome& o) {
  json j;
  j["unit_id"] = unit_id;
  j["operator"] = o.operator_id;
  j["status"] = o.status == ApplyStatus::Applied ? "applied" : "not_applicable";
  j["seed"] = o.seed;
  if (o.status == ApplyStatus::Applied) {
    j["transformed_source"] = o.transformed_source;
    json edits = json::array();
    for (const auto& e : o.edit_log)
      edits.push_back({{"begin", e.span.begin},
                       {"end", e.span.end},
                       {"before", e.before},
                       {"after", e.after}});
    j["edit_log"] = edits;
    if (o.transformed_tests) {
      json tests = json::array();
      for (const auto& t : *o.transformed_tests)
        tests.push_back({{"expression", t.expression},
                         {"expected", t.expected},
                         {"raw", t.raw}});
      j["transformed_tests"] = tests;
    }
  }
  if (!o.note.empty()) j["note"] = o.note;
  return j.dump();
}

std::pair<std::string, TransformOutcome> outcome_from_json(const std::string& line) {
  json j = json::parse(line);
  TransformOutcome o;
  std::string unit_id = j.at("unit_id").get<std::string>();
  o.operator_id = j.at("operator").get<std::string>();
  o.status = j.at("status").get<std::string>() == "applied" ? ApplyStatus::Applied
                                                            : ApplyStatus::NotApplicable;
  o.seed = j.value("seed", 0ULL);
  if (o.status == ApplyStatus::Applied) {
    o.transformed_source = j.at("transformed_source").get<std::string>();
    for (const auto& e : j.value("edit_log", json::array()))
      o.edit_log.push_back({{e.at("begin").get<std::size_t>(), e.at("end").get<std::size_t>()},
                            e.at("before").get<std::string>(),
                            e.at("after").get<std::string>()});
    if (j.contains("transformed_tests")) {
      std::vector<TestCase> tests;
      for (const auto& t : j["transformed_tests"])
        tests.push_back({t.at("expression").get<std::string>(),
                         t.at("expected").get<std::string>(),
                         t.at("raw").get<std::string>()});
      o.transformed_tests = std::move(tests);
    }
  }
  o.note = j.value("note", "");
  return {unit_id, o};
}

}  // namespace semlens
