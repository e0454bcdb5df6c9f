#include "semlens/javarun.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <variant>

#include "semlens/lexer.hpp"
#include "semlens/util.hpp"

namespace semlens::javarun {

namespace {

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

struct Value;
using List = std::shared_ptr<std::vector<Value>>;

struct Value {
  std::variant<std::monostate, long long, double, bool, std::string, List> v;

  Value() = default;
  Value(long long x) : v(x) {}
  Value(double x) : v(x) {}
  Value(bool x) : v(x) {}
  Value(std::string x) : v(std::move(x)) {}
  Value(List x) : v(std::move(x)) {}

  bool is_null() const { return std::holds_alternative<std::monostate>(v); }
  bool is_long() const { return std::holds_alternative<long long>(v); }
  bool is_double() const { return std::holds_alternative<double>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_str() const { return std::holds_alternative<std::string>(v); }
  bool is_list() const { return std::holds_alternative<List>(v); }
  bool is_numeric() const { return is_long() || is_double(); }

  long long as_long() const { return std::get<long long>(v); }
  double as_double() const {
    return is_long() ? static_cast<double>(as_long()) : std::get<double>(v);
  }
  bool as_bool() const { return std::get<bool>(v); }
  const std::string& as_str() const { return std::get<std::string>(v); }
  const List& as_list() const { return std::get<List>(v); }
};

struct EvalError {
  std::string kind;
  std::string msg;
};

struct TimeoutSignal {};

struct ReturnSignal {
  Value value;
};

struct BreakSignal {};
struct ContinueSignal {};

std::string render(const Value& val) {
  if (val.is_null()) return "null";
  if (val.is_bool()) return val.as_bool() ? "true" : "false";
  if (val.is_long()) return std::to_string(val.as_long());
  if (val.is_double()) {
    double d = std::get<double>(val.v);
    if (std::isnan(d)) return "NaN";
    if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
    if (d == std::floor(d) && std::abs(d) < 1e15) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.1f", d);
      return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", d);
    return buf;
  }
  if (val.is_str()) return val.as_str();
  std::string out = "[";
  const auto& xs = *val.as_list();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += render(xs[i]);
  }
  return out + "]";
}

bool value_equals(const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return a.is_null() && b.is_null();
  if (a.is_numeric() && b.is_numeric()) {
    if (a.is_long() && b.is_long()) return a.as_long() == b.as_long();
    return a.as_double() == b.as_double();
  }
  if (a.is_bool() && b.is_bool()) return a.as_bool() == b.as_bool();
  if (a.is_str() && b.is_str()) return a.as_str() == b.as_str();
  if (a.is_list() && b.is_list()) {
    const auto& x = *a.as_list();
    const auto& y = *b.as_list();
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (!value_equals(x[i], y[i])) return false;
    return true;
  }
  return false;
}

bool value_less(const Value& a, const Value& b) {
  if (a.is_numeric() && b.is_numeric()) return a.as_double() < b.as_double();
  if (a.is_str() && b.is_str()) return a.as_str() < b.as_str();
  throw EvalError{"ClassCastException", "incomparable values"};
}

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

enum class Prim { None, Long, Double, Bool, Str, List };

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind {
    Literal, VarRef, Unary, Binary, Ternary, FreeCall, StaticCall, MethodCall,
    Cast, NewList
  };
  Kind kind;
  Value literal;
  std::string name;   // variable, method or operator text
  std::string owner;  // static receiver (Math, Arrays, ...)
  Prim cast_to = Prim::None;
  ExprPtr a, b, c;
  std::vector<ExprPtr> args;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Stmt {
  enum class Kind {
    Block, Decl, Assign, If, While, For, ForEach, Return, Break, Continue, ExprStmt
  };
  Kind kind;
  Prim decl_type = Prim::None;
  std::string name;  // decl/assign/foreach variable
  std::string op;    // assignment operator text ("=", "+=", ...)
  ExprPtr expr, cond;
  StmtPtr init, update;
  std::vector<StmtPtr> body, else_body;
  std::vector<std::pair<std::string, ExprPtr>> declarators;
};

struct Method {
  std::string name;
  std::vector<std::string> params;
  std::vector<Prim> param_types;
  Prim return_type = Prim::None;
  std::vector<StmtPtr> body;
};

Prim prim_of(std::string_view type_text) {
  if (type_text.rfind("int", 0) == 0 || type_text.rfind("long", 0) == 0 ||
      type_text.rfind("short", 0) == 0 || type_text.rfind("byte", 0) == 0 ||
      type_text.rfind("char", 0) == 0 || type_text == "Integer" || type_text == "Long")
    return Prim::Long;
  if (type_text.rfind("double", 0) == 0 || type_text.rfind("float", 0) == 0 ||
      type_text == "Double" || type_text == "Float")
    return Prim::Double;
  if (type_text.rfind("boolean", 0) == 0 || type_text == "Boolean") return Prim::Bool;
  if (type_text == "String") return Prim::Str;
  if (type_text.rfind("List", 0) == 0 || type_text.rfind("ArrayList", 0) == 0)
    return Prim::List;
  return Prim::None;
}

Value coerce(Prim p, Value v) {
  if (p == Prim::Double && v.is_long()) return Value(static_cast<double>(v.as_long()));
  if (p == Prim::Long && v.is_double())
    return Value(static_cast<long long>(v.as_double()));
  return v;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct ParseFail {
  std::string msg;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src) {
    for (const auto& t : lex(src, Language::Java))
      if (t.kind != TokenKind::Comment) toks_.push_back(t);
  }

  std::map<std::string, Method> parse_methods() {
    std::map<std::string, Method> methods;
    std::size_t i = 0;
    while (i < toks_.size()) {
      auto m = try_method_at(i);
      if (m) {
        std::size_t after = m->second;
        methods[m->first.name] = std::move(m->first);
        i = after;
      } else {
        ++i;
      }
    }
    if (methods.empty()) throw ParseFail{"no method definitions found"};
    return methods;
  }

 private:
  std::optional<std::pair<Method, std::size_t>> try_method_at(std::size_t i) {
    if (i == 0 || i + 1 >= toks_.size()) return std::nullopt;
    if (toks_[i].kind != TokenKind::Ident || toks_[i + 1].text != "(") return std::nullopt;
    const Token& prev = toks_[i - 1];
    if (prev.kind != TokenKind::Ident && prev.text != ">" && prev.text != "]")
      return std::nullopt;
    if (prev.kind == TokenKind::Ident &&
        (prev.text == "return" || prev.text == "new" || prev.text == "else"))
      return std::nullopt;
    std::size_t close = match_paren(i + 1);
    if (close == 0) return std::nullopt;
    std::size_t j = close + 1;
    while (j < toks_.size() && toks_[j].kind == TokenKind::Ident) ++j;  // throws X
    if (j >= toks_.size() || toks_[j].text != "{") return std::nullopt;

    Method m;
    m.name = std::string(toks_[i].text);
    m.return_type = prim_of(prev.text);
    parse_params(i + 1, close, m);
    pos_ = j;
    m.body = parse_block();
    return std::make_pair(std::move(m), pos_);
  }

  std::size_t match_paren(std::size_t open) {
    int depth = 0;
    for (std::size_t j = open; j < toks_.size(); ++j) {
      if (toks_[j].kind != TokenKind::Op) continue;
      if (toks_[j].text == "(") ++depth;
      if (toks_[j].text == ")" && --depth == 0) return j;
    }
    return 0;
  }

  void parse_params(std::size_t open, std::size_t close, Method& m) {
    std::size_t chunk = open + 1;
    int angle = 0;
    for (std::size_t i = open + 1; i <= close; ++i) {
      if (toks_[i].kind == TokenKind::Op) {
        if (toks_[i].text == "<") ++angle;
        if (toks_[i].text == ">") --angle;
        if (toks_[i].text == ">>") angle -= 2;
      }
      bool comma = toks_[i].kind == TokenKind::Op && toks_[i].text == "," && angle == 0;
      if (i == close || comma) {
        if (i > chunk) {
          const Token* name_tok = nullptr;
          for (std::size_t k = chunk; k < i; ++k)
            if (toks_[k].kind == TokenKind::Ident) name_tok = &toks_[k];
          if (name_tok) {
            m.params.emplace_back(name_tok->text);
            m.param_types.push_back(prim_of(toks_[chunk].text));
          }
        }
        chunk = i + 1;
      }
    }
  }

  // --- statement parsing; pos_ is the cursor ---

  const Token& cur() {
    if (pos_ >= toks_.size()) throw ParseFail{"unexpected end of input"};
    return toks_[pos_];
  }
  bool at(std::string_view text) { return pos_ < toks_.size() && toks_[pos_].text == text; }
  void expect(std::string_view text) {
    if (!at(text)) throw ParseFail{"expected '" + std::string(text) + "'"};
    ++pos_;
  }

  std::vector<StmtPtr> parse_block() {
    expect("{");
    std::vector<StmtPtr> out;
    while (!at("}")) out.push_back(parse_stmt());
    expect("}");
    return out;
  }

  std::vector<StmtPtr> parse_suite() {
    if (at("{")) return parse_block();
    std::vector<StmtPtr> out;
    out.push_back(parse_stmt());
    return out;
  }

  StmtPtr parse_stmt() {
    if (at(";")) {
      ++pos_;
      auto s = std::make_unique<Stmt>();
      s->kind = Stmt::Kind::Block;
      return s;
    }
    if (at("{")) {
      auto s = std::make_unique<Stmt>();
      s->kind = Stmt::Kind::Block;
      s->body = parse_block();
      return s;
    }
    const Token& t = cur();
    if (t.kind == TokenKind::Ident) {
      if (t.text == "if") return parse_if();
      if (t.text == "while") return parse_while();
      if (t.text == "for") return parse_for();
      if (t.text == "return") {
        ++pos_;
        auto s = std::make_unique<Stmt>();
        s->kind = Stmt::Kind::Return;
        if (!at(";")) s->expr = parse_expr();
        expect(";");
        return s;
      }
      if (t.text == "break" || t.text == "continue") {
        auto s = std::make_unique<Stmt>();
        s->kind = t.text == "break" ? Stmt::Kind::Break : Stmt::Kind::Continue;
        ++pos_;
        expect(";");
        return s;
      }
      if (is_decl_ahead()) return parse_decl();
    }
    return parse_assign_or_expr();
  }

  bool is_type_name(std::string_view t) {
    return t == "int" || t == "long" || t == "double" || t == "boolean" ||
           t == "char" || t == "float" || t == "short" || t == "byte" ||
           t == "String" || t == "List" || t == "ArrayList" || t == "Integer" ||
           t == "Long" || t == "Double" || t == "Boolean" || t == "var" ||
           t == "final" || t == "Object";
  }

  bool is_decl_ahead() {
    std::size_t j = pos_;
    if (toks_[j].text == "final") ++j;
    if (j >= toks_.size() || toks_[j].kind != TokenKind::Ident) return false;
    if (!is_type_name(toks_[j].text)) return false;
    ++j;
    if (j < toks_.size() && toks_[j].text == "<") {
      int angle = 0;
      while (j < toks_.size()) {
        if (toks_[j].text == "<") ++angle;
        if (toks_[j].text == ">") --angle;
        if (toks_[j].text == ">>") angle -= 2;
        ++j;
        if (angle <= 0) break;
      }
    }
    return j < toks_.size() && toks_[j].kind == TokenKind::Ident;
  }

  Prim parse_type() {
    if (at("final")) ++pos_;
    std::string first(cur().text);
    ++pos_;
    if (at("<")) {
      int angle = 0;
      while (pos_ < toks_.size()) {
        if (at("<")) ++angle;
        if (at(">")) --angle;
        if (cur().text == ">>") angle -= 2;
        ++pos_;
        if (angle <= 0) break;
      }
    }
    return prim_of(first);
  }

  StmtPtr parse_decl() {
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::Decl;
    s->decl_type = parse_type();
    while (true) {
      if (cur().kind != TokenKind::Ident) throw ParseFail{"expected declarator name"};
      std::string name(cur().text);
      ++pos_;
      ExprPtr init;
      if (at("=")) {
        ++pos_;
        init = parse_expr();
      }
      s->declarators.emplace_back(name, std::move(init));
      if (at(",")) {
        ++pos_;
        continue;
      }
      break;
    }
    expect(";");
    return s;
  }

  StmtPtr parse_if() {
    expect("if");
    expect("(");
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::If;
    s->cond = parse_expr();
    expect(")");
    s->body = parse_suite();
    if (at("else")) {
      ++pos_;
      s->else_body = parse_suite();
    }
    return s;
  }

  StmtPtr parse_while() {
    expect("while");
    expect("(");
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::While;
    s->cond = parse_expr();
    expect(")");
    s->body = parse_suite();
    return s;
  }

  StmtPtr parse_for() {
    expect("for");
    expect("(");
    // Enhanced form: Type name : expr
    std::size_t save = pos_;
    if (is_decl_ahead()) {
      Prim ty = parse_type();
      if (cur().kind == TokenKind::Ident) {
        std::string name(cur().text);
        ++pos_;
        if (at(":")) {
          ++pos_;
          auto s = std::make_unique<Stmt>();
          s->kind = Stmt::Kind::ForEach;
          s->decl_type = ty;
          s->name = name;
          s->expr = parse_expr();
          expect(")");
          s->body = parse_suite();
          return s;
        }
      }
      pos_ = save;
    }
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::For;
    if (!at(";")) {
      if (is_decl_ahead()) s->init = parse_decl();  // consumes ';'
      else {
        s->init = parse_assign_no_semi();
        expect(";");
      }
    } else {
      expect(";");
    }
    if (!at(";")) s->cond = parse_expr();
    expect(";");
    if (!at(")")) s->update = parse_assign_no_semi();
    expect(")");
    s->body = parse_suite();
    return s;
  }

  StmtPtr parse_assign_or_expr() {
    auto s = parse_assign_no_semi();
    expect(";");
    return s;
  }

  StmtPtr parse_assign_no_semi() {
    // ++x / --x
    if (at("++") || at("--")) {
      std::string op(cur().text);
      ++pos_;
      if (cur().kind != TokenKind::Ident) throw ParseFail{"expected variable"};
      auto s = std::make_unique<Stmt>();
      s->kind = Stmt::Kind::Assign;
      s->name = std::string(cur().text);
      ++pos_;
      s->op = op == "++" ? "+=" : "-=";
      s->expr = literal_one();
      return s;
    }
    // name = / op= / ++ / --
    if (cur().kind == TokenKind::Ident && pos_ + 1 < toks_.size()) {
      const Token& nxt = toks_[pos_ + 1];
      if (nxt.kind == TokenKind::Op) {
        if (nxt.text == "++" || nxt.text == "--") {
          auto s = std::make_unique<Stmt>();
          s->kind = Stmt::Kind::Assign;
          s->name = std::string(cur().text);
          s->op = nxt.text == "++" ? "+=" : "-=";
          s->expr = literal_one();
          pos_ += 2;
          return s;
        }
        static const char* kAssignOps[] = {"=", "+=", "-=", "*=", "/=", "%=",
                                           "&=", "|=", "^=", "<<=", ">>="};
        for (const char* op : kAssignOps) {
          if (nxt.text == op) {
            auto s = std::make_unique<Stmt>();
            s->kind = Stmt::Kind::Assign;
            s->name = std::string(cur().text);
            s->op = op;
            pos_ += 2;
            s->expr = parse_expr();
            return s;
          }
        }
      }
    }
    auto s = std::make_unique<Stmt>();
    s->kind = Stmt::Kind::ExprStmt;
    s->expr = parse_expr();
    return s;
  }

  ExprPtr literal_one() {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Literal;
    e->literal = Value(static_cast<long long>(1));
    return e;
  }

  // --- expression parsing ---

  ExprPtr parse_expr() { return parse_ternary(); }

  ExprPtr parse_ternary() {
    auto cond = parse_or();
    if (!at("?")) return cond;
    ++pos_;
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::Ternary;
    e->a = std::move(cond);
    e->b = parse_expr();
    expect(":");
    e->c = parse_expr();
    return e;
  }

  ExprPtr parse_binary_level(int level) {
    static const std::vector<std::vector<std::string_view>> kLevels = {
        {"||"}, {"&&"}, {"==", "!="}, {"<", "<=", ">", ">="}, {"+", "-"},
        {"*", "/", "%"}};
    if (level >= static_cast<int>(kLevels.size())) return parse_unary();
    auto lhs = parse_binary_level(level + 1);
    while (pos_ < toks_.size() && cur().kind == TokenKind::Op) {
      bool matched = false;
      for (auto op : kLevels[level]) {
        if (cur().text == op) {
          matched = true;
          break;
        }
      }
      if (!matched) break;
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Binary;
      e->name = std::string(cur().text);
      ++pos_;
      e->a = std::move(lhs);
      e->b = parse_binary_level(level + 1);
      lhs = std::move(e);
    }
    return lhs;
  }

  ExprPtr parse_or() { return parse_binary_level(0); }

  ExprPtr parse_unary() {
    if (at("-") || at("!") || at("+")) {
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Unary;
      e->name = std::string(cur().text);
      ++pos_;
      e->a = parse_unary();
      return e;
    }
    return parse_postfix();
  }

  ExprPtr parse_postfix() {
    auto e = parse_primary();
    while (pos_ < toks_.size() && at(".")) {
      ++pos_;
      if (cur().kind != TokenKind::Ident) throw ParseFail{"expected member name"};
      std::string member(cur().text);
      ++pos_;
      if (at("(")) {
        auto call = std::make_unique<Expr>();
        call->kind = Expr::Kind::MethodCall;
        call->name = member;
        call->a = std::move(e);
        call->args = parse_args();
        e = std::move(call);
      } else {
        throw ParseFail{"field access unsupported: ." + member};
      }
    }
    return e;
  }

  std::vector<ExprPtr> parse_args() {
    expect("(");
    std::vector<ExprPtr> args;
    if (!at(")")) {
      while (true) {
        args.push_back(parse_expr());
        if (at(",")) {
          ++pos_;
          continue;
        }
        break;
      }
    }
    expect(")");
    return args;
  }

  ExprPtr parse_primary() {
    const Token& t = cur();
    if (t.kind == TokenKind::Number) {
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Literal;
      std::string text(t.text);
      bool fp = text.find('.') != std::string::npos ||
                ((text.find('e') != std::string::npos ||
                  text.find('E') != std::string::npos) &&
                 text.rfind("0x", 0) != 0);
      char suffix = text.empty() ? ' ' : text.back();
      if (suffix == 'L' || suffix == 'l') text.pop_back();
      if (suffix == 'f' || suffix == 'F' || suffix == 'd' || suffix == 'D') {
        fp = true;
        text.pop_back();
      }
      if (fp) e->literal = Value(std::stod(text));
      else e->literal = Value(static_cast<long long>(std::stoll(text, nullptr, 0)));
      ++pos_;
      return e;
    }
    if (t.kind == TokenKind::Str) {
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::Literal;
      std::string body = unescape(std::string(t.text));
      if (!t.text.empty() && t.text[0] == '\'') {
        long long c = body.empty() ? 0 : static_cast<unsigned char>(body[0]);
        e->literal = Value(c);
      } else {
        e->literal = Value(body);
      }
      ++pos_;
      return e;
    }
    if (t.kind == TokenKind::Op && t.text == "(") {
      // Cast?
      if (pos_ + 2 < toks_.size() && toks_[pos_ + 1].kind == TokenKind::Ident &&
          toks_[pos_ + 2].text == ")") {
        Prim p = prim_of(toks_[pos_ + 1].text);
        std::string_view name = toks_[pos_ + 1].text;
        bool prim_kw = name == "int" || name == "long" || name == "double" ||
                       name == "char" || name == "float" || name == "boolean" ||
                       name == "short" || name == "byte";
        if (prim_kw && p != Prim::None) {
          pos_ += 3;
          auto e = std::make_unique<Expr>();
          e->kind = Expr::Kind::Cast;
          e->cast_to = p;
          e->a = parse_unary();
          return e;
        }
      }
      ++pos_;
      auto e = parse_expr();
      expect(")");
      return e;
    }
    if (t.kind == TokenKind::Ident) {
      if (t.text == "true" || t.text == "false") {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Literal;
        e->literal = Value(t.text == "true");
        ++pos_;
        return e;
      }
      if (t.text == "null") {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::Literal;
        ++pos_;
        return e;
      }
      if (t.text == "new") {
        ++pos_;
        if (cur().kind != TokenKind::Ident) throw ParseFail{"expected type after new"};
        std::string what(cur().text);
        ++pos_;
        if (at("<")) {  // skip generic args (possibly the diamond <>)
          int angle = 0;
          while (pos_ < toks_.size()) {
            if (at("<")) ++angle;
            if (at(">")) --angle;
            if (cur().text == ">>") angle -= 2;
            ++pos_;
            if (angle <= 0) break;
          }
        }
        if (what != "ArrayList" && what != "StringBuilder")
          throw ParseFail{"unsupported constructor: " + what};
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::NewList;
        e->name = what;
        e->args = parse_args();
        return e;
      }
      // Static receiver or variable or free call.
      std::string name(t.text);
      static const char* kStatics[] = {"Math", "Integer", "Long", "Double",
                                       "Boolean", "String", "Arrays", "Collections",
                                       "List", "Character", "Objects"};
      bool is_static = std::any_of(std::begin(kStatics), std::end(kStatics),
                                   [&](const char* s) { return name == s; });
      if (is_static && pos_ + 1 < toks_.size() && toks_[pos_ + 1].text == ".") {
        pos_ += 2;
        if (cur().kind != TokenKind::Ident) throw ParseFail{"expected static member"};
        std::string member(cur().text);
        ++pos_;
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::StaticCall;
        e->owner = name;
        e->name = member;
        if (at("(")) e->args = parse_args();
        else throw ParseFail{"static field unsupported: " + name + "." + member};
        return e;
      }
      ++pos_;
      if (at("(")) {
        auto e = std::make_unique<Expr>();
        e->kind = Expr::Kind::FreeCall;
        e->name = name;
        e->args = parse_args();
        return e;
      }
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::VarRef;
      e->name = name;
      return e;
    }
    throw ParseFail{"unexpected token: " + std::string(t.text)};
  }

  static std::string unescape(const std::string& quoted) {
    if (quoted.size() < 2) return "";
    std::string body = quoted.substr(1, quoted.size() - 2);
    std::string out;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body[i] != '\\' || i + 1 >= body.size()) {
        out += body[i];
        continue;
      }
      ++i;
      switch (body[i]) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '0': out += '\0'; break;
        case '\\': out += '\\'; break;
        case '\'': out += '\''; break;
        case '"': out += '"'; break;
        default: out += body[i];
      }
    }
    return out;
  }

  const std::string& src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Interpreter
// ---------------------------------------------------------------------------

class Interp {
 public:
  Interp(const std::map<std::string, const Method*>& methods, long long budget)
      : methods_(methods), budget_(budget) {}

  Value call(const std::string& name, std::vector<Value> args) {
    auto it = methods_.find(name);
    if (it == methods_.end())
      throw EvalError{"NoSuchMethodError", "undefined method: " + name};
    const Method& m = *it->second;
    if (args.size() != m.params.size())
      throw EvalError{"IllegalArgumentException", "arity mismatch calling " + name};
    if (++depth_ > 2000) {
      --depth_;
      throw EvalError{"StackOverflowError", "recursion too deep"};
    }
    std::map<std::string, Value> frame;
    for (std::size_t i = 0; i < args.size(); ++i)
      frame[m.params[i]] = coerce(m.param_types[i], std::move(args[i]));
    env_.push_back(std::move(frame));
    Value result;
    try {
      exec_body(m.body);
    } catch (ReturnSignal& r) {
      result = coerce(m.return_type, std::move(r.value));
    } catch (...) {
      env_.pop_back();
      --depth_;
      throw;
    }
    env_.pop_back();
    --depth_;
    return result;
  }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Literal: return e.literal;
      case Expr::Kind::VarRef: {
        auto& frame = env_.back();
        auto it = frame.find(e.name);
        if (it == frame.end())
          throw EvalError{"SymbolError", "undefined variable: " + e.name};
        return it->second;
      }
      case Expr::Kind::Unary: {
        Value v = eval(*e.a);
        if (e.name == "!") {
          if (!v.is_bool()) throw EvalError{"TypeError", "! needs boolean"};
          return Value(!v.as_bool());
        }
        if (e.name == "+") return v;
        if (v.is_long()) return Value(-v.as_long());
        if (v.is_double()) return Value(-v.as_double());
        throw EvalError{"TypeError", "unary - needs a number"};
      }
      case Expr::Kind::Binary: return eval_binary(e);
      case Expr::Kind::Ternary: {
        Value c = eval(*e.a);
        if (!c.is_bool()) throw EvalError{"TypeError", "ternary needs boolean"};
        return c.as_bool() ? eval(*e.b) : eval(*e.c);
      }
      case Expr::Kind::Cast: {
        Value v = eval(*e.a);
        if (e.cast_to == Prim::Long && v.is_double())
          return Value(static_cast<long long>(v.as_double()));
        if (e.cast_to == Prim::Double && v.is_long())
          return Value(static_cast<double>(v.as_long()));
        return v;
      }
      case Expr::Kind::NewList: {
        if (e.name == "StringBuilder") {
          return e.args.empty() ? Value(std::string()) : eval(*e.args[0]);
        }
        auto list = std::make_shared<std::vector<Value>>();
        if (!e.args.empty()) {
          Value src = eval(*e.args[0]);
          if (src.is_list()) *list = *src.as_list();
        }
        return Value(list);
      }
      case Expr::Kind::FreeCall: {
        std::vector<Value> args;
        for (const auto& a : e.args) args.push_back(eval(*a));
        return call(e.name, std::move(args));
      }
      case Expr::Kind::StaticCall: return eval_static(e);
      case Expr::Kind::MethodCall: return eval_method(e);
    }
    throw EvalError{"InternalError", "bad expression"};
  }

 private:
  void tick() {
    if (--budget_ <= 0) throw TimeoutSignal{};
  }

  void exec_body(const std::vector<StmtPtr>& body) {
    for (const auto& s : body) exec(*s);
  }

  void exec(const Stmt& s) {
    tick();
    switch (s.kind) {
      case Stmt::Kind::Block: exec_body(s.body); return;
      case Stmt::Kind::Decl: {
        for (const auto& [name, init] : s.declarators) {
          Value v = init ? eval(*init) : Value();
          env_.back()[name] = coerce(s.decl_type, std::move(v));
        }
        return;
      }
      case Stmt::Kind::Assign: {
        auto& frame = env_.back();
        Value rhs = eval(*s.expr);
        if (s.op == "=") {
          auto it = frame.find(s.name);
          // Preserve the declared floating-point kind across reassignment.
          if (it != frame.end() && it->second.is_double() && rhs.is_long())
            rhs = Value(rhs.as_double());
          frame[s.name] = std::move(rhs);
          return;
        }
        auto it = frame.find(s.name);
        if (it == frame.end())
          throw EvalError{"SymbolError", "undefined variable: " + s.name};
        std::string binop = s.op.substr(0, s.op.size() - 1);
        it->second = eval_binop_values(binop, it->second, rhs);
        return;
      }
      case Stmt::Kind::If: {
        Value c = eval(*s.cond);
        if (!c.is_bool()) throw EvalError{"TypeError", "if needs boolean"};
        if (c.as_bool()) exec_body(s.body);
        else exec_body(s.else_body);
        return;
      }
      case Stmt::Kind::While: {
        while (true) {
          tick();
          Value c = eval(*s.cond);
          if (!c.is_bool()) throw EvalError{"TypeError", "while needs boolean"};
          if (!c.as_bool()) break;
          try {
            exec_body(s.body);
          } catch (BreakSignal&) {
            break;
          } catch (ContinueSignal&) {
          }
        }
        return;
      }
      case Stmt::Kind::For: {
        if (s.init) exec(*s.init);
        while (true) {
          tick();
          if (s.cond) {
            Value c = eval(*s.cond);
            if (!c.is_bool()) throw EvalError{"TypeError", "for needs boolean"};
            if (!c.as_bool()) break;
          }
          bool broke = false;
          try {
            exec_body(s.body);
          } catch (BreakSignal&) {
            broke = true;
          } catch (ContinueSignal&) {
          }
          if (broke) break;
          if (s.update) exec(*s.update);
        }
        return;
      }
      case Stmt::Kind::ForEach: {
        Value seq = eval(*s.expr);
        if (seq.is_str()) {
          const std::string str = seq.as_str();
          for (char ch : str) {
            tick();
            env_.back()[s.name] =
                coerce(s.decl_type, Value(static_cast<long long>(
                                        static_cast<unsigned char>(ch))));
            try {
              exec_body(s.body);
            } catch (BreakSignal&) {
              return;
            } catch (ContinueSignal&) {
            }
          }
          return;
        }
        if (!seq.is_list()) throw EvalError{"TypeError", "for-each needs a list"};
        // Iterate over a snapshot; mutating the source list mid-iteration
        // would throw in Java anyway.
        std::vector<Value> snapshot = *seq.as_list();
        for (const auto& item : snapshot) {
          tick();
          env_.back()[s.name] = coerce(s.decl_type, item);
          try {
            exec_body(s.body);
          } catch (BreakSignal&) {
            return;
          } catch (ContinueSignal&) {
          }
        }
        return;
      }
      case Stmt::Kind::Return: {
        ReturnSignal r;
        if (s.expr) r.value = eval(*s.expr);
        throw r;
      }
      case Stmt::Kind::Break: throw BreakSignal{};
      case Stmt::Kind::Continue: throw ContinueSignal{};
      case Stmt::Kind::ExprStmt: eval(*s.expr); return;
    }
  }

  Value eval_binary(const Expr& e) {
    if (e.name == "&&") {
      Value a = eval(*e.a);
      if (!a.is_bool()) throw EvalError{"TypeError", "&& needs boolean"};
      if (!a.as_bool()) return Value(false);
      Value b = eval(*e.b);
      if (!b.is_bool()) throw EvalError{"TypeError", "&& needs boolean"};
      return b;
    }
    if (e.name == "||") {
      Value a = eval(*e.a);
      if (!a.is_bool()) throw EvalError{"TypeError", "|| needs boolean"};
      if (a.as_bool()) return Value(true);
      Value b = eval(*e.b);
      if (!b.is_bool()) throw EvalError{"TypeError", "|| needs boolean"};
      return b;
    }
    Value a = eval(*e.a);
    Value b = eval(*e.b);
    return eval_binop_values(e.name, a, b);
  }

  Value eval_binop_values(const std::string& op, const Value& a, const Value& b) {
    if (op == "+") {
      if (a.is_str() || b.is_str()) return Value(render(a) + render(b));
    }
    if (op == "==") return Value(value_equals(a, b));
    if (op == "!=") return Value(!value_equals(a, b));
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      if (!((a.is_numeric() && b.is_numeric())))
        throw EvalError{"TypeError", "relational needs numbers"};
      double x = a.as_double(), y = b.as_double();
      if (op == "<") return Value(x < y);
      if (op == "<=") return Value(x <= y);
      if (op == ">") return Value(x > y);
      return Value(x >= y);
    }
    if (!a.is_numeric() || !b.is_numeric())
      throw EvalError{"TypeError", "arithmetic needs numbers"};
    bool both_long = a.is_long() && b.is_long();
    if (op == "+") {
      if (both_long) return Value(a.as_long() + b.as_long());
      return Value(a.as_double() + b.as_double());
    }
    if (op == "-") {
      if (both_long) return Value(a.as_long() - b.as_long());
      return Value(a.as_double() - b.as_double());
    }
    if (op == "*") {
      if (both_long) return Value(a.as_long() * b.as_long());
      return Value(a.as_double() * b.as_double());
    }
    if (op == "/") {
      if (both_long) {
        if (b.as_long() == 0) throw EvalError{"ArithmeticException", "/ by zero"};
        return Value(a.as_long() / b.as_long());
      }
      return Value(a.as_double() / b.as_double());
    }
    if (op == "%") {
      if (both_long) {
        if (b.as_long() == 0) throw EvalError{"ArithmeticException", "% by zero"};
        return Value(a.as_long() % b.as_long());
      }
      return Value(std::fmod(a.as_double(), b.as_double()));
    }
    throw EvalError{"TypeError", "unsupported operator: " + op};
  }

  Value eval_static(const Expr& e) {
    std::vector<Value> args;
    for (const auto& a : e.args) args.push_back(eval(*a));
    const std::string& m = e.name;
    auto need = [&](std::size_t n) {
      if (args.size() != n)
        throw EvalError{"IllegalArgumentException", e.owner + "." + m + " arity"};
    };
    if (e.owner == "Math") {
      if (m == "abs") {
        need(1);
        if (args[0].is_long()) return Value(std::abs(args[0].as_long()));
        return Value(std::abs(args[0].as_double()));
      }
      if (m == "max" || m == "min") {
        need(2);
        bool take_max = m == "max";
        if (args[0].is_long() && args[1].is_long())
          return Value(take_max ? std::max(args[0].as_long(), args[1].as_long())
                                : std::min(args[0].as_long(), args[1].as_long()));
        double x = args[0].as_double(), y = args[1].as_double();
        return Value(take_max ? std::max(x, y) : std::min(x, y));
      }
      if (m == "sqrt") {
        need(1);
        return Value(std::sqrt(args[0].as_double()));
      }
      if (m == "pow") {
        need(2);
        return Value(std::pow(args[0].as_double(), args[1].as_double()));
      }
      if (m == "floor") {
        need(1);
        return Value(std::floor(args[0].as_double()));
      }
      if (m == "ceil") {
        need(1);
        return Value(std::ceil(args[0].as_double()));
      }
      if (m == "round") {
        need(1);
        return Value(static_cast<long long>(std::llround(args[0].as_double())));
      }
    }
    if (e.owner == "Integer" || e.owner == "Long") {
      if (m == "parseInt" || m == "parseLong" || m == "valueOf") {
        need(1);
        if (args[0].is_str()) {
          try {
            return Value(static_cast<long long>(std::stoll(args[0].as_str())));
          } catch (...) {
            throw EvalError{"NumberFormatException", args[0].as_str()};
          }
        }
        return args[0];
      }
      if (m == "toString") {
        need(1);
        return Value(render(args[0]));
      }
    }
    if (e.owner == "Double") {
      if (m == "parseDouble" || m == "valueOf") {
        need(1);
        if (args[0].is_str()) {
          try {
            return Value(std::stod(args[0].as_str()));
          } catch (...) {
            throw EvalError{"NumberFormatException", args[0].as_str()};
          }
        }
        return coerce(Prim::Double, args[0]);
      }
    }
    if (e.owner == "String" && m == "valueOf") {
      need(1);
      return Value(render(args[0]));
    }
    if (e.owner == "Arrays" && m == "asList") {
      auto list = std::make_shared<std::vector<Value>>(std::move(args));
      return Value(list);
    }
    if (e.owner == "List" && m == "of") {
      auto list = std::make_shared<std::vector<Value>>(std::move(args));
      return Value(list);
    }
    if (e.owner == "Collections") {
      need(1);
      if (!args[0].is_list())
        throw EvalError{"TypeError", "Collections." + m + " needs a list"};
      auto& xs = *args[0].as_list();
      if (m == "sort") {
        std::stable_sort(xs.begin(), xs.end(), value_less);
        return Value();
      }
      if (m == "reverse") {
        std::reverse(xs.begin(), xs.end());
        return Value();
      }
      if (m == "max" || m == "min") {
        if (xs.empty()) throw EvalError{"NoSuchElementException", "empty list"};
        Value best = xs[0];
        for (const auto& x : xs)
          if (m == "max" ? value_less(best, x) : value_less(x, best)) best = x;
        return best;
      }
    }
    if (e.owner == "Character") {
      need(1);
      long long c = args[0].is_long() ? args[0].as_long() : 0;
      if (m == "isDigit") return Value(c >= '0' && c <= '9');
      if (m == "isLetter")
        return Value((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'));
      if (m == "isUpperCase") return Value(c >= 'A' && c <= 'Z');
      if (m == "isLowerCase") return Value(c >= 'a' && c <= 'z');
      if (m == "toLowerCase")
        return Value(c >= 'A' && c <= 'Z' ? c + 32 : c);
      if (m == "toUpperCase")
        return Value(c >= 'a' && c <= 'z' ? c - 32 : c);
    }
    throw EvalError{"NoSuchMethodError", e.owner + "." + m + " unsupported"};
  }

  Value eval_method(const Expr& e) {
    Value target = eval(*e.a);
    std::vector<Value> args;
    for (const auto& a : e.args) args.push_back(eval(*a));
    const std::string& m = e.name;
    auto need = [&](std::size_t n) {
      if (args.size() != n)
        throw EvalError{"IllegalArgumentException", "." + m + " arity"};
    };

    if (target.is_str()) {
      const std::string& s = target.as_str();
      auto as_text = [&](const Value& v) -> std::string {
        if (v.is_str()) return v.as_str();
        if (v.is_long()) return std::string(1, static_cast<char>(v.as_long()));
        throw EvalError{"TypeError", "." + m + " needs a string"};
      };
      if (m == "length") return Value(static_cast<long long>(s.size()));
      if (m == "isEmpty") return Value(s.empty());
      if (m == "charAt") {
        need(1);
        long long i = args[0].as_long();
        if (i < 0 || i >= static_cast<long long>(s.size()))
          throw EvalError{"StringIndexOutOfBoundsException", std::to_string(i)};
        return Value(static_cast<long long>(static_cast<unsigned char>(s[i])));
      }
      if (m == "substring") {
        long long b = args.at(0).as_long();
        long long e2 = args.size() > 1 ? args[1].as_long()
                                       : static_cast<long long>(s.size());
        if (b < 0 || e2 > static_cast<long long>(s.size()) || b > e2)
          throw EvalError{"StringIndexOutOfBoundsException", "substring"};
        return Value(s.substr(b, e2 - b));
      }
      if (m == "equals") {
        need(1);
        return Value(value_equals(target, args[0]));
      }
      if (m == "equalsIgnoreCase") {
        need(1);
        return Value(to_lower(s) == to_lower(as_text(args[0])));
      }
      if (m == "contains") {
        need(1);
        return Value(s.find(as_text(args[0])) != std::string::npos);
      }
      if (m == "indexOf") {
        need(1);
        auto p = s.find(as_text(args[0]));
        return Value(p == std::string::npos ? -1LL : static_cast<long long>(p));
      }
      if (m == "startsWith") {
        need(1);
        return Value(s.rfind(as_text(args[0]), 0) == 0);
      }
      if (m == "endsWith") {
        need(1);
        std::string suf = as_text(args[0]);
        return Value(s.size() >= suf.size() && s.compare(s.size() - suf.size(),
                                                         suf.size(), suf) == 0);
      }
      if (m == "toLowerCase") return Value(to_lower(s));
      if (m == "toUpperCase") {
        std::string out(s);
        for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        return Value(out);
      }
      if (m == "trim" || m == "strip") return Value(trim(s));
      if (m == "toCharArray" || m == "chars") return target;  // iterated as text
      if (m == "replace") {
        need(2);
        std::string from = as_text(args[0]), to = as_text(args[1]);
        std::string out;
        if (from.empty()) return Value(s);
        std::size_t pos = 0;
        while (true) {
          std::size_t hit = s.find(from, pos);
          if (hit == std::string::npos) {
            out += s.substr(pos);
            break;
          }
          out += s.substr(pos, hit - pos);
          out += to;
          pos = hit + from.size();
        }
        return Value(out);
      }
      if (m == "compareTo") {
        need(1);
        return Value(static_cast<long long>(s.compare(as_text(args[0]))));
      }
      if (m == "append") {  // StringBuilder stand-in
        need(1);
        return Value(s + render(args[0]));
      }
      if (m == "toString") return target;
    }

    if (target.is_list()) {
      auto& xs = *target.as_list();
      auto check_index = [&](long long i) {
        if (i < 0 || i >= static_cast<long long>(xs.size()))
          throw EvalError{"IndexOutOfBoundsException", std::to_string(i)};
      };
      if (m == "size") return Value(static_cast<long long>(xs.size()));
      if (m == "isEmpty") return Value(xs.empty());
      if (m == "get") {
        need(1);
        check_index(args[0].as_long());
        return xs[args[0].as_long()];
      }
      if (m == "set") {
        need(2);
        check_index(args[0].as_long());
        Value old = xs[args[0].as_long()];
        xs[args[0].as_long()] = args[1];
        return old;
      }
      if (m == "add") {
        if (args.size() == 1) {
          xs.push_back(args[0]);
          return Value(true);
        }
        need(2);
        long long i = args[0].as_long();
        if (i < 0 || i > static_cast<long long>(xs.size()))
          throw EvalError{"IndexOutOfBoundsException", std::to_string(i)};
        xs.insert(xs.begin() + i, args[1]);
        return Value();
      }
      if (m == "contains") {
        need(1);
        for (const auto& x : xs)
          if (value_equals(x, args[0])) return Value(true);
        return Value(false);
      }
      if (m == "indexOf") {
        need(1);
        for (std::size_t i = 0; i < xs.size(); ++i)
          if (value_equals(xs[i], args[0])) return Value(static_cast<long long>(i));
        return Value(-1LL);
      }
      if (m == "equals") {
        need(1);
        return Value(value_equals(target, args[0]));
      }
      if (m == "clear") {
        xs.clear();
        return Value();
      }
    }

    if (target.is_long()) {
      // Boxed Integer methods occasionally used.
      if (m == "equals") {
        need(1);
        return Value(value_equals(target, args[0]));
      }
      if (m == "toString") return Value(render(target));
    }
    if (target.is_double() && m == "equals") {
      need(1);
      return Value(value_equals(target, args[0]));
    }
    throw EvalError{"NoSuchMethodError", "." + m + " unsupported"};
  }

  const std::map<std::string, const Method*>& methods_;
  long long budget_;
  int depth_ = 0;
  std::vector<std::map<std::string, Value>> env_;
};

}  // namespace

std::vector<JavaTestResult> run_java_tests(const std::string& source,
                                           const std::vector<TestCase>& tests,
                                           long long step_budget) {
  std::vector<JavaTestResult> results(tests.size());
  std::map<std::string, Method> methods;
  try {
    Parser parser(source);
    methods = parser.parse_methods();
  } catch (const ParseFail&) {
    for (auto& r : results) {
      r.status = JavaTestResult::Status::Error;
      r.error_kind = "CompileOrImport";
    }
    return results;
  }

  for (std::size_t i = 0; i < tests.size(); ++i) {
    JavaTestResult& r = results[i];
    try {
      // Each test runs with a fresh budget; expressions are parsed by
      // wrapping them in a scratch method.
      std::string expr_src = "class T { static Object scratch_expr() { return " +
                             tests[i].expression + "; } }";
      std::string want_src = "class T { static Object scratch_want() { return " +
                             tests[i].expected + "; } }";
      Parser pe(expr_src);
      auto expr_m = pe.parse_methods();
      Parser pw(want_src);
      auto want_m = pw.parse_methods();

      std::map<std::string, const Method*> all;
      for (const auto& [k, v] : methods) all[k] = &v;
      all["__expr"] = &expr_m.at("scratch_expr");
      all["__want"] = &want_m.at("scratch_want");

      Interp interp(all, step_budget);
      Value actual = interp.call("__expr", {});
      Value expected = interp.call("__want", {});
      if (value_equals(actual, expected)) {
        r.status = JavaTestResult::Status::Pass;
      } else {
        r.status = JavaTestResult::Status::Fail;
        r.actual = render(actual);
      }
    } catch (const TimeoutSignal&) {
      r.status = JavaTestResult::Status::Error;
      r.error_kind = "Timeout";
    } catch (const EvalError& e) {
      r.status = JavaTestResult::Status::Error;
      r.error_kind = e.kind;
    } catch (const ParseFail&) {
      r.status = JavaTestResult::Status::Error;
      r.error_kind = "CompileOrImport";
    }
  }
  return results;
}

}  // namespace semlens::javarun
