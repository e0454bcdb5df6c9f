#include "semlens/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "semlens/util.hpp"

namespace semlens {

const char* to_string(DependenceKind k) {
  return k == DependenceKind::Control ? "control" : "data";
}

std::vector<double> HashEmbedder::embed(const std::string& text) {
  std::vector<double> v(dims_, 0.0);
  for (const auto& tok : word_tokens(text)) {
    // FNV-1a over the token selects a dimension.
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : tok) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
    v[h % dims_] += 1.0;
  }
  return v;
}

double token_f1(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::map<std::string, int> ca, cb;
  for (const auto& t : a) ++ca[t];
  for (const auto& t : b) ++cb[t];
  long overlap = 0;
  for (const auto& [tok, n] : ca) {
    auto it = cb.find(tok);
    if (it != cb.end()) overlap += std::min(n, it->second);
  }
  return 2.0 * static_cast<double>(overlap) /
         static_cast<double>(a.size() + b.size());
}

namespace {

double cosine01(const std::vector<double>& x, const std::vector<double>& y) {
  double dot = 0, nx = 0, ny = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    dot += x[i] * y[i];
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  if (nx == 0 || ny == 0) return 0.0;
  double cos = dot / (std::sqrt(nx) * std::sqrt(ny));
  return std::clamp((cos + 1.0) / 2.0, 0.0, 1.0);
}

}  // namespace

SimilarityScore summary_similarity(const std::string& a, const std::string& b,
                                   Embedder* embedder) {
  SimilarityScore s;
  s.exact = a == b;
  s.lexical = token_f1(word_tokens(a), word_tokens(b));
  if (s.exact) s.lexical = 1.0;
  if (embedder) {
    try {
      s.semantic = cosine01(embedder->embed(a), embedder->embed(b));
    } catch (const std::exception&) {
      // Embedding unavailable: lexical still returned.
    }
  }
  return s;
}

SimilarityScore name_similarity(const std::string& a, const std::string& b) {
  SimilarityScore s;
  s.exact = a == b;
  s.lexical = s.exact ? 1.0 : token_f1(sub_tokens(a), sub_tokens(b));
  return s;
}

// ---- Literal parsing for output equality ----

namespace {

struct Lit;
using LitList = std::vector<Lit>;

struct Lit {
  enum class Kind { Number, Bool, Str, List, Null } kind = Kind::Null;
  double num = 0;
  bool b = false;
  std::string str;
  LitList items;
};

std::optional<Lit> parse_literal(std::string_view text);

std::vector<std::string_view> split_top_level(std::string_view inner) {
  std::vector<std::string_view> parts;
  int depth = 0;
  bool in_str = false;
  char quote = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= inner.size(); ++i) {
    if (i < inner.size() && in_str) {
      if (inner[i] == '\\') ++i;
      else if (inner[i] == quote) in_str = false;
      continue;
    }
    if (i == inner.size() || (depth == 0 && inner[i] == ',')) {
      parts.push_back(inner.substr(start, i - start));
      start = i + 1;
      continue;
    }
    char c = inner[i];
    if (c == '"' || c == '\'') {
      in_str = true;
      quote = c;
    } else if (c == '(' || c == '[' || c == '{') {
      ++depth;
    } else if (c == ')' || c == ']' || c == '}') {
      --depth;
    }
  }
  return parts;
}

std::optional<Lit> parse_list_body(std::string_view inner) {
  Lit lit;
  lit.kind = Lit::Kind::List;
  std::string trimmed = trim(inner);
  if (trimmed.empty()) return lit;
  for (auto part : split_top_level(inner)) {
    auto item = parse_literal(part);
    if (!item) return std::nullopt;
    lit.items.push_back(std::move(*item));
  }
  return lit;
}

std::optional<Lit> parse_literal(std::string_view text) {
  std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  std::string lower = to_lower(t);
  Lit lit;
  if (lower == "true" || lower == "false") {
    lit.kind = Lit::Kind::Bool;
    lit.b = lower == "true";
    return lit;
  }
  if (lower == "none" || lower == "null") return lit;  // Null
  if ((t.front() == '"' && t.back() == '"' && t.size() >= 2) ||
      (t.front() == '\'' && t.back() == '\'' && t.size() >= 2)) {
    lit.kind = Lit::Kind::Str;
    lit.str = t.substr(1, t.size() - 2);
    return lit;
  }
  if (t.front() == '[' && t.back() == ']')
    return parse_list_body(std::string_view(t).substr(1, t.size() - 2));
  if (t.front() == '(' && t.back() == ')')
    return parse_list_body(std::string_view(t).substr(1, t.size() - 2));
  // Java-style list constructors.
  for (std::string_view wrapper : {"Arrays.asList", "List.of", "new ArrayList<>"}) {
    if (t.size() > wrapper.size() + 1 && t.rfind(wrapper, 0) == 0) {
      std::string_view rest = std::string_view(t).substr(wrapper.size());
      if (rest.front() == '(' && rest.back() == ')')
        return parse_list_body(rest.substr(1, rest.size() - 2));
    }
  }
  // Number (full-string).
  try {
    std::size_t used = 0;
    std::string numeric = t;
    if (!numeric.empty() && (numeric.back() == 'L' || numeric.back() == 'l' ||
                             numeric.back() == 'f' || numeric.back() == 'd'))
      numeric.pop_back();
    double v = std::stod(numeric, &used);
    if (used == numeric.size()) {
      lit.kind = Lit::Kind::Number;
      lit.num = v;
      return lit;
    }
  } catch (...) {
  }
  return std::nullopt;
}

bool lit_equal(const Lit& a, const Lit& b) {
  if (a.kind != b.kind) {
    // Numeric booleans (True vs 1) stay unequal; no cross-kind equality.
    return false;
  }
  switch (a.kind) {
    case Lit::Kind::Number: return std::abs(a.num - b.num) <= 1e-6;
    case Lit::Kind::Bool: return a.b == b.b;
    case Lit::Kind::Str: return a.str == b.str;
    case Lit::Kind::Null: return true;
    case Lit::Kind::List: {
      if (a.items.size() != b.items.size()) return false;
      for (std::size_t i = 0; i < a.items.size(); ++i)
        if (!lit_equal(a.items[i], b.items[i])) return false;
      return true;
    }
  }
  return false;
}

std::string normalize_ws(const std::string& s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

}  // namespace

bool output_equality(const std::string& a, const std::string& b, Language language) {
  (void)language;  // both conventions accepted for booleans/null
  auto la = parse_literal(a);
  auto lb = parse_literal(b);
  if (la && lb) return lit_equal(*la, *lb);
  return normalize_ws(a) == normalize_ws(b);
}

// ---- Robustness / Sensitivity ----

namespace {

// Per-pair similarity in [0, 1] for the given task; failures score 0.
double pair_similarity(const PayloadPair& p, Task task, Language language,
                       Embedder* embedder) {
  const auto& [a, b] = p;
  if (!a.ok || !b.ok) return 0.0;
  switch (task) {
    case Task::Summarize: {
      SimilarityScore s = summary_similarity(a.text, b.text, embedder);
      return s.semantic ? *s.semantic : s.lexical;
    }
    case Task::MethodName:
      return a.text == b.text ? 1.0 : 0.0;
    case Task::OutputPredict:
      return output_equality(a.text, b.text, language) ? 1.0 : 0.0;
    default:
      throw MetricError("robustness/sensitivity apply to understanding tasks only");
  }
}

}  // namespace

double robustness(const std::vector<PayloadPair>& pairs, Task task, Language language,
                  Embedder* embedder) {
  if (pairs.empty()) throw MetricError("robustness over empty input");
  double sum = 0;
  for (const auto& p : pairs) sum += pair_similarity(p, task, language, embedder);
  return sum / static_cast<double>(pairs.size());
}

double sensitivity(const std::vector<PayloadPair>& pairs, Task task, Language language,
                   Embedder* embedder) {
  if (pairs.empty()) throw MetricError("sensitivity over empty input");
  double sum = 0;
  for (const auto& p : pairs) sum += 1.0 - pair_similarity(p, task, language, embedder);
  return sum / static_cast<double>(pairs.size());
}

DependenceScores dependence_scores(const PairSet& predicted,
                                   const DependenceGraph& truth, DependenceKind kind) {
  const PairSet& truth_pairs =
      kind == DependenceKind::Control ? truth.control_pairs : truth.data_pairs;
  DependenceScores s;
  long hits = 0;
  for (const auto& p : predicted)
    if (truth_pairs.count(p)) ++hits;
  if (predicted.empty()) {
    s.empty_prediction = true;
    s.precision = 0.0;
  } else {
    s.precision = static_cast<double>(hits) / static_cast<double>(predicted.size());
  }
  if (truth_pairs.empty()) {
    s.empty_truth = true;
    s.recall = 0.0;
  } else {
    s.recall = static_cast<double>(hits) / static_cast<double>(truth_pairs.size());
  }
  s.f1 = (s.precision * s.recall == 0.0)
             ? 0.0
             : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

// ---- Report rows ----

MetricRow score_pairs(const std::string& model_id, Language language, Task task,
                      const std::string& operator_id, SemanticClass semantic_class,
                      const std::string& stratum, const std::vector<PayloadPair>& pairs,
                      Embedder* embedder) {
  MetricRow row;
  row.model_id = model_id;
  row.language = to_string(language);
  row.task = to_string(task);
  row.operator_id = operator_id;
  row.semantic_class = to_string(semantic_class);
  row.stratum = stratum;
  row.n = static_cast<long>(pairs.size());
  if (pairs.empty()) return row;

  long failures = 0;
  for (const auto& [a, b] : pairs)
    if (!a.ok || !b.ok) ++failures;
  row.parse_failure_rate = static_cast<double>(failures) / static_cast<double>(pairs.size());

  double sim = robustness(pairs, task, language, embedder);
  if (semantic_class == SemanticClass::SP) row.robustness = sim;
  else row.sensitivity = 1.0 - sim;

  // Breakdown measures.
  if (task == Task::Summarize) {
    double lex = 0;
    double sem = 0;
    bool have_sem = embedder != nullptr;
    for (const auto& [a, b] : pairs) {
      if (!a.ok || !b.ok) continue;  // contributes 0 below
      SimilarityScore s = summary_similarity(a.text, b.text, embedder);
      lex += s.lexical;
      if (s.semantic) sem += *s.semantic;
      else have_sem = false;
    }
    row.lexical = lex / static_cast<double>(pairs.size());
    if (have_sem) row.semantic = sem / static_cast<double>(pairs.size());
  } else if (task == Task::MethodName) {
    double exact = 0, f1 = 0;
    for (const auto& [a, b] : pairs) {
      if (!a.ok || !b.ok) continue;
      SimilarityScore s = name_similarity(a.text, b.text);
      exact += s.exact ? 1.0 : 0.0;
      f1 += s.lexical;
    }
    row.exact_rate = exact / static_cast<double>(pairs.size());
    row.f1 = f1 / static_cast<double>(pairs.size());
  } else if (task == Task::OutputPredict) {
    double eq = 0;
    for (const auto& [a, b] : pairs) {
      if (!a.ok || !b.ok) continue;
      eq += output_equality(a.text, b.text, language) ? 1.0 : 0.0;
    }
    row.exact_rate = eq / static_cast<double>(pairs.size());
  }
  return row;
}

std::vector<MetricRow> aggregate_over_operators(const std::vector<MetricRow>& rows) {
  std::map<std::tuple<std::string, std::string, std::string, std::string, std::string>,
           std::vector<const MetricRow*>>
      groups;
  for (const auto& r : rows)
    groups[{r.model_id, r.language, r.task, r.semantic_class, r.stratum}].push_back(&r);

  std::vector<MetricRow> out;
  for (const auto& [key, members] : groups) {
    MetricRow agg;
    agg.model_id = std::get<0>(key);
    agg.language = std::get<1>(key);
    agg.task = std::get<2>(key);
    agg.semantic_class = std::get<3>(key);
    agg.stratum = std::get<4>(key);
    agg.operator_id = "ALL";

    bool has_rob = false, has_sen = false;
    for (const auto* m : members) {
      if (m->robustness) has_rob = true;
      if (m->sensitivity) has_sen = true;
    }
    if (has_rob && has_sen)
      throw MetricError("group mixes SP and SNP rows: " + agg.model_id + "/" +
                        agg.task);

    auto mean_of = [&](auto getter) -> std::optional<double> {
      double sum = 0;
      long cnt = 0;
      for (const auto* m : members) {
        auto v = getter(*m);
        if (v) {
          sum += *v;
          ++cnt;
        }
      }
      if (cnt == 0) return std::nullopt;
      return sum / static_cast<double>(cnt);
    };
    agg.robustness = mean_of([](const MetricRow& r) { return r.robustness; });
    agg.sensitivity = mean_of([](const MetricRow& r) { return r.sensitivity; });
    agg.exact_rate = mean_of([](const MetricRow& r) { return r.exact_rate; });
    agg.f1 = mean_of([](const MetricRow& r) { return r.f1; });
    agg.semantic = mean_of([](const MetricRow& r) { return r.semantic; });
    agg.lexical = mean_of([](const MetricRow& r) { return r.lexical; });
    double pf = 0;
    for (const auto* m : members) {
      agg.n += m->n;
      pf += m->parse_failure_rate;
    }
    agg.parse_failure_rate = members.empty() ? 0.0 : pf / static_cast<double>(members.size());
    out.push_back(std::move(agg));
  }
  std::sort(out.begin(), out.end(), [](const MetricRow& a, const MetricRow& b) {
    return std::tie(a.model_id, a.language, a.task, a.semantic_class, a.stratum) <
           std::tie(b.model_id, b.language, b.task, b.semantic_class, b.stratum);
  });
  return out;
}

}  // namespace semlens
