// Shared helpers for the test suites: corpus paths and independent
// brute-force oracles. The oracles deliberately avoid the analyzer's code
// paths: control dependence is recomputed from raw span containment, data
// dependence by bounded path enumeration over the CFG.
#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "semlens/code_model.hpp"
#include "semlens/depend.hpp"

namespace semlens::testing {

inline std::string data_dir() { return SEMLENS_DATA_DIR; }
inline std::string python_corpus_path() {
  return std::string(SEMLENS_DATA_DIR) + "/corpus/sample_python.jsonl";
}
inline std::string java_corpus_path() {
  return std::string(SEMLENS_DATA_DIR) + "/corpus/sample_java.jsonl";
}

inline std::vector<FunctionUnit> sample_units(Language lang) {
  return load_corpus(lang == Language::Python ? python_corpus_path()
                                              : java_corpus_path());
}

inline std::vector<FunctionUnit> all_sample_units() {
  auto units = sample_units(Language::Python);
  for (auto& u : sample_units(Language::Java)) units.push_back(std::move(u));
  return units;
}

// Control-dependence oracle: ancestor containment over raw byte spans. The
// nearest guard whose span strictly contains a statement's span is its
// controlling guard.
inline PairSet oracle_control_pairs(const FunctionUnit& unit) {
  PairSet pairs;
  for (const auto& s : unit.statements) {
    const StatementNode* best = nullptr;
    for (const auto& g : unit.statements) {
      if (g.index == s.index) continue;
      if (g.kind != StatementKind::If && g.kind != StatementKind::Loop) continue;
      if (!(g.span.begin <= s.span.begin && s.span.end <= g.span.end)) continue;
      if (g.span == s.span) continue;
      if (!best || (g.span.end - g.span.begin) < (best->span.end - best->span.begin))
        best = &g;
    }
    if (best) pairs.insert({best->index, s.index});
  }
  return pairs;
}

// Data-dependence oracle: enumerate CFG paths from entry, tracking live
// definitions per variable (weak defs accumulate, strong defs replace). Each
// edge may be taken at most `edge_budget` times per path, which covers one
// full loop revisit. Throws if the walk explodes (corpus functions are small).
inline PairSet oracle_data_pairs(const FunctionUnit& unit, int edge_budget = 2) {
  Cfg cfg = build_cfg(unit);
  PairSet pairs;

  using LiveDefs = std::map<std::string, std::set<int>>;
  struct Frame {
    int node;
    LiveDefs live;
    std::map<std::pair<int, int>, int> edge_uses;
  };

  long steps = 0;
  const long step_limit = 4'000'000;

  std::vector<Frame> stack;
  {
    Frame start{0, {}, {}};
    for (const auto& p : unit.params) start.live[p] = {0};
    stack.push_back(std::move(start));
  }
  while (!stack.empty()) {
    if (++steps > step_limit)
      throw std::runtime_error("data oracle path explosion on unit " + unit.id);
    Frame f = std::move(stack.back());
    stack.pop_back();

    if (f.node >= 1 && f.node <= static_cast<int>(unit.statements.size())) {
      const StatementNode& s = unit.stmt(f.node);
      for (const auto& v : s.uses) {
        auto it = f.live.find(v);
        if (it == f.live.end()) continue;
        for (int d : it->second) pairs.insert({d, f.node});
      }
      for (const auto& v : s.defs) {
        if (s.weak_defs.count(v)) f.live[v].insert(f.node);
        else f.live[v] = {f.node};
      }
    }
    for (int succ : cfg.succ[f.node]) {
      auto key = std::make_pair(f.node, succ);
      int used = f.edge_uses.count(key) ? f.edge_uses.at(key) : 0;
      if (used >= edge_budget) continue;
      Frame next = f;
      next.node = succ;
      ++next.edge_uses[key];
      stack.push_back(std::move(next));
    }
  }
  return pairs;
}

}  // namespace semlens::testing
