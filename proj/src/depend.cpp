#include "semlens/depend.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

namespace semlens {

using json = nlohmann::json;

namespace {

struct ChildLists {
  std::vector<int> then_kids, else_kids, body_kids;
};

struct Tree {
  std::vector<int> top;                 // top-level statements, source order
  std::vector<ChildLists> kids;         // indexed by statement (1-based slot)
};

Tree build_tree(const FunctionUnit& unit) {
  Tree t;
  t.kids.resize(unit.statements.size() + 1);
  for (const auto& s : unit.statements) {
    if (!s.parent) {
      t.top.push_back(s.index);
      continue;
    }
    auto& k = t.kids[*s.parent];
    switch (s.branch) {
      case Branch::Then: k.then_kids.push_back(s.index); break;
      case Branch::Else: k.else_kids.push_back(s.index); break;
      default: k.body_kids.push_back(s.index); break;
    }
  }
  return t;
}

struct CfgBuilder {
  const FunctionUnit& unit;
  const Tree& tree;
  Cfg cfg;

  void edge(int from, int to) { cfg.succ[from].push_back(to); }

  struct LoopCtx {
    int header = 0;
    int exit = 0;
    bool active = false;
  };

  void build() {
    cfg.exit_node = static_cast<int>(unit.statements.size()) + 1;
    cfg.succ.assign(cfg.exit_node + 1, {});
    if (tree.top.empty()) {
      edge(0, cfg.exit_node);
      return;
    }
    edge(0, tree.top.front());
    build_seq(tree.top, cfg.exit_node, {});
  }

  void build_seq(const std::vector<int>& seq, int after, LoopCtx loop) {
    for (std::size_t k = 0; k < seq.size(); ++k) {
      int next = (k + 1 < seq.size()) ? seq[k + 1] : after;
      build_stmt(seq[k], next, loop);
    }
  }

  void build_stmt(int s, int next, LoopCtx loop) {
    const StatementNode& node = unit.stmt(s);
    if (node.kind == StatementKind::Return) {
      edge(s, cfg.exit_node);
      return;
    }
    if (node.flow == FlowTag::Break) {
      edge(s, loop.active ? loop.exit : cfg.exit_node);
      return;
    }
    if (node.flow == FlowTag::Continue) {
      edge(s, loop.active ? loop.header : cfg.exit_node);
      return;
    }
    const ChildLists& k = tree.kids[s];
    if (node.kind == StatementKind::If) {
      if (!k.then_kids.empty()) {
        edge(s, k.then_kids.front());
        build_seq(k.then_kids, next, loop);
      } else {
        edge(s, next);
      }
      if (!k.else_kids.empty()) {
        edge(s, k.else_kids.front());
        build_seq(k.else_kids, next, loop);
      } else {
        edge(s, next);
      }
      return;
    }
    if (node.kind == StatementKind::Loop) {
      if (!k.body_kids.empty()) {
        edge(s, k.body_kids.front());
        build_seq(k.body_kids, s, LoopCtx{s, next, true});
      }
      edge(s, next);  // loop exit
      return;
    }
    edge(s, next);
  }
};

}  // namespace

Cfg build_cfg(const FunctionUnit& unit) {
  Tree tree = build_tree(unit);
  CfgBuilder b{unit, tree, {}};
  b.build();
  // Deduplicate successor lists (an empty if produces two edges to `next`).
  for (auto& ss : b.cfg.succ) {
    std::sort(ss.begin(), ss.end());
    ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
  }
  return std::move(b.cfg);
}

PairSet control_dependence(const FunctionUnit& unit, const DependenceOptions& opts) {
  PairSet pairs;
  for (const auto& s : unit.statements) {
    if (!s.parent) continue;
    pairs.insert({*s.parent, s.index});
    if (opts.transitive_control) {
      std::optional<int> anc = unit.stmt(*s.parent).parent;
      while (anc) {
        pairs.insert({*anc, s.index});
        anc = unit.stmt(*anc).parent;
      }
    }
  }
  return pairs;
}

PairSet data_dependence(const FunctionUnit& unit) {
  const int n = static_cast<int>(unit.statements.size());
  Cfg cfg = build_cfg(unit);

  // Def sites: (node, var); node 0 defines all parameters.
  struct Site {
    int node;
    std::string var;
    bool weak;
  };
  std::vector<Site> sites;
  for (const auto& p : unit.params) sites.push_back({0, p, false});
  for (const auto& s : unit.statements)
    for (const auto& v : s.defs)
      sites.push_back({s.index, v, s.weak_defs.count(v) > 0});

  const std::size_t m = sites.size();
  std::map<std::string, std::vector<std::size_t>> sites_of_var;
  for (std::size_t i = 0; i < m; ++i) sites_of_var[sites[i].var].push_back(i);

  auto make_bits = [&] { return std::vector<bool>(m, false); };
  std::vector<std::vector<bool>> gen(cfg.exit_node + 1, make_bits());
  std::vector<std::vector<bool>> kill(cfg.exit_node + 1, make_bits());
  for (std::size_t i = 0; i < m; ++i) {
    gen[sites[i].node][i] = true;
    if (!sites[i].weak) {
      for (std::size_t j : sites_of_var[sites[i].var])
        if (j != i) kill[sites[i].node][j] = true;
    }
  }

  std::vector<std::vector<bool>> in(cfg.exit_node + 1, make_bits());
  std::vector<std::vector<bool>> out(cfg.exit_node + 1, make_bits());
  // Predecessors.
  std::vector<std::vector<int>> pred(cfg.exit_node + 1);
  for (int u = 0; u <= cfg.exit_node; ++u)
    for (int v : cfg.succ[u]) pred[v].push_back(u);

  // Definitions in unreachable statements (dead code after a return) must
  // not flow anywhere, so the transfer functions only run on live nodes.
  std::vector<bool> reachable(cfg.exit_node + 1, false);
  std::vector<int> work{0};
  reachable[0] = true;
  while (!work.empty()) {
    int u = work.back();
    work.pop_back();
    for (int v : cfg.succ[u])
      if (!reachable[v]) {
        reachable[v] = true;
        work.push_back(v);
      }
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (int u = 0; u <= cfg.exit_node; ++u) {
      if (!reachable[u]) continue;
      auto new_in = make_bits();
      for (int p : pred[u])
        for (std::size_t i = 0; i < m; ++i)
          if (out[p][i]) new_in[i] = true;
      auto new_out = new_in;
      for (std::size_t i = 0; i < m; ++i) {
        if (kill[u][i]) new_out[i] = false;
      }
      for (std::size_t i = 0; i < m; ++i)
        if (gen[u][i]) new_out[i] = true;
      if (new_in != in[u] || new_out != out[u]) {
        in[u] = std::move(new_in);
        out[u] = std::move(new_out);
        changed = true;
      }
    }
  }

  PairSet pairs;
  for (int u = 1; u <= n; ++u) {
    if (!reachable[u]) continue;
    const auto& uses = unit.stmt(u).uses;
    for (std::size_t i = 0; i < m; ++i)
      if (in[u][i] && uses.count(sites[i].var)) pairs.insert({sites[i].node, u});
  }
  return pairs;
}

DependenceGraph analyze_dependence(const FunctionUnit& unit,
                                   const DependenceOptions& opts) {
  DependenceGraph g;
  g.unit_id = unit.id;
  g.control_pairs = control_dependence(unit, opts);
  g.data_pairs = data_dependence(unit);
  return g;
}

std::string dependence_to_json(const DependenceGraph& g) {
  json j;
  j["unit_id"] = g.unit_id;
  json control = json::array();
  for (const auto& [a, b] : g.control_pairs) control.push_back({a, b});
  json data = json::array();
  for (const auto& [a, b] : g.data_pairs) data.push_back({a, b});
  j["control"] = control;
  j["data"] = data;
  return j.dump();
}

DependenceGraph dependence_from_json(const std::string& json_line) {
  json j = json::parse(json_line);
  DependenceGraph g;
  g.unit_id = j.at("unit_id").get<std::string>();
  for (const auto& p : j.at("control"))
    g.control_pairs.insert({p.at(0).get<int>(), p.at(1).get<int>()});
  for (const auto& p : j.at("data"))
    g.data_pairs.insert({p.at(0).get<int>(), p.at(1).get<int>()});
  return g;
}

int statement_start_line(const FunctionUnit& unit, int index) {
  const auto& s = unit.stmt(index);
  int line = 1;
  for (std::size_t i = 0; i < s.span.begin && i < unit.source.size(); ++i)
    if (unit.source[i] == '\n') ++line;
  return line;
}

int statement_on_line(const FunctionUnit& unit, int line) {
  int found = 0;
  for (const auto& s : unit.statements) {
    if (statement_start_line(unit, s.index) == line) found = s.index;
    // Keep the innermost (last) statement that starts on the line, which
    // matters for inline suites like "if c: return 1".
  }
  return found;
}

PairSet map_line_pairs_to_statements(const FunctionUnit& unit, const PairSet& pairs) {
  PairSet out;
  for (const auto& [a, b] : pairs)
    out.insert({statement_on_line(unit, a), statement_on_line(unit, b)});
  return out;
}

}  // namespace semlens
