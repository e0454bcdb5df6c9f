// Intraprocedural control- and data-dependence over the statement IR.
//
// Control dependence: (guard, s) for every statement s nested under an
// If/Loop guard, nearest enclosing guard only, with an optional transitive
// closure. Data dependence: reaching-definitions def-use pairs over a
// statement-level CFG, with parameters defined at virtual index 0 and loop
// back edges included.
#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "semlens/code_model.hpp"

namespace semlens {

using StatementPair = std::pair<int, int>;
using PairSet = std::set<StatementPair>;

struct DependenceGraph {
  std::string unit_id;
  PairSet control_pairs;  // (guard_stmt_index, dependent_stmt_index)
  PairSet data_pairs;     // (def_stmt_index, use_stmt_index)
};

struct DependenceOptions {
  bool transitive_control = false;
};

// Statement-level control-flow graph. Node 0 is entry (parameter
// definitions); node statements.size()+1 is exit.
struct Cfg {
  int exit_node = 0;
  std::vector<std::vector<int>> succ;  // indexed by node
};

Cfg build_cfg(const FunctionUnit& unit);

PairSet control_dependence(const FunctionUnit& unit,
                           const DependenceOptions& opts = {});
PairSet data_dependence(const FunctionUnit& unit);
DependenceGraph analyze_dependence(const FunctionUnit& unit,
                                   const DependenceOptions& opts = {});

// JSON object {unit_id, control: [[g,s]...], data: [[d,u]...]} with sorted
// pair lists; one line per unit when writing JSONL.
std::string dependence_to_json(const DependenceGraph& g);
DependenceGraph dependence_from_json(const std::string& json_line);

// 1-based source line of a statement's first byte.
int statement_start_line(const FunctionUnit& unit, int index);
// Statement whose header starts on the given 1-based line, or 0 if none.
int statement_on_line(const FunctionUnit& unit, int line);
// Maps (line, line) pairs reported against the raw source onto statement
// index pairs; pairs touching lines that hold no statement map to (0, 0)
// entries, which score as incorrect predictions.
PairSet map_line_pairs_to_statements(const FunctionUnit& unit, const PairSet& pairs);

}  // namespace semlens
