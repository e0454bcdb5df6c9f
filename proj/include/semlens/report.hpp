// Deterministic CSV/JSON/Markdown emitters for metric tables. Row order and
// float formatting are fixed so replayed runs reproduce reports byte for
// byte.
#pragma once

#include <string>
#include <vector>

#include "semlens/metrics.hpp"

namespace semlens {

// Columns: model, language, task, operator, semantic_class, n, robustness,
// sensitivity, exact_rate, f1, semantic, lexical, parse_failure_rate, stratum.
std::string metric_rows_csv(std::vector<MetricRow> rows);
std::string metric_rows_json(std::vector<MetricRow> rows);
std::string metric_rows_markdown(std::vector<MetricRow> rows);

std::string dependence_rows_csv(std::vector<DependenceRow> rows);
std::string dependence_rows_json(std::vector<DependenceRow> rows);
std::string dependence_rows_markdown(std::vector<DependenceRow> rows);

// Round-trips for the `report` subcommand.
std::vector<MetricRow> metric_rows_from_json(const std::string& text);
std::vector<DependenceRow> dependence_rows_from_json(const std::string& text);

}  // namespace semlens
