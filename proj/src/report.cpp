#include "semlens/report.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "semlens/util.hpp"

namespace semlens {

using json = nlohmann::json;

namespace {

void sort_rows(std::vector<MetricRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) {
    return std::tie(a.model_id, a.language, a.task, a.semantic_class, a.operator_id,
                    a.stratum) < std::tie(b.model_id, b.language, b.task,
                                          b.semantic_class, b.operator_id, b.stratum);
  });
}

void sort_rows(std::vector<DependenceRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const DependenceRow& a, const DependenceRow& b) {
    return std::tie(a.model_id, a.language, a.kind) <
           std::tie(b.model_id, b.language, b.kind);
  });
}

std::string opt_str(const std::optional<double>& v) {
  return v ? format_metric(*v) : "";
}

json opt_json(const std::optional<double>& v) {
  if (!v) return nullptr;
  // Fixed precision keeps JSON byte-stable across platforms.
  return json::parse(format_metric(*v));
}

constexpr const char* kMetricHeader =
    "model,language,task,operator,semantic_class,n,robustness,sensitivity,"
    "exact_rate,f1,semantic,lexical,parse_failure_rate,stratum";

}  // namespace

std::string metric_rows_csv(std::vector<MetricRow> rows) {
  sort_rows(rows);
  std::ostringstream out;
  out << kMetricHeader << "\n";
  for (const auto& r : rows) {
    out << r.model_id << ',' << r.language << ',' << r.task << ',' << r.operator_id
        << ',' << r.semantic_class << ',' << r.n << ',' << opt_str(r.robustness) << ','
        << opt_str(r.sensitivity) << ',' << opt_str(r.exact_rate) << ','
        << opt_str(r.f1) << ',' << opt_str(r.semantic) << ',' << opt_str(r.lexical)
        << ',' << format_metric(r.parse_failure_rate) << ',' << r.stratum << "\n";
  }
  return out.str();
}

std::string metric_rows_json(std::vector<MetricRow> rows) {
  sort_rows(rows);
  json arr = json::array();
  for (const auto& r : rows) {
    json j;
    j["model"] = r.model_id;
    j["language"] = r.language;
    j["task"] = r.task;
    j["operator"] = r.operator_id;
    j["semantic_class"] = r.semantic_class;
    j["n"] = r.n;
    j["robustness"] = opt_json(r.robustness);
    j["sensitivity"] = opt_json(r.sensitivity);
    j["exact_rate"] = opt_json(r.exact_rate);
    j["f1"] = opt_json(r.f1);
    j["semantic"] = opt_json(r.semantic);
    j["lexical"] = opt_json(r.lexical);
    j["parse_failure_rate"] = opt_json(r.parse_failure_rate);
    j["stratum"] = r.stratum;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string metric_rows_markdown(std::vector<MetricRow> rows) {
  sort_rows(rows);
  std::ostringstream out;
  out << "| model | language | task | operator | class | n | robustness | "
         "sensitivity | exact | f1 | semantic | lexical | parse_fail | stratum |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out << "| " << r.model_id << " | " << r.language << " | " << r.task << " | "
        << r.operator_id << " | " << r.semantic_class << " | " << r.n << " | "
        << opt_str(r.robustness) << " | " << opt_str(r.sensitivity) << " | "
        << opt_str(r.exact_rate) << " | " << opt_str(r.f1) << " | "
        << opt_str(r.semantic) << " | " << opt_str(r.lexical) << " | "
        << format_metric(r.parse_failure_rate) << " | " << r.stratum << " |\n";
  }
  return out.str();
}

std::vector<MetricRow> metric_rows_from_json(const std::string& text) {
  json arr = json::parse(text);
  std::vector<MetricRow> rows;
  for (const auto& j : arr) {
    MetricRow r;
    r.model_id = j.at("model").get<std::string>();
    r.language = j.at("language").get<std::string>();
    r.task = j.at("task").get<std::string>();
    r.operator_id = j.at("operator").get<std::string>();
    r.semantic_class = j.at("semantic_class").get<std::string>();
    r.n = j.at("n").get<long>();
    auto opt = [&](const char* k) -> std::optional<double> {
      if (!j.contains(k) || j.at(k).is_null()) return std::nullopt;
      return j.at(k).get<double>();
    };
    r.robustness = opt("robustness");
    r.sensitivity = opt("sensitivity");
    r.exact_rate = opt("exact_rate");
    r.f1 = opt("f1");
    r.semantic = opt("semantic");
    r.lexical = opt("lexical");
    r.parse_failure_rate = opt("parse_failure_rate").value_or(0.0);
    r.stratum = j.value("stratum", "all");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string dependence_rows_csv(std::vector<DependenceRow> rows) {
  sort_rows(rows);
  std::ostringstream out;
  out << "model,language,kind,n_units,precision,recall,f1,empty_prediction_rate\n";
  for (const auto& r : rows) {
    out << r.model_id << ',' << r.language << ',' << r.kind << ',' << r.n_units << ','
        << format_metric(r.precision) << ',' << format_metric(r.recall) << ','
        << format_metric(r.f1) << ',' << format_metric(r.empty_prediction_rate)
        << "\n";
  }
  return out.str();
}

std::string dependence_rows_json(std::vector<DependenceRow> rows) {
  sort_rows(rows);
  json arr = json::array();
  for (const auto& r : rows) {
    json j;
    j["model"] = r.model_id;
    j["language"] = r.language;
    j["kind"] = r.kind;
    j["n_units"] = r.n_units;
    j["precision"] = json::parse(format_metric(r.precision));
    j["recall"] = json::parse(format_metric(r.recall));
    j["f1"] = json::parse(format_metric(r.f1));
    j["empty_prediction_rate"] = json::parse(format_metric(r.empty_prediction_rate));
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string dependence_rows_markdown(std::vector<DependenceRow> rows) {
  sort_rows(rows);
  std::ostringstream out;
  out << "| model | language | kind | n | precision | recall | f1 | empty_pred |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    out << "| " << r.model_id << " | " << r.language << " | " << r.kind << " | "
        << r.n_units << " | " << format_metric(r.precision) << " | "
        << format_metric(r.recall) << " | " << format_metric(r.f1) << " | "
        << format_metric(r.empty_prediction_rate) << " |\n";
  }
  return out.str();
}

std::vector<DependenceRow> dependence_rows_from_json(const std::string& text) {
  json arr = json::parse(text);
  std::vector<DependenceRow> rows;
  for (const auto& j : arr) {
    DependenceRow r;
    r.model_id = j.at("model").get<std::string>();
    r.language = j.at("language").get<std::string>();
    r.kind = j.at("kind").get<std::string>();
    r.n_units = j.at("n_units").get<long>();
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.empty_prediction_rate = j.value("empty_prediction_rate", 0.0);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace semlens
