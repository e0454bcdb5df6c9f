// Robustness/Sensitivity scoring from paired original/transformed model
// payloads, plus dependence precision/recall/F1.
//
// Summaries score by whitespace/punctuation-normalized token F1 (and by
// embedding cosine when an embedder is configured); method names by exact
// match with sub-token F1 as the secondary measure; predicted outputs by
// language-aware literal equality. Parse failures count as maximally
// different: they lower Robustness and raise Sensitivity, and are reported
// separately as a failure rate.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "semlens/common.hpp"
#include "semlens/depend.hpp"
#include "semlens/harness.hpp"
#include "semlens/transform.hpp"

namespace semlens {

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimilarityScore {
  double lexical = 0.0;
  std::optional<double> semantic;
  bool exact = false;
};

// Optional embedding backend for semantic summary similarity.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<double> embed(const std::string& text) = 0;
};

// Deterministic offline embedder: hashed bag-of-words counts. Stands in for a
// remote embedding endpoint in tests and offline runs.
class HashEmbedder : public Embedder {
 public:
  explicit HashEmbedder(std::size_t dims = 256) : dims_(dims) {}
  std::vector<double> embed(const std::string& text) override;

 private:
  std::size_t dims_;
};

double token_f1(const std::vector<std::string>& a, const std::vector<std::string>& b);

SimilarityScore summary_similarity(const std::string& a, const std::string& b,
                                   Embedder* embedder = nullptr);
SimilarityScore name_similarity(const std::string& a, const std::string& b);
bool output_equality(const std::string& a, const std::string& b, Language language);

using PayloadPair = std::pair<ParsedPayload, ParsedPayload>;  // original, transformed

double robustness(const std::vector<PayloadPair>& pairs, Task task, Language language,
                  Embedder* embedder = nullptr);
double sensitivity(const std::vector<PayloadPair>& pairs, Task task, Language language,
                   Embedder* embedder = nullptr);

struct DependenceScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool empty_prediction = false;  // precision undefined, reported as 0
  bool empty_truth = false;       // recall undefined, reported as 0
};

enum class DependenceKind { Control, Data };
const char* to_string(DependenceKind k);

DependenceScores dependence_scores(const PairSet& predicted,
                                   const DependenceGraph& truth, DependenceKind kind);

// ---- Report rows ----

struct MetricRow {
  std::string model_id;
  std::string language;
  std::string task;
  std::string operator_id;     // operator id or "ALL"
  std::string semantic_class;  // "SP" or "SNP"
  std::string stratum = "all";  // all | correct | incorrect
  long n = 0;
  std::optional<double> robustness;   // SP rows
  std::optional<double> sensitivity;  // SNP rows
  std::optional<double> exact_rate;
  std::optional<double> f1;
  std::optional<double> semantic;
  std::optional<double> lexical;
  double parse_failure_rate = 0.0;
};

// Scores one (model, language, task, operator, stratum) cell from its pairs.
MetricRow score_pairs(const std::string& model_id, Language language, Task task,
                      const std::string& operator_id, SemanticClass semantic_class,
                      const std::string& stratum, const std::vector<PayloadPair>& pairs,
                      Embedder* embedder = nullptr);

// Arithmetic mean over operator rows per (model, language, task, stratum)
// group; throws MetricError when a group mixes SP and SNP rows.
std::vector<MetricRow> aggregate_over_operators(const std::vector<MetricRow>& rows);

struct DependenceRow {
  std::string model_id;
  std::string language;
  std::string kind;  // control | data
  long n_units = 0;
  double precision = 0.0;  // macro averages over units
  double recall = 0.0;
  double f1 = 0.0;
  double empty_prediction_rate = 0.0;
};

}  // namespace semlens
