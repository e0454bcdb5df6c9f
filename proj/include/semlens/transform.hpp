// The eight semantic-aware transformation operators, organized by semantic
// class (SP preserves behavior, SNP changes it) and by the dependence axis
// they exercise (control vs data).
//
// Operators are span rewrites over the original source bytes: each Applied
// outcome carries the edited source, a minimal edit log, and (for parameter
// reordering) consistently rewritten test call sites. Every Applied outcome
// is re-parsed before it is returned; a transformation that fails to re-parse
// is reported NotApplicable rather than escaping as a broken Applied result.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "semlens/code_model.hpp"

namespace semlens {

enum class SemanticClass { SP, SNP };
enum class DependenceAxis { Control, Data };

const char* to_string(SemanticClass c);
const char* to_string(DependenceAxis a);

struct TransformOperator {
  std::string id;
  SemanticClass semantic_class;
  DependenceAxis dependence_axis;
  std::string description;
};

enum class ApplyStatus { Applied, NotApplicable };

struct SpanEdit {
  Span span;           // range in the original source
  std::string before;  // original bytes
  std::string after;   // replacement bytes
};

struct TransformOutcome {
  std::string operator_id;
  ApplyStatus status = ApplyStatus::NotApplicable;
  std::string transformed_source;  // set when Applied
  std::vector<SpanEdit> edit_log;  // ascending, non-overlapping
  std::uint64_t seed = 0;
  // Present when the operator had to rewrite test call sites (reorder_params).
  std::optional<std::vector<TestCase>> transformed_tests;
  std::string note;  // diagnostic, e.g. why NotApplicable
};

class UnknownOperator : public std::runtime_error {
 public:
  explicit UnknownOperator(const std::string& id)
      : std::runtime_error("unknown operator: " + id) {}
};

// Fixed registry: 4 SP + 4 SNP, two of each class per dependence axis.
const std::vector<TransformOperator>& list_operators();
const TransformOperator* find_operator(const std::string& id);

struct TransformOptions {
  // When false (default), the first qualifying site in statement order is
  // transformed and `seed` is only recorded; when true, the seed selects
  // among qualifying sites.
  bool randomized = false;
};

TransformOutcome apply(const FunctionUnit& unit, const std::string& operator_id,
                       std::uint64_t seed, const TransformOptions& opts = {});
std::vector<TransformOutcome> apply_all(const FunctionUnit& unit, std::uint64_t seed,
                                        const TransformOptions& opts = {});

// Applies non-overlapping edits to source text.
std::string apply_edits(const std::string& source, std::vector<SpanEdit> edits);

// One JSON object per outcome; `unit_id` keys the owning function.
std::string outcome_to_json(const std::string& unit_id, const TransformOutcome& o);
std::pair<std::string, TransformOutcome> outcome_from_json(const std::string& line);

}  // namespace semlens
