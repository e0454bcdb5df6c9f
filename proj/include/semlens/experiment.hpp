// End-to-end orchestration: corpus -> transforms -> validation -> model
// queries -> metric tables, persisted under runs/<run_id>/ with an
// audit-trail manifest. Runs are resumable: every exchange is cache-keyed, so
// re-running a configuration replays recorded responses and reproduces the
// reports byte-identically.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "semlens/harness.hpp"
#include "semlens/metrics.hpp"
#include "semlens/oracle.hpp"
#include "semlens/transform.hpp"

namespace semlens {

struct ModelConfig {
  std::string kind = "echo";  // echo | constant | oracle | replay | http
  std::string model_id = "echo-1";
  std::string endpoint;           // http
  std::string path = "/v1/chat/completions";
  std::string api_key_env;        // http
  int timeout_s = 60;             // http
  int max_retries = 3;            // http
  double rate_limit_rps = 0.0;    // http; 0 disables throttling
  std::string constant_response;  // constant
  std::string replay_path;        // replay
};

struct ExperimentConfig {
  std::vector<std::string> corpus_paths;
  std::string language_filter = "both";  // java | python | both
  std::uint64_t seed = 0;
  std::vector<std::string> operators;  // empty = all registered
  std::vector<Task> tasks = understanding_tasks();
  std::vector<ModelConfig> models = {ModelConfig{}};
  std::string runs_dir = "runs";
  std::string cache_path;       // default: <runs_dir>/cache.jsonl
  std::string templates_path;   // prompt template override file
  std::string embedder = "none";  // none | hash
  int concurrency = 4;
  OracleConfig oracle;
  bool validate_during_run = false;  // compute oracle verdicts inside run_rq*
  bool exclude_anomalies = false;    // drop anomalous outcomes from metrics
  bool transitive_control = false;
  bool pairs_are_lines = false;  // map reported line pairs onto statements
  bool randomized_sites = false;
  bool correctness_from_tests = true;  // RQ3: prefer executing originals

  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_file(const std::string& path);
  std::string canonical_json() const;  // deterministic snapshot for run ids
};

struct RunResult {
  std::string run_id;
  std::filesystem::path run_dir;
  std::vector<MetricRow> operator_rows;
  std::vector<MetricRow> summary_rows;
  std::vector<DependenceRow> dependence_rows;
  int anomalies = 0;
  int exit_code = 0;  // 0 ok, 2 partial (anomalies or empty strata)
};

RunResult run_rq1(const ExperimentConfig& config);
RunResult run_rq2(const ExperimentConfig& config);
RunResult run_rq3(const ExperimentConfig& config);
RunResult run_rq4(const ExperimentConfig& config);

class MissingCorrectnessFlags : public std::runtime_error {
 public:
  MissingCorrectnessFlags()
      : std::runtime_error(
            "RQ3 needs correctness flags: none supplied and test execution "
            "unavailable") {}
};

// Provider factory; oracle mocks receive ground-truth dependence graphs.
std::unique_ptr<Provider> make_provider(
    const ModelConfig& mc, const std::map<std::string, DependenceGraph>& truths);

// Stage helpers shared with the CLI.
std::vector<FunctionUnit> load_units(const ExperimentConfig& config);
std::string corpus_digest(const std::vector<FunctionUnit>& units);
std::vector<std::string> resolve_operator_ids(const std::vector<std::string>& requested);

}  // namespace semlens
