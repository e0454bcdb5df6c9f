// Prompt rendering, model providers and the exchange cache.
//
// Prompts follow a fixed template ("Given the following code snippet
// {code}. {task}") with per-task descriptions; the embedded code is the raw
// source bytes, never re-formatted. Providers are pluggable: an
// OpenAI-compatible HTTP endpoint, deterministic mocks for offline runs, and
// a replay provider that serves recorded exchanges. Every query goes through
// an append-only JSONL cache keyed by digest(model, prompt, temperature).
#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "semlens/code_model.hpp"
#include "semlens/depend.hpp"

namespace semlens {

enum class Task { Summarize, MethodName, OutputPredict, ControlDeps, DataDeps };

const char* to_string(Task t);
std::optional<Task> task_from_string(const std::string& s);

// The three understanding tasks (dependence probes are queried separately).
std::vector<Task> understanding_tasks();

struct PromptTemplates {
  std::string base;  // contains {code} and {task}
  std::map<std::string, std::string> task_descriptions;  // keyed by task name
  std::string pair_format_instruction;  // appended to dependence probes

  static PromptTemplates defaults();
  static PromptTemplates load_file(const std::string& path);  // JSON, partial override
};

struct TaskPrompt {
  Task task = Task::Summarize;
  std::string code;
  std::optional<TestCase> test;  // OutputPredict only
  std::string rendered;
};

class MissingTest : public std::runtime_error {
 public:
  MissingTest() : std::runtime_error("OutputPredict requires a test case") {}
};

TaskPrompt render_prompt(Task task, const std::string& code,
                         const std::optional<TestCase>& test,
                         const PromptTemplates& templates);

// ---- Response parsing ----

struct ParsedPayload {
  bool ok = false;
  std::string text;   // summary text, method name or output literal
  PairSet pairs;      // dependence tasks
  std::string error;  // set when !ok
};

// Total: never throws on arbitrary text.
ParsedPayload parse_response(Task task, const std::string& raw_response);

// ---- Providers ----

struct CompletionRequest {
  std::string unit_id;
  Task task = Task::Summarize;
  std::string variant;  // "original" or an operator id
  std::string model_id;
  double temperature = 0.0;
  std::string prompt;
};

class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class AuthError : public ProviderError {
 public:
  using ProviderError::ProviderError;
};

class Provider {
 public:
  virtual ~Provider() = default;
  virtual std::string complete(const CompletionRequest& req) = 0;
  virtual std::string name() const = 0;
};

// Fixed responses keyed by (unit, task): identical for original and
// transformed variants, so Robustness is 1 and Sensitivity is 0 end to end.
class EchoProvider : public Provider {
 public:
  std::string complete(const CompletionRequest& req) override;
  std::string name() const override { return "echo"; }
};

// One constant response for everything.
class ConstantProvider : public Provider {
 public:
  explicit ConstantProvider(std::string response) : response_(std::move(response)) {}
  std::string complete(const CompletionRequest&) override { return response_; }
  std::string name() const override { return "constant"; }

 private:
  std::string response_;
};

// Answers dependence probes with the reference analyzer's ground truth;
// everything else echoes. Closes the RQ4 loop for testing.
class OracleProvider : public Provider {
 public:
  explicit OracleProvider(std::map<std::string, DependenceGraph> truths)
      : truths_(std::move(truths)) {}
  std::string complete(const CompletionRequest& req) override;
  std::string name() const override { return "oracle"; }

 private:
  std::map<std::string, DependenceGraph> truths_;
  EchoProvider echo_;
};

// Serves raw responses recorded in an exchanges JSONL, keyed by cache key.
class ReplayProvider : public Provider {
 public:
  explicit ReplayProvider(const std::string& exchanges_jsonl_path);
  std::string complete(const CompletionRequest& req) override;
  std::string name() const override { return "replay"; }

 private:
  std::map<std::string, std::string> responses_;
};

struct HttpProviderConfig {
  std::string endpoint;  // e.g. http://localhost:8089
  std::string path = "/v1/chat/completions";
  std::string api_key_env;  // environment variable holding the credential
  int timeout_s = 60;
  int max_retries = 3;
  double rate_limit_rps = 0.0;  // max requests/second; 0 disables throttling
};

// OpenAI-style chat completion client with retry/backoff on transient errors
// and an optional request-rate cap.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {}
  std::string complete(const CompletionRequest& req) override;
  std::string name() const override { return "http"; }

 private:
  void throttle();
  HttpProviderConfig config_;
  std::mutex throttle_mu_;
  std::chrono::steady_clock::time_point last_request_{};
};

// ---- Exchange cache ----

std::string cache_key(const std::string& model_id, const std::string& rendered_prompt,
                      double temperature);

struct ModelExchange {
  std::string cache_key;
  std::string unit_id;
  Task task = Task::Summarize;
  std::string variant;
  std::string model_id;
  double temperature = 0.0;
  std::string prompt;
  std::string raw_response;
  ParsedPayload parsed;  // recomputed deterministically from raw_response
};

std::string exchange_to_json(const ModelExchange& e);
ModelExchange exchange_from_json(const std::string& line);

// Append-only JSONL cache; safe for concurrent queries.
class ExchangeCache {
 public:
  explicit ExchangeCache(std::string path);
  std::optional<ModelExchange> lookup(const std::string& key) const;
  void put(const ModelExchange& e);
  std::size_t size() const;
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::map<std::string, ModelExchange> entries_;
  mutable std::mutex mu_;
};

// Cache-first query front end; counts provider calls for cache-hit tests.
class QueryEngine {
 public:
  QueryEngine(Provider& provider, ExchangeCache* cache) : provider_(provider), cache_(cache) {}

  ModelExchange query(const CompletionRequest& req);
  long provider_calls() const { return provider_calls_; }

 private:
  Provider& provider_;
  ExchangeCache* cache_;
  std::mutex mu_;
  long provider_calls_ = 0;
};

}  // namespace semlens
