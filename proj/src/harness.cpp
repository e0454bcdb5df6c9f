#include "semlens/harness.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "semlens/util.hpp"

namespace semlens {

using json = nlohmann::json;

const char* to_string(Task t) {
  switch (t) {
    case Task::Summarize: return "summarize";
    case Task::MethodName: return "method_name";
    case Task::OutputPredict: return "output_predict";
    case Task::ControlDeps: return "control_deps";
    case Task::DataDeps: return "data_deps";
  }
  return "?";
}

std::optional<Task> task_from_string(const std::string& s) {
  std::string l = to_lower(s);
  if (l == "summarize" || l == "summary") return Task::Summarize;
  if (l == "method_name" || l == "name") return Task::MethodName;
  if (l == "output_predict" || l == "output") return Task::OutputPredict;
  if (l == "control_deps" || l == "control") return Task::ControlDeps;
  if (l == "data_deps" || l == "data") return Task::DataDeps;
  return std::nullopt;
}

std::vector<Task> understanding_tasks() {
  return {Task::Summarize, Task::MethodName, Task::OutputPredict};
}

PromptTemplates PromptTemplates::defaults() {
  PromptTemplates t;
  t.base = "Given the following code snippet\n{code}\n. {task}";
  t.task_descriptions = {
      {"summarize", "Please summarize the given code snippet"},
      {"method_name", "Please generate the method name for the given code snippet"},
      {"output_predict", "Please complete the following test case: {test}"},
      {"control_deps",
       "Please list all the pairs of code statements in the given code snippet "
       "that have a control dependence relationship"},
      {"data_deps",
       "Please list all the pairs of code statements in the given code snippet "
       "that have a data dependence relationship"},
  };
  t.pair_format_instruction =
      ". Number the executable statements 1..n in order of appearance and "
      "answer with one pair per line as (i, j)";
  return t;
}

PromptTemplates PromptTemplates::load_file(const std::string& path) {
  PromptTemplates t = defaults();
  json j = json::parse(read_file(path));
  if (j.contains("base")) t.base = j["base"].get<std::string>();
  if (j.contains("task_descriptions"))
    for (const auto& [k, v] : j["task_descriptions"].items())
      t.task_descriptions[k] = v.get<std::string>();
  if (j.contains("pair_format_instruction"))
    t.pair_format_instruction = j["pair_format_instruction"].get<std::string>();
  return t;
}

namespace {

std::string replace_all(std::string text, const std::string& slot,
                        const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(slot, pos)) != std::string::npos) {
    text.replace(pos, slot.size(), value);
    pos += value.size();
  }
  return text;
}

}  // namespace

TaskPrompt render_prompt(Task task, const std::string& code,
                         const std::optional<TestCase>& test,
                         const PromptTemplates& templates) {
  TaskPrompt p;
  p.task = task;
  p.code = code;
  p.test = test;
  std::string desc = templates.task_descriptions.at(to_string(task));
  if (task == Task::OutputPredict) {
    if (!test) throw MissingTest();
    std::string stub = "assert " + test->expression + " == <FILL>";
    desc = replace_all(desc, "{test}", stub);
  }
  if (task == Task::ControlDeps || task == Task::DataDeps)
    desc += templates.pair_format_instruction;
  std::string rendered = replace_all(templates.base, "{code}", code);
  rendered = replace_all(rendered, "{task}", desc);
  p.rendered = std::move(rendered);
  return p;
}

// ---- Response parsing ----

namespace {

std::string strip_code_fences(const std::string& raw) {
  std::string out;
  for (const auto& line : split_lines(raw)) {
    if (trim(line).rfind("```", 0) == 0) continue;
    out += line;
    out += '\n';
  }
  if (!out.empty()) out.pop_back();
  return out;
}

const std::unordered_set<std::string>& name_stopwords() {
  static const std::unordered_set<std::string> words = {
      "the",  "method",  "name",    "should", "be",     "a",     "an",
      "for",  "of",      "this",    "given",  "code",   "snippet", "would",
      "could", "will",   "i",       "it",     "is",     "to",    "based",
      "function", "suggest", "suggested", "predicted", "appropriate", "suitable"};
  return words;
}

}  // namespace

ParsedPayload parse_response(Task task, const std::string& raw_response) {
  ParsedPayload p;
  std::string text = strip_code_fences(raw_response);

  switch (task) {
    case Task::Summarize: {
      p.text = trim(text);
      p.ok = !p.text.empty();
      if (!p.ok) p.error = "empty summary";
      return p;
    }
    case Task::MethodName: {
      // Prefer a backtick-quoted identifier.
      std::size_t tick = raw_response.find('`');
      while (tick != std::string::npos) {
        std::size_t end = raw_response.find('`', tick + 1);
        if (end == std::string::npos) break;
        std::string inner = trim(raw_response.substr(tick + 1, end - tick - 1));
        // Allow a trailing call notation like `isSymmetric()`.
        if (inner.size() > 2 && inner.ends_with("()")) inner = inner.substr(0, inner.size() - 2);
        if (is_identifier(inner)) {
          p.text = inner;
          p.ok = true;
          return p;
        }
        tick = raw_response.find('`', end + 1);
      }
      // First identifier-like token that is not a filler word.
      std::string first_token;
      std::string cur;
      auto consider = [&](const std::string& tok) {
        if (tok.empty()) return false;
        if (first_token.empty()) first_token = tok;
        if (name_stopwords().count(to_lower(tok))) return false;
        p.text = tok;
        p.ok = true;
        return true;
      };
      for (char c : text) {
        if (is_ident_char(c)) {
          cur += c;
        } else {
          if (!cur.empty() && is_ident_start(cur[0]) && consider(cur)) return p;
          cur.clear();
        }
      }
      if (!cur.empty() && is_ident_start(cur[0]) && consider(cur)) return p;
      if (!first_token.empty()) {
        p.text = first_token;
        p.ok = true;
        return p;
      }
      p.error = "no identifier in response";
      return p;
    }
    case Task::OutputPredict: {
      // Prefer the text after the last '==' on an assert-bearing line.
      std::string chosen;
      bool found = false;
      for (const auto& line : split_lines(text)) {
        std::size_t eq = line.rfind("==");
        if (eq == std::string::npos) continue;
        if (!found || line.find("assert") != std::string::npos) {
          chosen = trim(line.substr(eq + 2));
          found = true;
          if (line.find("assert") != std::string::npos) break;
        }
      }
      if (!found) chosen = trim(text);
      while (!chosen.empty() && (chosen.back() == '.' || chosen.back() == '`')) {
        chosen.pop_back();
        chosen = trim(chosen);
      }
      while (!chosen.empty() && chosen.front() == '`') {
        chosen.erase(chosen.begin());
        chosen = trim(chosen);
      }
      p.text = chosen;
      p.ok = !chosen.empty() && chosen.find("<FILL>") == std::string::npos;
      if (!p.ok) p.error = "no output literal in response";
      return p;
    }
    case Task::ControlDeps:
    case Task::DataDeps: {
      // All (int, int) pairs, deduplicated.
      const std::string& s = raw_response;
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '(') continue;
        std::size_t j = i + 1;
        auto skip_ws = [&] {
          while (j < s.size() && (s[j] == ' ' || s[j] == '\t')) ++j;
        };
        skip_ws();
        std::size_t a_start = j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == a_start) continue;
        std::size_t a_end = j;
        skip_ws();
        if (j >= s.size() || s[j] != ',') continue;
        ++j;
        skip_ws();
        std::size_t b_start = j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        if (j == b_start) continue;
        std::size_t b_end = j;
        skip_ws();
        if (j >= s.size() || s[j] != ')') continue;
        try {
          int a = std::stoi(s.substr(a_start, a_end - a_start));
          int b = std::stoi(s.substr(b_start, b_end - b_start));
          p.pairs.insert({a, b});
        } catch (...) {
        }
        i = j;
      }
      p.ok = true;  // an empty pair list is a valid (degenerate) prediction
      return p;
    }
  }
  p.error = "unknown task";
  return p;
}

// ---- Providers ----

std::string EchoProvider::complete(const CompletionRequest& req) {
  switch (req.task) {
    case Task::Summarize:
      return "Deterministic summary of unit " + req.unit_id + ".";
    case Task::MethodName: {
      std::string name = "fn";
      for (char c : req.unit_id) name += is_ident_char(c) ? c : '_';
      return "`" + name + "`";
    }
    case Task::OutputPredict:
      return "0";
    case Task::ControlDeps:
    case Task::DataDeps:
      return "(1, 2)";
  }
  return "";
}

std::string OracleProvider::complete(const CompletionRequest& req) {
  if (req.task != Task::ControlDeps && req.task != Task::DataDeps)
    return echo_.complete(req);
  auto it = truths_.find(req.unit_id);
  if (it == truths_.end()) return "";
  const PairSet& pairs =
      req.task == Task::ControlDeps ? it->second.control_pairs : it->second.data_pairs;
  std::string out;
  for (const auto& [a, b] : pairs)
    out += "(" + std::to_string(a) + ", " + std::to_string(b) + ")\n";
  return out;
}

ReplayProvider::ReplayProvider(const std::string& exchanges_jsonl_path) {
  std::ifstream in(exchanges_jsonl_path);
  if (!in) throw ConfigError("cannot open replay file: " + exchanges_jsonl_path);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ModelExchange e = exchange_from_json(line);
    responses_[e.cache_key] = e.raw_response;
  }
}

std::string ReplayProvider::complete(const CompletionRequest& req) {
  std::string key = cache_key(req.model_id, req.prompt, req.temperature);
  auto it = responses_.find(key);
  if (it == responses_.end())
    throw ProviderError("replay miss for unit " + req.unit_id + " task " +
                        to_string(req.task));
  return it->second;
}

void HttpProvider::throttle() {
  if (config_.rate_limit_rps <= 0.0) return;
  auto interval = std::chrono::duration<double>(1.0 / config_.rate_limit_rps);
  std::lock_guard<std::mutex> lk(throttle_mu_);
  auto now = std::chrono::steady_clock::now();
  auto earliest = last_request_ + std::chrono::duration_cast<
                                      std::chrono::steady_clock::duration>(interval);
  if (last_request_.time_since_epoch().count() != 0 && now < earliest) {
    std::this_thread::sleep_for(earliest - now);
    now = std::chrono::steady_clock::now();
  }
  last_request_ = now;
}

std::string HttpProvider::complete(const CompletionRequest& req) {
  json body;
  body["model"] = req.model_id;
  body["temperature"] = req.temperature;
  body["messages"] = json::array({{{"role", "user"}, {"content", req.prompt}}});

  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (!key || !*key)
      throw AuthError("credential environment variable not set: " + config_.api_key_env);
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0)
      std::this_thread::sleep_for(std::chrono::milliseconds(200 * (1 << (attempt - 1))));
    throttle();
    httplib::Client client(config_.endpoint);
    client.set_read_timeout(config_.timeout_s, 0);
    client.set_connection_timeout(config_.timeout_s, 0);
    auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "connection failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403)
      throw AuthError("provider rejected credentials (status " +
                      std::to_string(res->status) + ")");
    if (res->status == 429 || res->status >= 500) {
      last_error = "status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw ProviderError("provider error status " + std::to_string(res->status) + ": " +
                          res->body);
    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded()) throw ProviderError("malformed provider response body");
    try {
      return parsed.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw ProviderError(std::string("unexpected response shape: ") + e.what());
    }
  }
  throw ProviderError("provider unreachable after retries: " + last_error);
}

// ---- Cache ----

std::string cache_key(const std::string& model_id, const std::string& rendered_prompt,
                      double temperature) {
  return sha256_hex(model_id + "\x1f" + rendered_prompt + "\x1f" +
                    format_metric(temperature));
}

std::string exchange_to_json(const ModelExchange& e) {
  json j;
  j["cache_key"] = e.cache_key;
  j["unit_id"] = e.unit_id;
  j["task"] = to_string(e.task);
  j["variant"] = e.variant;
  j["model_id"] = e.model_id;
  j["temperature"] = e.temperature;
  j["prompt"] = e.prompt;
  j["response"] = e.raw_response;
  return j.dump();
}

ModelExchange exchange_from_json(const std::string& line) {
  json j = json::parse(line);
  ModelExchange e;
  e.cache_key = j.at("cache_key").get<std::string>();
  e.unit_id = j.value("unit_id", "");
  auto t = task_from_string(j.value("task", "summarize"));
  e.task = t.value_or(Task::Summarize);
  e.variant = j.value("variant", "");
  e.model_id = j.value("model_id", "");
  e.temperature = j.value("temperature", 0.0);
  e.prompt = j.value("prompt", "");
  e.raw_response = j.value("response", "");
  e.parsed = parse_response(e.task, e.raw_response);
  return e;
}

ExchangeCache::ExchangeCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      ModelExchange e = exchange_from_json(line);
      entries_[e.cache_key] = std::move(e);
    } catch (const std::exception& e) {
      throw ConfigError("cache corruption at " + path_ + ":" + std::to_string(line_no) +
                        ": " + e.what());
    }
  }
}

std::optional<ModelExchange> ExchangeCache::lookup(const std::string& key) const {
  std::lock_guard<std::mutex> lk(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ExchangeCache::put(const ModelExchange& e) {
  std::lock_guard<std::mutex> lk(mu_);
  if (entries_.count(e.cache_key)) return;
  entries_[e.cache_key] = e;
  std::filesystem::path p(path_);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  out << exchange_to_json(e) << "\n";
}

std::size_t ExchangeCache::size() const {
  std::lock_guard<std::mutex> lk(mu_);
  return entries_.size();
}

ModelExchange QueryEngine::query(const CompletionRequest& req) {
  std::string key = cache_key(req.model_id, req.prompt, req.temperature);
  if (cache_) {
    if (auto hit = cache_->lookup(key)) return *hit;
  }
  std::string response = provider_.complete(req);
  {
    std::lock_guard<std::mutex> lk(mu_);
    ++provider_calls_;
  }
  ModelExchange e;
  e.cache_key = key;
  e.unit_id = req.unit_id;
  e.task = req.task;
  e.variant = req.variant;
  e.model_id = req.model_id;
  e.temperature = req.temperature;
  e.prompt = req.prompt;
  e.raw_response = response;
  e.parsed = parse_response(req.task, response);
  if (cache_) cache_->put(e);
  return e;
}

}  // namespace semlens
