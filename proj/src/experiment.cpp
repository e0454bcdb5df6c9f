#include "semlens/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "semlens/report.hpp"
#include "semlens/util.hpp"

namespace semlens {

using json = nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError("invalid config JSON");
  ExperimentConfig c;
  if (j.contains("corpus")) {
    if (j["corpus"].is_array())
      for (const auto& p : j["corpus"]) c.corpus_paths.push_back(p.get<std::string>());
    else
      c.corpus_paths.push_back(j["corpus"].get<std::string>());
  }
  c.language_filter = j.value("language", "both");
  c.seed = j.value("seed", 0ULL);
  if (j.contains("operators"))
    for (const auto& o : j["operators"]) c.operators.push_back(o.get<std::string>());
  if (j.contains("tasks")) {
    c.tasks.clear();
    for (const auto& t : j["tasks"]) {
      auto task = task_from_string(t.get<std::string>());
      if (!task) throw ConfigError("unknown task: " + t.get<std::string>());
      c.tasks.push_back(*task);
    }
  }
  if (j.contains("models")) {
    c.models.clear();
    for (const auto& m : j["models"]) {
      ModelConfig mc;
      mc.kind = m.value("provider", "echo");
      mc.model_id = m.value("model_id", mc.kind + "-1");
      mc.endpoint = m.value("endpoint", "");
      mc.path = m.value("path", "/v1/chat/completions");
      mc.api_key_env = m.value("api_key_env", "");
      mc.timeout_s = m.value("timeout_s", 60);
      mc.max_retries = m.value("max_retries", 3);
      mc.rate_limit_rps = m.value("rate_limit_rps", 0.0);
      mc.constant_response = m.value("constant_response", "");
      mc.replay_path = m.value("replay_path", "");
      c.models.push_back(std::move(mc));
    }
  }
  c.runs_dir = j.value("runs_dir", "runs");
  c.cache_path = j.value("cache_path", "");
  c.templates_path = j.value("templates_path", "");
  c.embedder = j.value("embedder", "none");
  c.concurrency = j.value("concurrency", 4);
  if (j.contains("oracle")) {
    const auto& o = j["oracle"];
    if (o.contains("python_command")) {
      c.oracle.python_command.clear();
      for (const auto& p : o["python_command"])
        c.oracle.python_command.push_back(p.get<std::string>());
    }
    c.oracle.per_test_timeout_s = o.value("per_test_timeout_s", 5);
    c.oracle.java_step_budget = o.value("java_step_budget", 10'000'000LL);
    c.oracle.java_runtime = o.value("java_runtime", "builtin");
  }
  c.validate_during_run = j.value("validate_during_run", false);
  c.exclude_anomalies = j.value("exclude_anomalies", false);
  c.transitive_control = j.value("transitive_control", false);
  c.pairs_are_lines = j.value("pairs_are_lines", false);
  c.randomized_sites = j.value("randomized_sites", false);
  c.correctness_from_tests = j.value("correctness_from_tests", true);
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  return from_json_text(read_file(path));
}

std::string ExperimentConfig::canonical_json() const {
  json j;
  j["corpus"] = corpus_paths;
  j["language"] = language_filter;
  j["seed"] = seed;
  j["operators"] = operators.empty() ? std::vector<std::string>{"all"} : operators;
  std::vector<std::string> task_names;
  for (Task t : tasks) task_names.push_back(to_string(t));
  j["tasks"] = task_names;
  json models = json::array();
  for (const auto& m : this->models)
    models.push_back({{"provider", m.kind}, {"model_id", m.model_id}});
  j["models"] = models;
  j["embedder"] = embedder;
  j["transitive_control"] = transitive_control;
  j["pairs_are_lines"] = pairs_are_lines;
  j["randomized_sites"] = randomized_sites;
  j["exclude_anomalies"] = exclude_anomalies;
  return j.dump();
}

// ---------------------------------------------------------------------------
// Stage helpers
// ---------------------------------------------------------------------------

std::vector<FunctionUnit> load_units(const ExperimentConfig& config) {
  if (config.corpus_paths.empty()) throw ConfigError("no corpus configured");
  std::vector<FunctionUnit> units;
  for (const auto& path : config.corpus_paths) {
    for (auto& u : load_corpus(path)) units.push_back(std::move(u));
  }
  if (config.language_filter != "both") {
    auto want = language_from_string(config.language_filter);
    if (!want) throw ConfigError("bad language filter: " + config.language_filter);
    std::erase_if(units, [&](const FunctionUnit& u) { return u.language != *want; });
  }
  std::sort(units.begin(), units.end(),
            [](const FunctionUnit& a, const FunctionUnit& b) { return a.id < b.id; });
  return units;
}

std::string corpus_digest(const std::vector<FunctionUnit>& units) {
  std::string all;
  for (const auto& u : units) {
    all += u.id;
    all += '\x1f';
    all += u.source;
    all += '\x1f';
    for (const auto& t : u.tests) {
      all += t.raw;
      all += '\x1e';
    }
  }
  return sha256_hex(all);
}

std::vector<std::string> resolve_operator_ids(const std::vector<std::string>& requested) {
  std::vector<std::string> out;
  if (requested.empty() ||
      (requested.size() == 1 && (requested[0] == "all" || requested[0] == "ALL"))) {
    for (const auto& op : list_operators()) out.push_back(op.id);
    return out;
  }
  for (const auto& id : requested) {
    if (!find_operator(id)) throw UnknownOperator(id);
    out.push_back(id);
  }
  return out;
}

std::unique_ptr<Provider> make_provider(
    const ModelConfig& mc, const std::map<std::string, DependenceGraph>& truths) {
  if (mc.kind == "echo") return std::make_unique<EchoProvider>();
  if (mc.kind == "constant") return std::make_unique<ConstantProvider>(mc.constant_response);
  if (mc.kind == "oracle") return std::make_unique<OracleProvider>(truths);
  if (mc.kind == "replay") return std::make_unique<ReplayProvider>(mc.replay_path);
  if (mc.kind == "http") {
    HttpProviderConfig hc;
    hc.endpoint = mc.endpoint;
    hc.path = mc.path;
    hc.api_key_env = mc.api_key_env;
    hc.timeout_s = mc.timeout_s;
    hc.max_retries = mc.max_retries;
    hc.rate_limit_rps = mc.rate_limit_rps;
    return std::make_unique<HttpProvider>(hc);
  }
  throw ConfigError("unknown provider kind: " + mc.kind);
}

namespace {

struct RunContext {
  explicit RunContext(const ExperimentConfig& c) : config(c) {}
  const ExperimentConfig& config;
  std::vector<FunctionUnit> units;
  std::vector<std::string> operator_ids;
  std::map<std::string, DependenceGraph> truths;
  PromptTemplates templates;
  std::unique_ptr<ExchangeCache> cache;
  std::unique_ptr<Embedder> embedder;
  fs::path run_dir;
  std::string run_id;
  // outcomes[unit_index][operator position in operator_ids]
  std::vector<std::vector<TransformOutcome>> outcomes;
  std::mutex exchanges_mu;
  std::ofstream exchanges_out;
  std::set<std::string> exchange_keys_written;

  void record_exchange(const ModelExchange& e) {
    std::lock_guard<std::mutex> lk(exchanges_mu);
    if (!exchange_keys_written.insert(e.cache_key).second) return;
    exchanges_out << exchange_to_json(e) << "\n";
  }
};

std::string iso_now() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::unique_ptr<RunContext> make_context(const ExperimentConfig& config,
                                         const std::string& rq_tag) {
  auto ctx = std::make_unique<RunContext>(config);
  ctx->units = load_units(config);
  if (ctx->units.empty()) throw ConfigError("corpus is empty after filtering");
  ctx->operator_ids = resolve_operator_ids(config.operators);
  DependenceOptions dep_opts{config.transitive_control};
  for (const auto& u : ctx->units) ctx->truths[u.id] = analyze_dependence(u, dep_opts);
  ctx->templates = config.templates_path.empty()
                       ? PromptTemplates::defaults()
                       : PromptTemplates::load_file(config.templates_path);
  if (config.embedder == "hash") ctx->embedder = std::make_unique<HashEmbedder>();
  else if (config.embedder != "none" && !config.embedder.empty())
    throw ConfigError("unknown embedder: " + config.embedder);

  ctx->run_id = sha256_hex(rq_tag + "\x1f" + config.canonical_json() + "\x1f" +
                           corpus_digest(ctx->units))
                    .substr(0, 16);
  ctx->run_dir = fs::path(config.runs_dir) / ctx->run_id;
  fs::create_directories(ctx->run_dir / "reports");
  fs::create_directories(ctx->run_dir / "transforms");

  std::string cache_path = config.cache_path.empty()
                               ? (fs::path(config.runs_dir) / "cache.jsonl").string()
                               : config.cache_path;
  ctx->cache = std::make_unique<ExchangeCache>(cache_path);
  ctx->exchanges_out.open(ctx->run_dir / "exchanges.jsonl", std::ios::trunc);

  // Transform stage (deterministic, cheap enough to recompute per run).
  TransformOptions topts{config.randomized_sites};
  ctx->outcomes.resize(ctx->units.size());
  for (std::size_t i = 0; i < ctx->units.size(); ++i) {
    for (const auto& op : ctx->operator_ids)
      ctx->outcomes[i].push_back(apply(ctx->units[i], op, config.seed, topts));
  }
  // Persist one JSONL per operator.
  for (std::size_t k = 0; k < ctx->operator_ids.size(); ++k) {
    std::ostringstream body;
    for (std::size_t i = 0; i < ctx->units.size(); ++i)
      body << outcome_to_json(ctx->units[i].id, ctx->outcomes[i][k]) << "\n";
    write_file_atomic(ctx->run_dir / "transforms" / (ctx->operator_ids[k] + ".jsonl"),
                      body.str());
  }
  return ctx;
}

void write_manifest(RunContext& ctx, const std::string& rq_tag,
                    const std::vector<std::string>& report_files) {
  json j;
  j["run_id"] = ctx.run_id;
  j["rq"] = rq_tag;
  j["created"] = iso_now();
  j["config"] = json::parse(ctx.config.canonical_json());
  j["corpus_digest"] = corpus_digest(ctx.units);
  j["n_units"] = ctx.units.size();
  j["operators"] = ctx.operator_ids;
  j["seed"] = ctx.config.seed;
  json artifacts;
  artifacts["exchanges"] = "exchanges.jsonl";
  artifacts["transforms"] = "transforms/";
  artifacts["reports"] = report_files;
  j["artifacts"] = artifacts;
  write_file_atomic(ctx.run_dir / "manifest.json", j.dump(2) + "\n");
}

// One understanding-task exchange per (unit, variant). Returns payloads in
// unit order; entries without an exchange (missing test, not applicable) are
// nullopt.
struct VariantPayloads {
  // payloads[task][unit] -> payload of the exchange
  std::map<Task, std::vector<std::optional<ParsedPayload>>> by_task;
};

VariantPayloads query_variant(RunContext& ctx, QueryEngine& engine,
                              const std::string& model_id,
                              const std::vector<std::optional<std::string>>& sources,
                              const std::vector<const std::vector<TestCase>*>& tests,
                              const std::string& variant) {
  VariantPayloads out;
  std::vector<Task> tasks;
  for (Task t : ctx.config.tasks)
    if (t != Task::ControlDeps && t != Task::DataDeps) tasks.push_back(t);
  for (Task t : tasks)
    out.by_task[t].assign(ctx.units.size(), std::nullopt);

  parallel_for(ctx.units.size(), static_cast<std::size_t>(ctx.config.concurrency),
               [&](std::size_t i) {
                 if (!sources[i]) return;
                 for (Task t : tasks) {
                   std::optional<TestCase> test;
                   if (t == Task::OutputPredict) {
                     if (!tests[i] || tests[i]->empty()) continue;
                     test = tests[i]->front();
                   }
                   TaskPrompt prompt = render_prompt(t, *sources[i], test, ctx.templates);
                   CompletionRequest req;
                   req.unit_id = ctx.units[i].id;
                   req.task = t;
                   req.variant = variant;
                   req.model_id = model_id;
                   req.temperature = 0.0;
                   req.prompt = prompt.rendered;
                   ModelExchange e = engine.query(req);
                   ctx.record_exchange(e);
                   out.by_task.at(t)[i] = e.parsed;
                 }
               });
  return out;
}

// Anomalous (unit, operator) exclusions from validation.
std::set<std::pair<std::string, std::string>> validate_outcomes(RunContext& ctx) {
  std::set<std::pair<std::string, std::string>> anomalies;
  std::vector<std::vector<std::string>> verdict_lines(ctx.units.size());
  std::mutex mu;
  parallel_for(ctx.units.size(), static_cast<std::size_t>(ctx.config.concurrency),
               [&](std::size_t i) {
                 // Per-unit session: the original executes once per unit and
                 // units proceed in parallel.
                 OracleSession session(ctx.config.oracle);
                 for (const auto& outcome : ctx.outcomes[i]) {
                   if (outcome.status != ApplyStatus::Applied) continue;
                   ExecutionVerdict v = session.judge(ctx.units[i], outcome);
                   verdict_lines[i].push_back(verdict_to_json(v));
                   if (v.anomaly) {
                     std::lock_guard<std::mutex> lk(mu);
                     anomalies.insert({v.unit_id, v.operator_id});
                   }
                 }
               });
  json all = json::array();
  for (const auto& lines : verdict_lines)
    for (const auto& l : lines) all.push_back(json::parse(l));
  write_file_atomic(ctx.run_dir / "verdicts.json",
                    json({{"verdicts", all}}).dump(2) + "\n");
  return anomalies;
}

struct StratumFlags {
  std::vector<std::optional<bool>> correct;  // per unit
  bool any = false;
};

StratumFlags compute_strata(RunContext& ctx) {
  StratumFlags flags;
  flags.correct.resize(ctx.units.size());
  OracleSession session(ctx.config.oracle);
  for (std::size_t i = 0; i < ctx.units.size(); ++i) {
    std::optional<bool> flag;
    if (ctx.config.correctness_from_tests && !ctx.units[i].tests.empty())
      flag = session.correctness(ctx.units[i]);
    if (!flag) flag = ctx.units[i].correctness;
    flags.correct[i] = flag;
    if (flag) flags.any = true;
  }
  return flags;
}

RunResult run_understanding(const ExperimentConfig& config, const std::string& rq_tag,
                            bool stratify) {
  auto ctx = make_context(config, rq_tag);
  RunResult result;
  result.run_id = ctx->run_id;
  result.run_dir = ctx->run_dir;

  std::set<std::pair<std::string, std::string>> anomalies;
  if (config.validate_during_run || config.exclude_anomalies)
    anomalies = validate_outcomes(*ctx);
  result.anomalies = static_cast<int>(anomalies.size());

  StratumFlags strata;
  if (stratify) {
    strata = compute_strata(*ctx);
    bool from_records = std::any_of(ctx->units.begin(), ctx->units.end(),
                                    [](const FunctionUnit& u) {
                                      return u.correctness.has_value();
                                    });
    if (!strata.any && !from_records) throw MissingCorrectnessFlags();
  }

  std::vector<MetricRow> rows;
  for (const auto& mc : config.models) {
    auto provider = make_provider(mc, ctx->truths);
    QueryEngine engine(*provider, ctx->cache.get());

    // Original exchanges.
    std::vector<std::optional<std::string>> orig_sources(ctx->units.size());
    std::vector<const std::vector<TestCase>*> orig_tests(ctx->units.size());
    for (std::size_t i = 0; i < ctx->units.size(); ++i) {
      orig_sources[i] = ctx->units[i].source;
      orig_tests[i] = &ctx->units[i].tests;
    }
    VariantPayloads original =
        query_variant(*ctx, engine, mc.model_id, orig_sources, orig_tests, "original");

    // Transformed exchanges, one variant per operator.
    for (std::size_t k = 0; k < ctx->operator_ids.size(); ++k) {
      const std::string& op_id = ctx->operator_ids[k];
      const TransformOperator* op = find_operator(op_id);
      std::vector<std::optional<std::string>> sources(ctx->units.size());
      std::vector<const std::vector<TestCase>*> tests(ctx->units.size());
      for (std::size_t i = 0; i < ctx->units.size(); ++i) {
        const TransformOutcome& o = ctx->outcomes[i][k];
        if (o.status != ApplyStatus::Applied) continue;
        if (config.exclude_anomalies && anomalies.count({ctx->units[i].id, op_id}))
          continue;
        sources[i] = o.transformed_source;
        tests[i] = o.transformed_tests ? &*o.transformed_tests : &ctx->units[i].tests;
      }
      VariantPayloads transformed =
          query_variant(*ctx, engine, mc.model_id, sources, tests, op_id);

      // Pair originals with transformed payloads per task and language.
      for (Task t : ctx->config.tasks) {
        if (t == Task::ControlDeps || t == Task::DataDeps) continue;
        for (Language lang : {Language::Python, Language::Java}) {
          auto collect = [&](auto pred) {
            std::vector<PayloadPair> pairs;
            for (std::size_t i = 0; i < ctx->units.size(); ++i) {
              if (ctx->units[i].language != lang) continue;
              if (!pred(i)) continue;
              const auto& o = original.by_task[t][i];
              const auto& tr = transformed.by_task[t][i];
              if (!o || !tr) continue;
              pairs.emplace_back(*o, *tr);
            }
            return pairs;
          };
          auto add_row = [&](const std::string& stratum, const std::vector<PayloadPair>& pairs) {
            rows.push_back(score_pairs(mc.model_id, lang, t, op_id, op->semantic_class,
                                       stratum, pairs, ctx->embedder.get()));
          };
          auto all_pairs = collect([](std::size_t) { return true; });
          if (!stratify) {
            if (!all_pairs.empty()) add_row("all", all_pairs);
            continue;
          }
          add_row("all", all_pairs);
          add_row("correct", collect([&](std::size_t i) {
                    return strata.correct[i] && *strata.correct[i];
                  }));
          add_row("incorrect", collect([&](std::size_t i) {
                    return strata.correct[i] && !*strata.correct[i];
                  }));
        }
      }
    }
  }

  // Drop rows for languages absent from the corpus entirely.
  std::erase_if(rows, [&](const MetricRow& r) {
    for (const auto& u : ctx->units)
      if (to_string(u.language) == r.language) return false;
    return true;
  });

  result.operator_rows = rows;
  result.summary_rows = aggregate_over_operators(rows);

  std::string tag = rq_tag;
  write_file_atomic(ctx->run_dir / "reports" / (tag + "_operator_rows.csv"),
                    metric_rows_csv(result.operator_rows));
  write_file_atomic(ctx->run_dir / "reports" / (tag + "_operator_rows.json"),
                    metric_rows_json(result.operator_rows));
  write_file_atomic(ctx->run_dir / "reports" / (tag + "_summary.csv"),
                    metric_rows_csv(result.summary_rows));
  write_file_atomic(ctx->run_dir / "reports" / (tag + "_summary.json"),
                    metric_rows_json(result.summary_rows));
  write_manifest(*ctx, tag,
                 {tag + "_operator_rows.csv", tag + "_operator_rows.json",
                  tag + "_summary.csv", tag + "_summary.json"});
  if (result.anomalies > 0) result.exit_code = 2;
  return result;
}

}  // namespace

RunResult run_rq1(const ExperimentConfig& config) {
  return run_understanding(config, "rq1", false);
}

RunResult run_rq2(const ExperimentConfig& config) {
  // Same pipeline as RQ1; the model list supplies the comparison dimension,
  // and a single model degenerates to RQ1 output.
  return run_understanding(config, "rq2", false);
}

RunResult run_rq3(const ExperimentConfig& config) {
  return run_understanding(config, "rq3", true);
}

RunResult run_rq4(const ExperimentConfig& config) {
  auto ctx = make_context(config, "rq4");
  RunResult result;
  result.run_id = ctx->run_id;
  result.run_dir = ctx->run_dir;

  std::vector<DependenceRow> rows;
  std::ostringstream unit_log;
  for (const auto& mc : config.models) {
    auto provider = make_provider(mc, ctx->truths);
    QueryEngine engine(*provider, ctx->cache.get());

    struct Acc {
      double p = 0, r = 0, f = 0;
      long n = 0;
      long empty = 0;
    };
    std::map<std::pair<std::string, std::string>, Acc> acc;  // (language, kind)

    std::vector<std::array<std::optional<DependenceScores>, 2>> per_unit(
        ctx->units.size());
    std::vector<std::array<PairSet, 2>> predicted(ctx->units.size());
    parallel_for(
        ctx->units.size(), static_cast<std::size_t>(config.concurrency),
        [&](std::size_t i) {
          const FunctionUnit& u = ctx->units[i];
          for (int kind_i = 0; kind_i < 2; ++kind_i) {
            Task task = kind_i == 0 ? Task::ControlDeps : Task::DataDeps;
            TaskPrompt prompt = render_prompt(task, u.source, std::nullopt, ctx->templates);
            CompletionRequest req;
            req.unit_id = u.id;
            req.task = task;
            req.variant = "original";
            req.model_id = mc.model_id;
            req.temperature = 0.0;
            req.prompt = prompt.rendered;
            ModelExchange e = engine.query(req);
            ctx->record_exchange(e);
            PairSet pairs = e.parsed.pairs;
            if (config.pairs_are_lines) pairs = map_line_pairs_to_statements(u, pairs);
            predicted[i][kind_i] = pairs;
            DependenceKind kind =
                kind_i == 0 ? DependenceKind::Control : DependenceKind::Data;
            per_unit[i][kind_i] = dependence_scores(pairs, ctx->truths[u.id], kind);
          }
        });

    for (std::size_t i = 0; i < ctx->units.size(); ++i) {
      const FunctionUnit& u = ctx->units[i];
      for (int kind_i = 0; kind_i < 2; ++kind_i) {
        const auto& s = *per_unit[i][kind_i];
        const char* kind = kind_i == 0 ? "control" : "data";
        // Units with no true pairs of this kind carry no signal for the
        // macro average; they are logged per-unit but not scored.
        if (!s.empty_truth) {
          Acc& a = acc[{to_string(u.language), kind}];
          a.p += s.precision;
          a.r += s.recall;
          a.f += s.f1;
          a.empty += s.empty_prediction ? 1 : 0;
          ++a.n;
        }

        json detail;
        detail["model"] = mc.model_id;
        detail["unit_id"] = u.id;
        detail["language"] = to_string(u.language);
        detail["kind"] = kind;
        json pred = json::array();
        for (const auto& [x, y] : predicted[i][kind_i]) pred.push_back({x, y});
        detail["predicted"] = pred;
        const PairSet& truth_pairs = kind_i == 0 ? ctx->truths[u.id].control_pairs
                                                 : ctx->truths[u.id].data_pairs;
        json truth = json::array();
        for (const auto& [x, y] : truth_pairs) truth.push_back({x, y});
        detail["truth"] = truth;
        detail["precision"] = json::parse(format_metric(s.precision));
        detail["recall"] = json::parse(format_metric(s.recall));
        detail["f1"] = json::parse(format_metric(s.f1));
        detail["empty_prediction"] = s.empty_prediction;
        detail["empty_truth"] = s.empty_truth;
        unit_log << detail.dump() << "\n";
      }
    }

    for (const auto& [key, a] : acc) {
      DependenceRow row;
      row.model_id = mc.model_id;
      row.language = key.first;
      row.kind = key.second;
      row.n_units = a.n;
      if (a.n > 0) {
        row.precision = a.p / static_cast<double>(a.n);
        row.recall = a.r / static_cast<double>(a.n);
        row.f1 = a.f / static_cast<double>(a.n);
        row.empty_prediction_rate = static_cast<double>(a.empty) / static_cast<double>(a.n);
      }
      rows.push_back(std::move(row));
    }
  }

  result.dependence_rows = rows;
  write_file_atomic(ctx->run_dir / "reports" / "rq4_dependence.csv",
                    dependence_rows_csv(rows));
  write_file_atomic(ctx->run_dir / "reports" / "rq4_dependence.json",
                    dependence_rows_json(rows));
  write_file_atomic(ctx->run_dir / "reports" / "rq4_units.jsonl", unit_log.str());
  write_manifest(*ctx, "rq4",
                 {"rq4_dependence.csv", "rq4_dependence.json", "rq4_units.jsonl"});
  return result;
}

}  // namespace semlens
