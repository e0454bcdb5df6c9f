// semlens command line: corpus transformation, oracle validation, dependence
// analysis, model runs (RQ1-RQ4) and report formatting.
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "semlens/experiment.hpp"
#include "semlens/report.hpp"
#include "semlens/util.hpp"

using namespace semlens;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

ExperimentConfig config_from(const std::string& config_path, const std::string& corpus,
                             const std::string& language, std::uint64_t seed,
                             bool have_seed, const std::string& runs_dir,
                             const std::string& tasks, const std::string& provider,
                             const std::string& model_id) {
  ExperimentConfig c = config_path.empty() ? ExperimentConfig{}
                                           : ExperimentConfig::from_file(config_path);
  if (!corpus.empty()) c.corpus_paths = {corpus};
  if (!language.empty()) c.language_filter = language;
  if (have_seed) c.seed = seed;
  if (!runs_dir.empty()) c.runs_dir = runs_dir;
  if (!tasks.empty()) {
    c.tasks.clear();
    std::istringstream ss(tasks);
    std::string name;
    while (std::getline(ss, name, ',')) {
      auto t = task_from_string(trim(name));
      if (!t) throw ConfigError("unknown task: " + name);
      c.tasks.push_back(*t);
    }
  }
  if (!provider.empty()) {
    ModelConfig mc;
    mc.kind = provider;
    mc.model_id = model_id.empty() ? provider + "-1" : model_id;
    c.models = {mc};
  } else if (!model_id.empty()) {
    for (auto& mc : c.models) mc.model_id = model_id;
  }
  return c;
}

int cmd_transform(const std::string& corpus, const std::string& operators,
                  std::uint64_t seed, const std::string& out_dir) {
  auto units = load_corpus(corpus);
  std::vector<std::string> ids;
  {
    std::istringstream ss(operators);
    std::string id;
    while (std::getline(ss, id, ',')) {
      id = trim(id);
      if (!id.empty()) ids.push_back(id);
    }
  }
  auto op_ids = resolve_operator_ids(ids);
  fs::create_directories(out_dir);
  for (const auto& op : op_ids) {
    std::ostringstream body;
    for (const auto& u : units) body << outcome_to_json(u.id, apply(u, op, seed)) << "\n";
    write_file_atomic(fs::path(out_dir) / (op + ".jsonl"), body.str());
  }
  std::cout << "wrote " << op_ids.size() << " operator files for " << units.size()
            << " units to " << out_dir << "\n";
  return 0;
}

int cmd_validate(const std::string& corpus, const std::string& transforms_dir,
                 const std::string& report_path, int timeout_s) {
  auto units = load_corpus(corpus);
  std::map<std::string, const FunctionUnit*> by_id;
  for (const auto& u : units) by_id[u.id] = &u;

  OracleConfig oc;
  oc.per_test_timeout_s = timeout_s;
  OracleSession session(oc);

  long total = 0, equivalent = 0, changed = 0, inconclusive = 0, anomalies = 0;
  std::ostringstream verdict_lines;
  for (const auto& entry : fs::directory_iterator(transforms_dir)) {
    if (entry.path().extension() != ".jsonl") continue;
    std::istringstream in(read_file(entry.path()));
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      auto [unit_id, outcome] = outcome_from_json(line);
      if (outcome.status != ApplyStatus::Applied) continue;
      auto it = by_id.find(unit_id);
      if (it == by_id.end()) continue;
      ExecutionVerdict v = session.judge(*it->second, outcome);
      verdict_lines << verdict_to_json(v) << "\n";
      ++total;
      switch (v.label) {
        case VerdictLabel::Equivalent: ++equivalent; break;
        case VerdictLabel::Changed: ++changed; break;
        case VerdictLabel::Inconclusive: ++inconclusive; break;
      }
      if (v.anomaly) ++anomalies;
    }
  }
  json summary;
  summary["total"] = total;
  summary["equivalent"] = equivalent;
  summary["changed"] = changed;
  summary["inconclusive"] = inconclusive;
  summary["anomalies"] = anomalies;
  json out;
  out["summary"] = summary;
  write_file_atomic(report_path, out.dump(2) + "\n");
  fs::path verdicts = fs::path(report_path).parent_path() / "verdicts.jsonl";
  if (fs::path(report_path).parent_path().empty()) verdicts = "verdicts.jsonl";
  write_file_atomic(verdicts, verdict_lines.str());
  std::cout << "judged " << total << " outcomes: " << equivalent << " equivalent, "
            << changed << " changed, " << inconclusive << " inconclusive, "
            << anomalies << " anomalies\n";
  return anomalies > 0 ? 2 : 0;
}

int cmd_deps(const std::string& corpus, const std::string& out_path, bool transitive) {
  auto units = load_corpus(corpus);
  DependenceOptions opts{transitive};
  std::ostringstream body;
  for (const auto& u : units) body << dependence_to_json(analyze_dependence(u, opts)) << "\n";
  write_file_atomic(out_path, body.str());
  std::cout << "wrote dependence graphs for " << units.size() << " units to "
            << out_path << "\n";
  return 0;
}

int cmd_report(const std::string& run_dir, const std::string& format) {
  fs::path reports = fs::path(run_dir) / "reports";
  if (!fs::exists(reports)) {
    std::cerr << "no reports under " << run_dir << "\n";
    return 1;
  }
  for (const auto& entry : fs::directory_iterator(reports)) {
    if (entry.path().extension() != ".json") continue;
    std::string stem = entry.path().stem().string();
    std::string text = read_file(entry.path());
    std::string out;
    if (stem.find("dependence") != std::string::npos) {
      auto rows = dependence_rows_from_json(text);
      out = format == "md" ? dependence_rows_markdown(rows)
            : format == "csv" ? dependence_rows_csv(rows)
                              : dependence_rows_json(rows);
    } else {
      auto rows = metric_rows_from_json(text);
      out = format == "md" ? metric_rows_markdown(rows)
            : format == "csv" ? metric_rows_csv(rows)
                              : metric_rows_json(rows);
    }
    if (format == "md") {
      fs::path dest = reports / (stem + ".md");
      write_file_atomic(dest, out);
      std::cout << "wrote " << dest.string() << "\n";
    } else {
      std::cout << "== " << stem << " ==\n" << out << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semlens: semantic-transformation probes for code LLMs"};
  app.require_subcommand(1);

  // transform
  auto* t = app.add_subcommand("transform", "apply transformation operators to a corpus");
  std::string t_corpus, t_ops = "all", t_out = "transforms";
  std::uint64_t t_seed = 0;
  t->add_option("--corpus", t_corpus, "corpus JSONL")->required();
  t->add_option("--operators", t_ops, "comma-separated operator ids or 'all'");
  t->add_option("--seed", t_seed, "site-selection seed");
  t->add_option("--out", t_out, "output directory");

  // validate
  auto* v = app.add_subcommand("validate", "judge transform outcomes with the test oracle");
  std::string v_corpus, v_transforms, v_report = "validation.json";
  int v_timeout = 5;
  v->add_option("--corpus", v_corpus, "corpus JSONL")->required();
  v->add_option("--transforms", v_transforms, "directory of outcome JSONL files")->required();
  v->add_option("--report", v_report, "summary JSON path");
  v->add_option("--timeout", v_timeout, "per-test timeout (seconds)");

  // deps
  auto* d = app.add_subcommand("deps", "emit control/data dependence graphs");
  std::string d_corpus, d_out = "deps.jsonl";
  bool d_transitive = false;
  d->add_option("--corpus", d_corpus, "corpus JSONL")->required();
  d->add_option("--out", d_out, "output JSONL");
  d->add_flag("--transitive", d_transitive, "close control dependence transitively");

  // run
  auto* r = app.add_subcommand("run", "run an experiment (RQ1-RQ4)");
  std::string r_rq = "1", r_config, r_corpus, r_language, r_runs_dir;
  std::string r_tasks, r_provider, r_model_id;
  std::uint64_t r_seed = 0;
  bool r_have_seed = false;
  r->add_option("--rq", r_rq, "1|2|3|4|all")->required();
  r->add_option("--config", r_config, "config JSON file");
  r->add_option("--corpus", r_corpus, "corpus JSONL (overrides config)");
  r->add_option("--language", r_language, "java|python|both");
  r->add_option("--seed", r_seed, "transformation seed")->each([&](const std::string&) {
    r_have_seed = true;
  });
  r->add_option("--runs-dir", r_runs_dir, "runs output directory");
  r->add_option("--tasks", r_tasks, "comma-separated task list");
  r->add_option("--provider", r_provider, "echo|constant|oracle|replay|http");
  r->add_option("--model-id", r_model_id, "model identifier for reports/caching");

  // report
  auto* rep = app.add_subcommand("report", "re-emit reports for a finished run");
  std::string rep_run, rep_format = "csv";
  rep->add_option("--run", rep_run, "run directory (runs/<run_id>)")->required();
  rep->add_option("--format", rep_format, "csv|json|md");

  // convert-humaneval
  auto* conv = app.add_subcommand("convert-humaneval",
                                  "convert a HumanEval-format JSONL into a corpus file");
  std::string c_in, c_out;
  conv->add_option("--in", c_in, "HumanEval JSONL")->required();
  conv->add_option("--out", c_out, "output corpus JSONL")->required();

  // operators
  auto* ops = app.add_subcommand("operators", "list the transformation operator registry");

  CLI11_PARSE(app, argc, argv);

  try {
    if (t->parsed()) return cmd_transform(t_corpus, t_ops, t_seed, t_out);
    if (v->parsed()) return cmd_validate(v_corpus, v_transforms, v_report, v_timeout);
    if (d->parsed()) return cmd_deps(d_corpus, d_out, d_transitive);
    if (rep->parsed()) return cmd_report(rep_run, rep_format);
    if (conv->parsed()) {
      int n = convert_humaneval(c_in, c_out);
      std::cout << "converted " << n << " problems to " << c_out << "\n";
      return 0;
    }
    if (ops->parsed()) {
      for (const auto& op : list_operators())
        std::cout << op.id << "\t" << to_string(op.semantic_class) << "\t"
                  << to_string(op.dependence_axis) << "\t" << op.description << "\n";
      return 0;
    }
    if (r->parsed()) {
      ExperimentConfig config =
          config_from(r_config, r_corpus, r_language, r_seed, r_have_seed, r_runs_dir,
                      r_tasks, r_provider, r_model_id);
      int exit_code = 0;
      auto announce = [&](const RunResult& res, const std::string& tag) {
        std::cout << tag << " run " << res.run_id << " -> " << res.run_dir.string()
                  << " (" << res.operator_rows.size() + res.summary_rows.size() +
                               res.dependence_rows.size()
                  << " report rows";
        if (res.anomalies > 0) std::cout << ", " << res.anomalies << " anomalies";
        std::cout << ")\n";
        exit_code = std::max(exit_code, res.exit_code);
      };
      if (r_rq == "1" || r_rq == "all") announce(run_rq1(config), "rq1");
      if (r_rq == "2" || r_rq == "all") announce(run_rq2(config), "rq2");
      if (r_rq == "3" || r_rq == "all") announce(run_rq3(config), "rq3");
      if (r_rq == "4" || r_rq == "all") announce(run_rq4(config), "rq4");
      if (r_rq != "1" && r_rq != "2" && r_rq != "3" && r_rq != "4" && r_rq != "all") {
        std::cerr << "unknown --rq value: " << r_rq << "\n";
        return 1;
      }
      return exit_code;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
