#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "semlens/harness.hpp"
#include "semlens/util.hpp"

using namespace semlens;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

CompletionRequest request_for(Task task, const std::string& prompt,
                              const std::string& unit = "u1") {
  CompletionRequest req;
  req.unit_id = unit;
  req.task = task;
  req.variant = "original";
  req.model_id = "m";
  req.temperature = 0.0;
  req.prompt = prompt;
  return req;
}

}  // namespace

TEST_CASE("prompt rendering follows the fixed template") {
  auto t = PromptTemplates::defaults();
  std::string code = "def f(x):\n    return x + 1\n";
  auto p = render_prompt(Task::Summarize, code, std::nullopt, t);
  CHECK(p.rendered ==
        "Given the following code snippet\n" + code +
            "\n. Please summarize the given code snippet");
  CHECK(p.rendered.find(code) != std::string::npos);  // byte-exact embedding

  auto n = render_prompt(Task::MethodName, code, std::nullopt, t);
  CHECK(n.rendered.find("Please generate the method name for the given code snippet") !=
        std::string::npos);

  TestCase tc{"fibfib(2)", "1", "assert fibfib(2) == 1"};
  auto o = render_prompt(Task::OutputPredict, code, tc, t);
  CHECK(o.rendered.find("Please complete the following test case: assert fibfib(2) == "
                        "<FILL>") != std::string::npos);

  auto d = render_prompt(Task::ControlDeps, code, std::nullopt, t);
  CHECK(d.rendered.find("control dependence") != std::string::npos);
  CHECK(d.rendered.find("(i, j)") != std::string::npos);

  // Determinism.
  CHECK(render_prompt(Task::Summarize, code, std::nullopt, t).rendered == p.rendered);
  CHECK_THROWS_AS(render_prompt(Task::OutputPredict, code, std::nullopt, t), MissingTest);
}

TEST_CASE("prompt templates load from a versioned file") {
  fs::path dir = fs::temp_directory_path() / "semlens_tpl";
  fs::create_directories(dir);
  fs::path f = dir / "tpl.json";
  write_file(f, R"({"task_descriptions": {"summarize": "Summarize concisely"}})");
  auto t = PromptTemplates::load_file(f.string());
  auto p = render_prompt(Task::Summarize, "x", std::nullopt, t);
  CHECK(p.rendered.find("Summarize concisely") != std::string::npos);
  // Untouched entries keep their defaults.
  CHECK(t.task_descriptions.at("method_name") ==
        "Please generate the method name for the given code snippet");
}

TEST_CASE("method name extraction prefers backticked identifiers") {
  auto p = parse_response(Task::MethodName, "The method name should be `isSymmetric`.");
  REQUIRE(p.ok);
  CHECK(p.text == "isSymmetric");
  auto plain = parse_response(Task::MethodName, "isPalindromeAndSumLessThen");
  REQUIRE(plain.ok);
  CHECK(plain.text == "isPalindromeAndSumLessThen");
  auto wordy = parse_response(Task::MethodName,
                              "A suitable method name for this code would be checkBalance");
  REQUIRE(wordy.ok);
  CHECK(wordy.text == "checkBalance");
  auto fenced = parse_response(Task::MethodName, "```java\nbelowZero()\n```");
  REQUIRE(fenced.ok);
  CHECK(fenced.text == "belowZero");
}

TEST_CASE("output literal extraction strips assertion scaffolding") {
  auto p = parse_response(Task::OutputPredict, "assert fibfib(2) == 1");
  REQUIRE(p.ok);
  CHECK(p.text == "1");
  auto fenced = parse_response(Task::OutputPredict,
                               "```python\nassert f([1]) == [1, 2]\n```");
  REQUIRE(fenced.ok);
  CHECK(fenced.text == "[1, 2]");
  auto bare = parse_response(Task::OutputPredict, "`42`");
  REQUIRE(bare.ok);
  CHECK(bare.text == "42");
  auto unfilled = parse_response(Task::OutputPredict, "assert f(2) == <FILL>");
  CHECK_FALSE(unfilled.ok);
}

TEST_CASE("pair extraction collects and deduplicates (i, j) tuples") {
  auto p = parse_response(Task::ControlDeps, "(6,7)\n(6, 9)\nnoise (6,7) words (x,y)");
  REQUIRE(p.ok);
  CHECK(p.pairs == PairSet{{6, 7}, {6, 9}});
  auto empty = parse_response(Task::DataDeps, "I cannot find any pairs.");
  CHECK(empty.ok);
  CHECK(empty.pairs.empty());
}

TEST_CASE("parse_response is total over arbitrary bytes") {
  std::mt19937 rng(1234);
  for (int i = 0; i < 200; ++i) {
    std::string junk;
    int len = static_cast<int>(rng() % 64);
    for (int k = 0; k < len; ++k) junk += static_cast<char>(rng() % 256);
    for (Task t : {Task::Summarize, Task::MethodName, Task::OutputPredict,
                   Task::ControlDeps, Task::DataDeps}) {
      CHECK_NOTHROW(parse_response(t, junk));
    }
  }
}

TEST_CASE("echo provider answers identically for original and transformed prompts") {
  EchoProvider echo;
  auto a = echo.complete(request_for(Task::Summarize, "prompt A"));
  auto b = echo.complete(request_for(Task::Summarize, "prompt B (transformed)"));
  CHECK(a == b);
}

TEST_CASE("second identical query hits the cache with zero provider calls") {
  fs::path dir = fs::temp_directory_path() / "semlens_cache_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  ExchangeCache cache((dir / "cache.jsonl").string());
  EchoProvider echo;
  QueryEngine engine(echo, &cache);
  auto req = request_for(Task::Summarize, "the prompt");
  auto e1 = engine.query(req);
  CHECK(engine.provider_calls() == 1);
  auto e2 = engine.query(req);
  CHECK(engine.provider_calls() == 1);  // served from cache
  CHECK(e1.raw_response == e2.raw_response);
  CHECK(e1.cache_key == e2.cache_key);

  // A fresh cache instance reloads the persisted entry.
  ExchangeCache reloaded((dir / "cache.jsonl").string());
  CHECK(reloaded.size() == 1);
  auto hit = reloaded.lookup(e1.cache_key);
  REQUIRE(hit.has_value());
  CHECK(hit->raw_response == e1.raw_response);
  CHECK(hit->prompt == e1.prompt);
}

TEST_CASE("replay provider reproduces recorded responses byte for byte") {
  fs::path dir = fs::temp_directory_path() / "semlens_replay_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string path = (dir / "exchanges.jsonl").string();
  {
    ExchangeCache cache(path);
    EchoProvider echo;
    QueryEngine engine(echo, &cache);
    engine.query(request_for(Task::Summarize, "p1"));
    engine.query(request_for(Task::MethodName, "p2"));
  }
  ReplayProvider replay(path);
  auto r = replay.complete(request_for(Task::Summarize, "p1"));
  CHECK(r == EchoProvider{}.complete(request_for(Task::Summarize, "p1")));
  CHECK_THROWS_AS(replay.complete(request_for(Task::Summarize, "unrecorded")),
                  ProviderError);
}

TEST_CASE("http provider speaks the chat-completions protocol with retries") {
  httplib::Server server;
  std::atomic<int> hits{0};
  server.Post("/v1/chat/completions", [&](const httplib::Request& req,
                                          httplib::Response& res) {
    int n = ++hits;
    json body = json::parse(req.body);
    CHECK(body["temperature"].get<double>() == 0.0);
    if (n == 1) {  // first attempt: transient failure
      res.status = 500;
      res.set_content("boom", "text/plain");
      return;
    }
    std::string content = "echo: " + body["messages"][0]["content"].get<std::string>();
    json reply = {{"choices", {{{"message", {{"role", "assistant"},
                                             {"content", content}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpProviderConfig config;
  config.endpoint = "http://127.0.0.1:" + std::to_string(port);
  config.max_retries = 2;
  HttpProvider provider(config);
  auto out = provider.complete(request_for(Task::Summarize, "hello"));
  CHECK(out == "echo: hello");
  CHECK(hits == 2);

  server.stop();
  server_thread.join();
}

TEST_CASE("http provider surfaces auth errors without retrying") {
  httplib::Server server;
  server.Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    res.status = 401;
  });
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpProviderConfig config;
  config.endpoint = "http://127.0.0.1:" + std::to_string(port);
  HttpProvider provider(config);
  CHECK_THROWS_AS(provider.complete(request_for(Task::Summarize, "x")), AuthError);

  // Missing credential env var fails before any network traffic.
  HttpProviderConfig with_key = config;
  with_key.api_key_env = "SEMLENS_TEST_MISSING_KEY";
  unsetenv("SEMLENS_TEST_MISSING_KEY");
  HttpProvider keyed(with_key);
  CHECK_THROWS_AS(keyed.complete(request_for(Task::Summarize, "x")), AuthError);

  server.stop();
  server_thread.join();
}

TEST_CASE("cache keys separate models, prompts and temperatures") {
  auto k = cache_key("m1", "p", 0.0);
  CHECK(k == cache_key("m1", "p", 0.0));
  CHECK(k != cache_key("m2", "p", 0.0));
  CHECK(k != cache_key("m1", "q", 0.0));
  CHECK(k != cache_key("m1", "p", 0.5));
}

TEST_CASE("exchange JSONL round-trips with reparsed payload") {
  ModelExchange e;
  e.cache_key = cache_key("m", "p", 0.0);
  e.unit_id = "u9";
  e.task = Task::ControlDeps;
  e.variant = "sp.rename_var";
  e.model_id = "m";
  e.prompt = "p";
  e.raw_response = "(1,2)\n(3,4)";
  e.parsed = parse_response(e.task, e.raw_response);
  auto back = exchange_from_json(exchange_to_json(e));
  CHECK(back.cache_key == e.cache_key);
  CHECK(back.unit_id == e.unit_id);
  CHECK(back.task == e.task);
  CHECK(back.variant == e.variant);
  CHECK(back.raw_response == e.raw_response);
  CHECK(back.parsed.pairs == PairSet{{1, 2}, {3, 4}});
}
