#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

#include <httplib.h>
#include <json.hpp>

#include "bnet/bnet.h"
#include "service/service.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using bnet::service::HttpServer;
using bnet::service::QueryService;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string run(const std::string& cmd, int* status) {
  std::string out;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  *status = ::pclose(pipe);
  return out;
}

// A learned model plus ensemble written once for the whole suite.
struct Artifacts {
  fs::path dir;
  std::string model, ensemble, generator;
  Artifacts() {
    dir = fs::temp_directory_path() / ("bnet_service_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    model = (dir / "model.json").string();
    ensemble = (dir / "ensemble.json").string();
    generator = (dir / "generator.json").string();
    bnet_table* t = nullptr;
    bnet_network* gen = nullptr;
    REQUIRE(bnet_synth(2000, 5, &t, &gen, nullptr) == BNET_OK);
    bnet_learn_options opts;
    bnet_learn_options_init(&opts);
    opts.seed = 1;
    opts.bootstraps = 5;
    bnet_ensemble* e = nullptr;
    bnet_network* m = nullptr;
    REQUIRE(bnet_learn(t, &opts, &e, &m) == BNET_OK);
    REQUIRE(bnet_network_write(m, model.c_str()) == BNET_OK);
    REQUIRE(bnet_ensemble_write(e, ensemble.c_str()) == BNET_OK);
    REQUIRE(bnet_network_write(gen, generator.c_str()) == BNET_OK);
    bnet_network_free(m);
    bnet_ensemble_free(e);
    bnet_network_free(gen);
    bnet_table_free(t);
  }
  ~Artifacts() { fs::remove_all(dir); }
};

const Artifacts& artifacts() {
  static Artifacts a;
  return a;
}

const char* kQuery = R"({"target":{"variable":"condom_use","state":"yes"},"evidence":{"financial_literacy":"yes"}})";
const char* kWhatif = R"({"target":{"variable":"condom_use","state":"yes"},"evidence":{"financial_literacy":"no"},
                          "alternative":{"financial_literacy":"yes"}})";

}  // namespace

TEST_CASE("routes and payloads") {
  const auto& a = artifacts();
  QueryService svc(a.model, a.ensemble);
  const std::string fp = svc.fingerprint();
  CHECK(fp.rfind("fnv1a64:", 0) == 0);

  auto vars = svc.handle("GET", "/variables", "");
  CHECK(vars.status == 200);
  CHECK(Json::parse(vars.body).at("variables").size() == 15);

  auto graph = svc.handle("GET", "/graph", "");
  CHECK(graph.status == 200);
  const Json g = Json::parse(graph.body);
  bnet_network* net = nullptr;
  REQUIRE(bnet_network_read(a.model.c_str(), &net) == BNET_OK);
  char* text = nullptr;
  REQUIRE(bnet_network_to_json(net, &text) == BNET_OK);
  CHECK(g.at("edges").size() == Json::parse(text).at("edges").size());
  bnet_string_free(text);
  bnet_network_free(net);
  for (const auto& e : g.at("edges")) {
    CHECK(e.at("frequency").get<double>() >= 0.0);
    CHECK(e.at("support").get<double>() > 0.5);
  }

  auto health = svc.handle("GET", "/healthz", "");
  CHECK(health.status == 200);
  CHECK(Json::parse(health.body).at("status") == "ok");

  auto prior = svc.handle("POST", "/query", R"({"target":{"variable":"hiv_test"},"evidence":{}})");
  CHECK(prior.status == 200);
  CHECK(Json::parse(prior.body).at("evidence_probability") == 1.0);

  auto delta = svc.handle("POST", "/whatif", kWhatif);
  CHECK(delta.status == 200);
  CHECK(Json::parse(delta.body).contains("delta"));

  for (const auto* r : {&vars, &graph, &health, &prior, &delta}) CHECK(Json::parse(r->body).at("fingerprint") == fp);
}

TEST_CASE("errors map to 400, 404 and 422 with a structured body") {
  const auto& a = artifacts();
  const char* doc = R"({"format_version":1,
    "variables":[{"name":"a","states":["0","1"]},{"name":"b","states":["0","1"]}],
    "edges":[{"from":"a","to":"b"}],
    "cpts":[{"variable":"a","parents":[],"rows":[[1.0,0.0]]},
            {"variable":"b","parents":["a"],"rows":[[0.5,0.5],[0.5,0.5]]}]})";
  const fs::path degenerate = a.dir / "degenerate.json";
  std::ofstream(degenerate) << doc;
  QueryService svc(degenerate.string(), std::nullopt);
  auto check_error = [&](const bnet::service::Reply& r, int status, const char* code) {
    CHECK(r.status == status);
    const Json body = Json::parse(r.body);
    CHECK(body.at("code") == code);
    CHECK(body.at("message").is_string());
    CHECK(body.contains("detail"));
    CHECK(body.at("fingerprint") == svc.fingerprint());
  };
  check_error(svc.handle("POST", "/query", R"({"target":{"variable":"b"},"evidence":{"a":"1"}})"), 422,
              "ImpossibleEvidence");
  check_error(svc.handle("POST", "/query", "{"), 400, "ParseError");
  check_error(svc.handle("POST", "/query", R"({"target":{"variable":"zz"}})"), 400, "UnknownVariable");
  check_error(svc.handle("POST", "/query", R"({"target":{"variable":"b"},"evidence":{"a":"7"}})"), 400,
              "UnknownState");
  check_error(svc.handle("POST", "/query", R"({"target":{"variable":"b"},"evidence":{"b":"1"}})"), 400,
              "VarInEvidence");
  check_error(svc.handle("POST", "/whatif", R"({"target":{"variable":"b","state":"1"}})"), 400, "ParseError");
  check_error(svc.handle("GET", "/nope", ""), 404, "NotFound");
  CHECK(bnet::service::http_status_for(BNET_ERR_INTERNAL) == 500);
  CHECK_THROWS_AS(QueryService("/nonexistent.json", std::nullopt), std::runtime_error);
}

TEST_CASE("service responses equal CLI output byte for byte") {
  const auto& a = artifacts();
  QueryService svc(a.model, a.ensemble);
  const fs::path req = a.dir / "req.json";
  for (const char* body : {kQuery, R"({"target":{"variable":"hiv_test"},"evidence":{}})"}) {
    std::ofstream(req, std::ios::trunc) << body;
    int status = 0;
    const std::string cli = run(std::string(BNET_CLI_PATH) + " query --model " + a.model + " --request " +
                                    req.string(),
                                &status);
    CHECK(status == 0);
    CHECK(cli == svc.handle("POST", "/query", body).body);
  }
  std::ofstream(req, std::ios::trunc) << kWhatif;
  int status = 0;
  const std::string cli =
      run(std::string(BNET_CLI_PATH) + " whatif --model " + a.model + " --request " + req.string(), &status);
  CHECK(status == 0);
  CHECK(cli == svc.handle("POST", "/whatif", kWhatif).body);
}

TEST_CASE("concurrency soak over HTTP: 1000 parallel identical queries") {
  const auto& a = artifacts();
  const std::string before = slurp(a.model);
  QueryService svc(a.model, a.ensemble);
  HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread listener([&] { server.listen(); });
  server.wait_until_ready();

  const std::string expected = svc.handle("POST", "/query", kQuery).body;
  constexpr int kThreads = 20;
  constexpr int kPerThread = 50;
  std::atomic<int> ok{0}, mismatched{0}, failed{0};
  std::vector<std::thread> workers;
  for (int t = 0; t < kThreads; ++t) {
    workers.emplace_back([&] {
      httplib::Client client("127.0.0.1", port);
      client.set_connection_timeout(10);
      client.set_read_timeout(30);
      for (int i = 0; i < kPerThread; ++i) {
        auto res = client.Post("/query", kQuery, "application/json");
        if (!res || res->status != 200) {
          if (failed++ == 0) MESSAGE("first failure: " << (res ? std::to_string(res->status) : httplib::to_string(res.error())));
        } else if (res->body != expected) {
          ++mismatched;
        } else {
          ++ok;
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  CHECK(ok == kThreads * kPerThread);
  CHECK(mismatched == 0);
  CHECK(failed == 0);

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/healthz");
  REQUIRE(health);
  CHECK(health->status == 200);
  auto missing = client.Get("/missing");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(Json::parse(missing->body).at("code") == "NotFound");
  auto bad = client.Post("/whatif", "{}", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);

  server.stop();
  listener.join();
  CHECK(slurp(a.model) == before);
}
