#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "../expect.hpp"
#include "bnet/error.hpp"
#include "bnet/serialize.hpp"
#include "bnet/synth.hpp"

using namespace bnet;

TEST_CASE("network json round trip is exact") {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 20; ++t) {
    const auto net = oracle::random_network(gen, 6, 4, 0.5, 3);
    const std::string text = dump(network_to_json(net));
    const auto back = network_from_json(parse_json(text));
    CHECK(dump(network_to_json(back)) == text);
    CHECK(back.dag() == net.dag());
    for (NodeId v = 0; v < net.size(); ++v) CHECK(back.cpt(v).values == net.cpt(v).values);
  }
  const auto gen_net = survey_generator();
  const std::string text = dump(network_to_json(gen_net));
  CHECK(dump(network_to_json(network_from_json(parse_json(text)))) == text);
}

TEST_CASE("network json layout") {
  const auto doc = network_to_json(survey_generator());
  CHECK(doc.at("format_version") == kNetworkFormatVersion);
  CHECK(doc.at("variables").size() == 15);
  const auto& cpts = doc.at("cpts");
  for (const auto& c : cpts) {
    if (c.at("variable") != "hiv_test") continue;
    CHECK(c.at("parents") == Json::array({"financial_plan", "legal_education"}));
    CHECK(c.at("rows").size() == 4);
  }
}

TEST_CASE("malformed network documents") {
  CHECK(kind_of([] { parse_json("{not json"); }) == ErrorKind::Parse);
  auto doc = network_to_json(survey_generator());
  auto no_cpts = doc;
  no_cpts.erase("cpts");
  CHECK(kind_of([&] { network_from_json(no_cpts); }) == ErrorKind::Parse);
  auto bad_version = doc;
  bad_version["format_version"] = 99;
  CHECK_THROWS_AS(network_from_json(bad_version), Error);
  auto cyclic = doc;
  cyclic["edges"].push_back({{"from", "condom_use"}, {"to", "financial_literacy"}});
  CHECK(kind_of([&] { network_from_json(cyclic); }) == ErrorKind::CycleError);
  auto bad_row = doc;
  bad_row["cpts"][0]["rows"][0][0] = 0.9;
  CHECK_THROWS_AS(network_from_json(bad_row), Error);
  CHECK(kind_of([] { read_json_file("/nonexistent.json"); }) == ErrorKind::Io);
}

TEST_CASE("ensemble json round trip") {
  EnsembleSummary s;
  s.replicates = 4;
  s.node_count = 3;
  s.edge_counts = {{{0, 1}, 3}, {{2, 1}, 1}};
  s.replicate_seeds = {1, 2, 3, 4};
  std::vector<VariableSpec> vars{{"a", {"0", "1"}, false}, {"b", {"0", "1"}, false}, {"c", {"0", "1"}, false}};
  const auto doc = ensemble_to_json(s, vars);
  CHECK(doc.at("edges")[0].at("frequency") == 0.75);
  CHECK(ensemble_from_json(parse_json(dump(doc)), vars) == s);
}

TEST_CASE("constraints by name") {
  std::vector<VariableSpec> vars{{"a", {"0", "1"}, false}, {"b", {"0", "1"}, false}, {"c", {"0", "1"}, false}};
  const auto doc = parse_json(R"({"forbidden":[{"from":"a","to":"b"}],"required":[{"from":"c","to":"b"}],
                                  "tiers":{"a":0,"b":1,"c":0},"max_parents":2})");
  const auto c = constraints_from_json(doc, vars, 4);
  CHECK(c.max_parents == 2);
  CHECK(c.forbidden.count({0, 1}));
  CHECK(c.required.count({2, 1}));
  CHECK(c.tier_of == std::vector<int>{0, 1, 0});
  CHECK(constraints_from_json(parse_json("{}"), vars, 3).max_parents == 3);
  CHECK(kind_of([&] { constraints_from_json(parse_json(R"({"required":[{"from":"a","to":"zz"}]})"), vars, 4); }) ==
        ErrorKind::UnknownVariable);
  CHECK(kind_of([&] {
          constraints_from_json(parse_json(R"({"required":[{"from":"a","to":"b"}],"forbidden":[{"from":"a","to":"b"}]})"),
                                vars, 4);
        }) == ErrorKind::ConstraintUnsatisfiable);
}

TEST_CASE("evidence by name") {
  const auto net = survey_generator();
  const auto e = evidence_from_json(net, parse_json(R"({"depression":"yes","state":"TN"})"));
  CHECK(e.size() == 2);
  CHECK(evidence_to_json(net, e) == parse_json(R"({"state":"TN","depression":"yes"})"));
  CHECK(kind_of([&] { evidence_from_json(net, parse_json(R"({"depression":"maybe"})")); }) ==
        ErrorKind::UnknownState);
  CHECK(kind_of([&] { evidence_from_json(net, parse_json(R"({"mood":"yes"})")); }) == ErrorKind::UnknownVariable);
  CHECK(kind_of([&] { evidence_from_json(net, parse_json(R"({"depression":1})")); }) == ErrorKind::Parse);
}

TEST_CASE("fingerprint") {
  CHECK(fingerprint("") == "fnv1a64:cbf29ce484222325");
  CHECK(fingerprint("a") == "fnv1a64:af63dc4c8601ec8c");
  CHECK(fingerprint("ab") != fingerprint("ba"));
}
