#include <doctest.h>

#include <cmath>
#include <set>

#include "../expect.hpp"
#include "../fixtures.hpp"
#include "bnet/inference.hpp"
#include "bnet/synth.hpp"
#include "bnet/workflow.hpp"

using namespace bnet;

TEST_CASE("generator carries the planted gaps") {
  const auto net = survey_generator();
  auto gap = [&](const char* source, const char* target) {
    const NodeId s = net.index_of(source), t = net.index_of(target);
    const int yes = net.state_of(t, "yes");
    return intervention_delta(net, t, yes, {{s, net.state_of(s, "no")}}, {{s, net.state_of(s, "yes")}}).delta;
  };
  CHECK(gap("financial_literacy", "condom_use") == doctest::Approx(0.06).epsilon(1e-12));
  CHECK(gap("depression", "buys_condom_self") == doctest::Approx(-0.14).epsilon(1e-12));
  CHECK(gap("legal_education", "hiv_test") == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(gap("financial_plan", "hiv_test") == doctest::Approx(0.12).epsilon(1e-12));
  CHECK(gap("govt_scheme", "high_self_efficacy") == doctest::Approx(0.13).epsilon(1e-12));
}

TEST_CASE("sampled marginals match the generator") {
  const auto net = survey_generator();
  const auto data = forward_sample(net, 20000, 7);
  for (NodeId v = 0; v < net.size(); ++v) {
    const auto prior = prior_marginal(net, v).distribution;
    std::vector<double> freq(prior.size(), 0.0);
    for (std::size_t r = 0; r < data.rows(); ++r) freq[data.at(r, v)] += 1.0 / data.rows();
    for (std::size_t s = 0; s < prior.size(); ++s) CHECK(std::abs(freq[s] - prior[s]) <= 0.01);
  }
}

TEST_CASE("query documents") {
  const auto net = survey_generator();
  const auto prior = run_query(net, parse_json(R"({"target":{"variable":"hiv_test"},"evidence":{}})"));
  const auto expected = prior_marginal(net, net.index_of("hiv_test")).distribution;
  CHECK(prior.at("distribution").get<std::vector<double>>() == expected);
  CHECK(prior.at("evidence_probability") == 1.0);
  const auto with_state = run_query(net, parse_json(R"({"target":{"variable":"hiv_test","state":"yes"},
                                                        "evidence":{"legal_education":"yes"}})"));
  CHECK(with_state.at("probability") == with_state.at("distribution")[1]);
  const auto same = run_whatif(net, parse_json(R"({"target":{"variable":"condom_use","state":"yes"},
      "evidence":{"financial_literacy":"yes"},"alternative":{"financial_literacy":"yes"}})"));
  CHECK(same.at("delta") == 0.0);
  CHECK(kind_of([&] { run_query(net, parse_json(R"({"evidence":{}})")); }) == ErrorKind::Parse);
  CHECK(kind_of([&] { run_query(net, parse_json(R"({"target":{"variable":"zz"}})")); }) ==
        ErrorKind::UnknownVariable);
  CHECK(kind_of([&] {
          run_query(net, parse_json(R"({"target":{"variable":"hiv_test"},"evidence":{"hiv_test":"yes"}})"));
        }) == ErrorKind::VarInEvidence);
  CHECK(kind_of([&] {
          run_whatif(net, parse_json(R"({"target":{"variable":"condom_use","state":"yes"},"evidence":{}})"));
        }) == ErrorKind::Parse);
  const auto vars = describe_variables(net);
  CHECK(vars.size() == 15);
  const auto graph = describe_graph(net, std::nullopt);
  CHECK(graph.at("edges").size() == net.dag().edge_count());
  const auto soft = parse_json(R"({"target":{"variable":"hiv_test"},"soft_evidence":{"depression":[0.2,0.8]}})");
  CHECK(kind_of([&] { run_query(net, soft); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("learning recovers planted edges and is reproducible") {
  const auto gen = fixture::planted8();
  auto data = forward_sample(gen, 3000, 4);
  data.set(0, 3, kMissing);  // missing cells become an explicit state
  LearnOptions opts;
  opts.seed = 3;
  opts.bootstraps = 15;
  const auto a = learn_network(data, opts);
  const auto b = learn_network(data, opts);
  CHECK(a.ensemble == b.ensemble);
  CHECK(dump(network_to_json(*a.network)) == dump(network_to_json(*b.network)));
  CHECK(a.network->variable(3).states.back() == std::string(kMissingStateLabel));
  for (auto [p, c] : gen.dag().edges()) CHECK(a.ensemble.frequency(p, c) + a.ensemble.frequency(c, p) >= 0.9);
  CHECK(describe_graph(*a.network, a.ensemble).at("edges").size() == a.averaged.edge_count());
  opts.constraints = parse_json(R"({"forbidden":[{"from":"x0","to":"x2"},{"from":"x2","to":"x0"}]})");
  const auto c = learn_network(data, opts);
  CHECK_FALSE(c.averaged.has_edge(0, 2));
  CHECK_FALSE(c.averaged.has_edge(2, 0));
  opts.constraints = parse_json(R"({"required":[{"from":"x0","to":"x1"}],"forbidden":[{"from":"x0","to":"x1"}]})");
  CHECK(kind_of([&] { learn_network(data, opts); }) == ErrorKind::ConstraintUnsatisfiable);
}

TEST_CASE("training oversamples only the training part") {
  auto data = fixture::separable(600, 12);
  // Make the positive class rare.
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    if (data.at(r, 5) == 0 || r % 4 == 0) keep.push_back(r);
  }
  data = data.select_rows(keep);
  TrainOptions opts;
  opts.label = "y";
  opts.seed = 2;
  opts.forest.trees = 20;
  const auto result = train_classifier(data, opts);
  const std::set<std::int64_t> original(data.row_ids().begin(), data.row_ids().end());
  for (auto id : result.test.row_ids()) CHECK(original.count(id));
  std::size_t synthetic = 0;
  for (auto id : result.train.row_ids()) synthetic += original.count(id) ? 0 : 1;
  CHECK(synthetic == result.synthetic_rows);
  CHECK(synthetic > 0);
  CHECK(result.train.rows() - synthetic + result.test.rows() == data.rows());
  EvalConfig cfg;
  cfg.bootstrap = 50;
  const auto report = evaluate_classifier(result.model, result.test, cfg);
  CHECK(report.accuracy.point >= 0.9);
  CHECK(kind_of([] { parse_model_kind("svm"); }) == ErrorKind::InvalidArgument);
}
