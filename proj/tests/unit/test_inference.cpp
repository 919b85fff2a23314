#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "../expect.hpp"
#include "bnet/error.hpp"
#include "bnet/inference.hpp"

using namespace bnet;

namespace {

EvidenceSet random_evidence(std::mt19937_64& gen, const BayesianNetwork& net, NodeId skip) {
  EvidenceSet e;
  for (NodeId v = 0; v < net.size(); ++v) {
    if (v != skip && gen() % 3 == 0) e[v] = static_cast<int>(gen() % net.variable(v).cardinality());
  }
  return e;
}

}  // namespace

TEST_CASE("factor product and marginalisation") {
  Factor a({0, 1}, {2, 2}, {0.1, 0.2, 0.3, 0.4});
  Factor b({1}, {2}, {10, 100});
  const Factor ab = a.multiply(b);
  CHECK(ab.scope() == std::vector<NodeId>{0, 1});
  CHECK(ab.values() == std::vector<double>{1, 20, 3, 40});
  const Factor s = ab.sum_out(1);
  CHECK(s.scope() == std::vector<NodeId>{0});
  CHECK(s.values()[0] == doctest::Approx(21));
  CHECK(s.values()[1] == doctest::Approx(43));
  CHECK(Factor::indicator(3, 3, 1).values() == std::vector<double>{0, 1, 0});
  CHECK(ab.total() == doctest::Approx(64));
}

TEST_CASE("posterior matches full-joint enumeration") {
  std::mt19937_64 gen(11);
  for (int t = 0; t < 150; ++t) {
    const int n = 2 + static_cast<int>(gen() % 5);
    const auto net = oracle::random_network(gen, n, 3, 0.5, 3, 0.1);
    const NodeId var = static_cast<NodeId>(gen() % n);
    const auto e = random_evidence(gen, net, var);
    const double pe = oracle::evidence_probability(net, e);
    if (pe == 0.0) {
      CHECK(kind_of([&] { posterior(net, var, e); }) == ErrorKind::ImpossibleEvidence);
      continue;
    }
    const auto expected = oracle::normalized(oracle::joint_with_evidence(net, var, e));
    const auto got = posterior(net, var, e);
    CHECK(oracle::max_abs_diff(got.distribution, expected) <= 1e-9);
    CHECK(got.evidence_probability == doctest::Approx(pe).epsilon(1e-9));
  }
}

TEST_CASE("elimination order does not change the answer") {
  std::mt19937_64 gen(23);
  for (int t = 0; t < 40; ++t) {
    const auto net = oracle::random_network(gen, 6, 3, 0.4, 3);
    const NodeId var = static_cast<NodeId>(gen() % 6);
    const auto e = random_evidence(gen, net, var);
    std::vector<NodeId> order;
    for (NodeId v = 0; v < 6; ++v) {
      if (v != var) order.push_back(v);
    }
    std::shuffle(order.begin(), order.end(), gen);
    const auto a = joint_with_evidence(net, var, e);
    const auto b = joint_with_evidence(net, var, e, order);
    CHECK(oracle::max_abs_diff(a, b) <= 1e-12);
    const auto md = min_degree_order(net, var);
    CHECK(md.size() == 5);
    CHECK(std::find(md.begin(), md.end(), var) == md.end());
  }
}

TEST_CASE("likelihood times prior normalizes to the posterior") {
  std::mt19937_64 gen(29);
  for (int t = 0; t < 80; ++t) {
    const auto net = oracle::random_network(gen, 5, 3, 0.5, 3);
    const NodeId var = static_cast<NodeId>(gen() % 5);
    const auto e = random_evidence(gen, net, var);
    const auto prior = prior_marginal(net, var).distribution;
    const auto lik = likelihood(net, var, e);
    std::vector<double> prod(prior.size());
    for (std::size_t s = 0; s < prior.size(); ++s) prod[s] = lik[s] * prior[s];
    CHECK(oracle::max_abs_diff(oracle::normalized(prod), posterior(net, var, e).distribution) <= 1e-9);
  }
}

TEST_CASE("empty evidence gives the prior marginal") {
  std::mt19937_64 gen(31);
  const auto net = oracle::random_network(gen, 5, 4, 0.5, 3);
  for (NodeId v = 0; v < 5; ++v) {
    const auto expected = oracle::joint_with_evidence(net, v, {});
    CHECK(oracle::max_abs_diff(prior_marginal(net, v).distribution, expected) <= 1e-12);
    CHECK(oracle::max_abs_diff(posterior(net, v, {}).distribution, expected) <= 1e-12);
  }
}

TEST_CASE("evidence errors") {
  std::mt19937_64 gen(37);
  const auto net = oracle::random_network(gen, 4, 2, 0.5, 2);
  CHECK(kind_of([&] { posterior(net, 1, {{1, 0}}); }) == ErrorKind::VarInEvidence);
  CHECK(kind_of([&] { likelihood(net, 1, {{1, 0}}); }) == ErrorKind::VarInEvidence);
  CHECK(kind_of([&] { posterior(net, 1, {{0, 5}}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([&] { posterior(net, 1, {{9, 0}}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("intervention delta is a difference of conditionals") {
  std::mt19937_64 gen(41);
  for (int t = 0; t < 30; ++t) {
    const auto net = oracle::random_network(gen, 5, 2, 0.6, 3);
    const EvidenceSet base{{0, 0}}, alt{{0, 1}};
    const NodeId target = 4;
    const auto d = intervention_delta(net, target, 1, base, alt);
    const double pb = oracle::normalized(oracle::joint_with_evidence(net, target, base))[1];
    const double pa = oracle::normalized(oracle::joint_with_evidence(net, target, alt))[1];
    CHECK(d.baseline_prob == doctest::Approx(pb).epsilon(1e-9));
    CHECK(d.alternative_prob == doctest::Approx(pa).epsilon(1e-9));
    CHECK(d.delta == doctest::Approx(pa - pb).epsilon(1e-9));
    CHECK(intervention_delta(net, target, 1, base, base).delta == 0.0);
  }
}

TEST_CASE("fit_cpts smoothing") {
  std::vector<VariableSpec> vars{{"a", {"0", "1"}, false}, {"b", {"0", "1", "2"}, false}};
  DatasetTable t(vars);
  for (int i = 0; i < 3; ++i) t.add_row(std::vector<int>{0, 1});
  t.add_row(std::vector<int>{0, 2});
  t.add_row(std::vector<int>{0, kMissing});
  Dag d(2);
  d.add_edge(0, 1);
  const auto ml = fit_cpts(d, t, 0.0);
  CHECK(ml.cpt(0).values == std::vector<double>{1.0, 0.0});
  // b | a=0 counts {0, 3, 1}; a=1 unseen -> uniform
  CHECK(ml.cpt(1).row(0)[1] == doctest::Approx(0.75));
  CHECK(ml.cpt(1).row(1)[0] == doctest::Approx(1.0 / 3));
  const auto lap = fit_cpts(d, t, 1.0);
  CHECK(lap.cpt(1).row(0)[0] == doctest::Approx(1.0 / 7));
  CHECK(lap.cpt(1).row(0)[1] == doctest::Approx(4.0 / 7));
  CHECK(lap.cpt(0).values[0] == doctest::Approx(6.0 / 7));
}
