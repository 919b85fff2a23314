#pragma once

// Planted datasets shared by the unit and acceptance suites.

#include <cstdint>
#include <string>
#include <vector>

#include "bnet/network.hpp"
#include "bnet/random.hpp"
#include "bnet/table.hpp"

namespace fixture {

inline bnet::VariableSpec numeric(const std::string& name, int states, bool ordered = true) {
  bnet::VariableSpec v{name, {}, ordered};
  for (int s = 0; s < states; ++s) v.states.push_back(std::to_string(s));
  return v;
}

// The label is a deterministic function of three of the six features:
// y = 1 iff (a >= 3 and city != "c") or score == 3. Two pure-noise columns
// ride along.
inline bnet::DatasetTable separable(std::size_t rows, std::uint64_t seed) {
  bnet::DatasetTable t({numeric("a", 5), {"city", {"a", "b", "c"}, false}, numeric("score", 4),
                        numeric("noise1", 3), {"noise2", {"u", "v"}, false}, {"y", {"no", "yes"}, false}});
  bnet::Rng rng(seed);
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<int> row(6);
    for (int c = 0; c < 5; ++c) row[c] = static_cast<int>(rng.below(t.column(c).cardinality()));
    row[5] = ((row[0] >= 3 && row[1] != 2) || row[2] == 3) ? 1 : 0;
    t.add_row(row);
  }
  return t;
}

inline std::vector<bnet::VariableSpec> binary_vars(int n, const std::string& prefix = "x") {
  std::vector<bnet::VariableSpec> out;
  for (int i = 0; i < n; ++i) out.push_back({prefix + std::to_string(i), {"0", "1"}, false});
  return out;
}

// Eight binary nodes, eight edges, strong dependencies:
//   x0 -> x2, x1 -> x2, x2 -> x3, x3 -> x4, x2 -> x5, x5 -> x6, x4 -> x7, x6 -> x7
inline bnet::BayesianNetwork planted8() {
  auto vars = binary_vars(8);
  bnet::Dag d(8);
  const std::vector<bnet::Edge> edges{{0, 2}, {1, 2}, {2, 3}, {3, 4}, {2, 5}, {5, 6}, {4, 7}, {6, 7}};
  for (auto [p, c] : edges) d.add_edge(p, c);
  using Rows = std::vector<std::vector<double>>;
  std::vector<bnet::Cpt> cpts{
      bnet::make_cpt(vars, 0, {}, Rows{{0.6, 0.4}}),
      bnet::make_cpt(vars, 1, {}, Rows{{0.3, 0.7}}),
      bnet::make_cpt(vars, 2, {0, 1}, Rows{{0.9, 0.1}, {0.4, 0.6}, {0.5, 0.5}, {0.1, 0.9}}),
      bnet::make_cpt(vars, 3, {2}, Rows{{0.85, 0.15}, {0.2, 0.8}}),
      bnet::make_cpt(vars, 4, {3}, Rows{{0.75, 0.25}, {0.15, 0.85}}),
      bnet::make_cpt(vars, 5, {2}, Rows{{0.2, 0.8}, {0.85, 0.15}}),
      bnet::make_cpt(vars, 6, {5}, Rows{{0.8, 0.2}, {0.25, 0.75}}),
      bnet::make_cpt(vars, 7, {4, 6}, Rows{{0.9, 0.1}, {0.5, 0.5}, {0.45, 0.55}, {0.05, 0.95}}),
  };
  return bnet::BayesianNetwork(std::move(vars), std::move(d), std::move(cpts));
}

}  // namespace fixture
