#include "bnet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bnet/error.hpp"
#include "bnet/random.hpp"

namespace bnet {

int CvricsComponent::max_contribution() const {
  int best = 0;
  for (const auto& [label, score] : scores) best = std::max(best, score);
  return best;
}

void validate_cvrics(const CvricsSpec& spec) {
  if (spec.range_low != 0 || spec.range_high <= 0) {
    fail(ErrorKind::InvalidArgument, "CVRICS range must be [0, high] with high > 0");
  }
  int total = 0;
  for (const auto& c : spec.components) {
    for (const auto& [label, score] : c.scores) {
      if (score < 0) {
        fail(ErrorKind::InvalidArgument, "negative contribution for '" + c.column + "'='" + label + "'");
      }
    }
    total += c.max_contribution();
  }
  if (total != spec.range_high) {
    fail(ErrorKind::InvalidArgument, "CVRICS components reach " + std::to_string(total) +
                                         ", expected " + std::to_string(spec.range_high));
  }
}

CvricsSpec cvrics_from_json(const Json& doc) {
  CvricsSpec spec;
  try {
    if (doc.contains("range")) {
      spec.range_low = doc.at("range").at(0).get<int>();
      spec.range_high = doc.at("range").at(1).get<int>();
    }
    for (const auto& c : doc.at("components")) {
      CvricsComponent comp;
      comp.column = c.at("column").get<std::string>();
      for (auto it = c.at("scores").begin(); it != c.at("scores").end(); ++it) {
        comp.scores.emplace_back(it.key(), it.value().get<int>());
      }
      spec.components.push_back(std::move(comp));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed CVRICS spec: ") + e.what());
  }
  validate_cvrics(spec);
  return spec;
}

Json cvrics_to_json(const CvricsSpec& spec) {
  Json doc;
  doc["range"] = {spec.range_low, spec.range_high};
  Json comps = Json::array();
  for (const auto& c : spec.components) {
    Json scores = Json::object();
    for (const auto& [label, score] : c.scores) scores[label] = score;
    comps.push_back({{"column", c.column}, {"scores", std::move(scores)}});
  }
  doc["components"] = std::move(comps);
  return doc;
}

std::vector<int> compute_cvrics(const DatasetTable& data, const CvricsSpec& spec) {
  validate_cvrics(spec);
  std::vector<int> out(data.rows(), 0);
  for (const auto& comp : spec.components) {
    const std::size_t c = data.column_index(comp.column);
    const auto& var = data.column(c);
    std::vector<int> by_state(var.cardinality(), 0);
    for (const auto& [label, score] : comp.scores) {
      int s = var.state_index(label);
      if (s >= 0) by_state[s] = score;
    }
    for (std::size_t r = 0; r < data.rows(); ++r) {
      int s = data.at(r, c);
      if (s != kMissing) out[r] += by_state[s];
    }
  }
  return out;
}

void append_cvrics(DatasetTable& data, const CvricsSpec& spec) {
  auto scores = compute_cvrics(data, spec);
  VariableSpec column{"cvrics", {}, true};
  for (int v = spec.range_low; v <= spec.range_high; ++v) column.states.push_back(std::to_string(v));
  for (int& s : scores) s -= spec.range_low;
  data.append_column(std::move(column), scores);
}

std::vector<std::size_t> histogram(std::span<const int> values, std::span<const int> edges) {
  if (edges.size() < 2) fail(ErrorKind::UnsortedEdges, "need at least two bin edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (edges[i] <= edges[i - 1]) fail(ErrorKind::UnsortedEdges, "bin edges must be strictly ascending");
  }
  std::vector<std::size_t> counts(edges.size() - 1, 0);
  for (int v : values) {
    if (v == kMissing) continue;
    auto it = std::upper_bound(edges.begin(), edges.end(), v);
    if (it == edges.begin() || it == edges.end()) {
      fail(ErrorKind::ValueOutOfRange, "value " + std::to_string(v) + " falls outside every bin");
    }
    ++counts[(it - edges.begin()) - 1];
  }
  return counts;
}

namespace {

void shuffle(std::vector<std::size_t>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.below(i)]);
  }
}

}  // namespace

std::pair<DatasetTable, DatasetTable> train_test_split(const DatasetTable& data, const SplitConfig& config) {
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    fail(ErrorKind::InvalidArgument, "train fraction must lie in (0, 1)");
  }
  if (data.rows() < 2) fail(ErrorKind::InvalidArgument, "need at least two rows to split");
  Rng rng(config.seed);

  // Strata keyed by class state; missing labels form their own stratum.
  std::vector<std::vector<std::size_t>> strata;
  if (config.stratify_on) {
    const std::size_t c = data.column_index(*config.stratify_on);
    strata.resize(data.column(c).cardinality() + 1);
    for (std::size_t r = 0; r < data.rows(); ++r) {
      int s = data.at(r, c);
      strata[s == kMissing ? strata.size() - 1 : static_cast<std::size_t>(s)].push_back(r);
    }
  } else {
    strata.emplace_back(data.rows());
    std::iota(strata[0].begin(), strata[0].end(), std::size_t{0});
  }

  std::vector<std::size_t> train, test;
  for (auto& stratum : strata) {
    if (stratum.empty()) continue;
    if (config.stratify_on && stratum.size() < 2) {
      fail(ErrorKind::DegenerateClass, "a stratum of '" + *config.stratify_on + "' has fewer than 2 rows");
    }
    shuffle(stratum, rng);
    const auto cut = static_cast<std::size_t>(std::floor(stratum.size() * config.train_fraction));
    train.insert(train.end(), stratum.begin(), stratum.begin() + cut);
    test.insert(test.end(), stratum.begin() + cut, stratum.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {data.select_rows(train), data.select_rows(test)};
}

double mixed_distance(const DatasetTable& data, std::size_t a, std::size_t b, std::optional<std::size_t> skip) {
  double d = 0.0;
  for (std::size_t c = 0; c < data.cols(); ++c) {
    if (skip && *skip == c) continue;
    const int x = data.at(a, c);
    const int y = data.at(b, c);
    const auto& var = data.column(c);
    if (var.ordered && var.cardinality() > 1) {
      d += std::abs(x - y) / static_cast<double>(var.cardinality() - 1);
    } else {
      d += x == y ? 0.0 : 1.0;
    }
  }
  return d;
}

DatasetTable smote(const DatasetTable& data, const std::string& label, const SmoteConfig& config) {
  if (config.k_neighbors < 1) fail(ErrorKind::InvalidArgument, "k_neighbors must be at least 1");
  if (!(config.target_ratio > 0.0 && config.target_ratio <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "target_ratio must lie in (0, 1]");
  }
  if (config.fixed_lambda && !(*config.fixed_lambda >= 0.0 && *config.fixed_lambda <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "fixed lambda must lie in [0, 1]");
  }
  const std::size_t lc = data.column_index(label);
  if (data.column(lc).cardinality() != 2) {
    fail(ErrorKind::NonBinaryLabel, "label '" + label + "' must have exactly two states");
  }
  if (data.has_missing()) {
    fail(ErrorKind::InvalidArgument, "SMOTE input has missing cells; prepare the table first");
  }

  std::vector<std::size_t> by_class[2];
  for (std::size_t r = 0; r < data.rows(); ++r) by_class[data.at(r, lc)].push_back(r);
  const int minority_class = by_class[0].size() <= by_class[1].size() ? 0 : 1;
  const auto& minority = by_class[minority_class];
  const std::size_t majority_count = by_class[1 - minority_class].size();
  if (minority.size() <= static_cast<std::size_t>(config.k_neighbors)) {
    fail(ErrorKind::TooFewMinority, "minority class has " + std::to_string(minority.size()) +
                                        " rows; need more than k_neighbors");
  }

  DatasetTable out = data;
  const auto target = static_cast<std::size_t>(std::llround(config.target_ratio * majority_count));
  if (target <= minority.size()) return out;
  const std::size_t needed = target - minority.size();

  // k nearest minority neighbours per minority row; ties by row order.
  const std::size_t m = minority.size();
  const std::size_t k = static_cast<std::size_t>(config.k_neighbors);
  std::vector<std::vector<std::size_t>> neighbours(m);
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < m; ++i) {
    dist.clear();
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) dist.emplace_back(mixed_distance(data, minority[i], minority[j], lc), j);
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    for (std::size_t t = 0; t < k; ++t) neighbours[i].push_back(dist[t].second);
  }

  Rng rng(config.seed);
  std::int64_t next_id = data.next_row_id();
  std::vector<int> cells(data.cols());
  for (std::size_t n = 0; n < needed; ++n) {
    const std::size_t base = rng.below(m);
    const std::size_t other = neighbours[base][rng.below(k)];
    const double lambda = config.fixed_lambda ? *config.fixed_lambda : rng.uniform();
    auto r = data.row(minority[base]);
    auto nb = data.row(minority[other]);
    for (std::size_t c = 0; c < data.cols(); ++c) {
      const auto& var = data.column(c);
      if (c == lc) {
        cells[c] = minority_class;
      } else if (var.ordered) {
        const double value = r[c] + lambda * (nb[c] - r[c]);
        cells[c] = std::clamp(static_cast<int>(std::lround(value)), 0, var.cardinality() - 1);
      } else {
        cells[c] = rng.uniform() < lambda ? nb[c] : r[c];
      }
    }
    out.add_row(cells, next_id++);
  }
  return out;
}

DatasetTable prepare_for_classification(const DatasetTable& data, const std::string& label) {
  const std::size_t lc = data.column_index(label);
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < data.rows(); ++r) {
    if (data.at(r, lc) != kMissing) keep.push_back(r);
  }
  DatasetTable out = data.select_rows(keep);
  for (std::size_t c = 0; c < out.cols(); ++c) {
    std::vector<std::size_t> counts(out.column(c).cardinality(), 0);
    bool any_missing = false;
    for (std::size_t r = 0; r < out.rows(); ++r) {
      int s = out.at(r, c);
      if (s == kMissing) {
        any_missing = true;
      } else {
        ++counts[s];
      }
    }
    if (!any_missing) continue;
    const int mode = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
    for (std::size_t r = 0; r < out.rows(); ++r) {
      if (out.at(r, c) == kMissing) out.set(r, c, mode);
    }
  }
  return out;
}

DatasetTable encode_missing_as_state(const DatasetTable& data) {
  std::vector<VariableSpec> columns = data.columns();
  std::vector<char> extended(columns.size(), 0);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    for (std::size_t r = 0; r < data.rows() && !extended[c]; ++r) {
      if (data.at(r, c) == kMissing) extended[c] = 1;
    }
    if (extended[c]) {
      columns[c].states.emplace_back(kMissingStateLabel);
      columns[c].ordered = false;
    }
  }
  DatasetTable out(columns);
  std::vector<int> cells(columns.size());
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      int s = data.at(r, c);
      cells[c] = s == kMissing ? columns[c].cardinality() - 1 : s;
    }
    out.add_row(cells, data.row_id(r));
  }
  return out;
}

}  // namespace bnet
