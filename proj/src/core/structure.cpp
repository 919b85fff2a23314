#include "bnet/structure.hpp"

#include <algorithm>
#include <deque>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <unordered_map>

#include "bnet/error.hpp"
#include "bnet/random.hpp"

namespace bnet {

bool SearchConstraints::admits(NodeId parent, NodeId child) const {
  if (forbidden.count({parent, child})) return false;
  if (!tier_of.empty() && tier_of.at(parent) > tier_of.at(child)) return false;
  return true;
}

void validate_constraints(const SearchConstraints& constraints, int node_count) {
  auto in_range = [&](NodeId v) { return v >= 0 && v < node_count; };
  if (constraints.max_parents < 0) {
    fail(ErrorKind::ConstraintUnsatisfiable, "max_parents must be non-negative");
  }
  if (!constraints.tier_of.empty() &&
      static_cast<int>(constraints.tier_of.size()) != node_count) {
    fail(ErrorKind::ConstraintUnsatisfiable, "tier list does not cover every node");
  }
  for (const auto& [p, c] : constraints.forbidden) {
    if (!in_range(p) || !in_range(c)) {
      fail(ErrorKind::ConstraintUnsatisfiable, "forbidden edge references unknown node");
    }
  }
  Dag required(node_count);
  for (const auto& [p, c] : constraints.required) {
    const std::string name = std::to_string(p) + "->" + std::to_string(c);
    if (!in_range(p) || !in_range(c) || p == c) {
      fail(ErrorKind::ConstraintUnsatisfiable, "required edge " + name + " is invalid");
    }
    if (constraints.forbidden.count({p, c})) {
      fail(ErrorKind::ConstraintUnsatisfiable, "edge " + name + " is both required and forbidden");
    }
    if (!constraints.admits(p, c)) {
      fail(ErrorKind::ConstraintUnsatisfiable, "required edge " + name + " violates the tiers");
    }
    if (required.would_create_cycle(p, c)) {
      fail(ErrorKind::ConstraintUnsatisfiable, "required edges form a cycle at " + name);
    }
    required.add_edge(p, c);
    if (static_cast<int>(required.parents(c).size()) > constraints.max_parents) {
      fail(ErrorKind::ConstraintUnsatisfiable, "required edges exceed max_parents at node " +
                                                   std::to_string(c));
    }
  }
}

ScoringData::ScoringData(const DatasetTable& table) {
  if (table.empty()) fail(ErrorKind::EmptyData, "cannot score an empty table");
  rows_ = table.rows();
  columns_.assign(table.cols(), std::vector<int>(rows_));
  for (std::size_t c = 0; c < table.cols(); ++c) {
    cards_.push_back(table.column(c).cardinality());
    for (std::size_t r = 0; r < rows_; ++r) {
      int s = table.at(r, c);
      if (s == kMissing) {
        fail(ErrorKind::InvalidArgument, "column '" + table.column(c).name +
                                             "' has missing cells; encode them as a state first");
      }
      columns_[c][r] = s;
    }
  }
}

ScoringData::ScoringData(std::vector<std::vector<int>> columns, std::vector<int> cardinalities)
    : columns_(std::move(columns)), cards_(std::move(cardinalities)) {
  if (columns_.size() != cards_.size()) fail(ErrorKind::InvalidArgument, "column/cardinality mismatch");
  rows_ = columns_.empty() ? 0 : columns_.front().size();
  if (rows_ == 0) fail(ErrorKind::EmptyData, "cannot score an empty table");
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c].size() != rows_) fail(ErrorKind::InvalidArgument, "ragged scoring columns");
    for (int s : columns_[c]) {
      if (s < 0 || s >= cards_[c]) fail(ErrorKind::InvalidArgument, "state out of range");
    }
  }
}

ScoringData ScoringData::resample(std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<std::size_t> picks(rows_);
  for (auto& p : picks) p = rng.below(rows_);
  ScoringData out;
  out.rows_ = rows_;
  out.cards_ = cards_;
  out.columns_.assign(columns_.size(), std::vector<int>(rows_));
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    for (std::size_t r = 0; r < rows_; ++r) out.columns_[c][r] = columns_[c][picks[r]];
  }
  return out;
}

namespace {

double entropy_term(const std::vector<std::uint32_t>& counts, std::size_t configs, int card) {
  double ll = 0.0;
  for (std::size_t pc = 0; pc < configs; ++pc) {
    const std::uint32_t* row = counts.data() + pc * card;
    std::uint64_t total = 0;
    for (int s = 0; s < card; ++s) total += row[s];
    if (total == 0) continue;
    const double log_total = std::log(static_cast<double>(total));
    for (int s = 0; s < card; ++s) {
      if (row[s] > 0) ll += row[s] * (std::log(static_cast<double>(row[s])) - log_total);
    }
  }
  return ll;
}

constexpr std::size_t kDenseLimit = std::size_t{1} << 24;

}  // namespace

ScoreValue family_score(NodeId child, const std::vector<NodeId>& parents, const ScoringData& data) {
  if (data.rows() == 0) fail(ErrorKind::EmptyData, "cannot score an empty table");
  if (child < 0 || child >= data.cols()) fail(ErrorKind::InvalidArgument, "child out of range");
  const int card = data.cardinality(child);
  long double configs_ld = 1;
  for (NodeId p : parents) {
    if (p == child) fail(ErrorKind::InvalidArgument, "a node cannot be its own parent");
    if (p < 0 || p >= data.cols()) fail(ErrorKind::InvalidArgument, "parent out of range");
    configs_ld *= data.cardinality(p);
  }
  ScoreValue score;
  score.parameter_count = static_cast<long long>((card - 1) * configs_ld);

  const auto& child_col = data.column(child);
  const std::size_t n = data.rows();
  std::vector<std::uint64_t> config(n, 0);
  for (NodeId p : parents) {
    const auto& col = data.column(p);
    const std::uint64_t pc = static_cast<std::uint64_t>(data.cardinality(p));
    for (std::size_t r = 0; r < n; ++r) config[r] = config[r] * pc + col[r];
  }

  if (configs_ld * card <= kDenseLimit) {
    const auto configs = static_cast<std::size_t>(configs_ld);
    std::vector<std::uint32_t> counts(configs * card, 0);
    for (std::size_t r = 0; r < n; ++r) ++counts[config[r] * card + child_col[r]];
    score.log_likelihood = entropy_term(counts, configs, card);
  } else {
    // Sparse path for very wide families: only observed configurations count.
    std::unordered_map<std::uint64_t, std::size_t> slot;
    std::vector<std::uint32_t> counts;
    for (std::size_t r = 0; r < n; ++r) {
      auto [it, inserted] = slot.emplace(config[r], slot.size());
      if (inserted) counts.resize(counts.size() + card, 0);
      ++counts[it->second * card + child_col[r]];
    }
    score.log_likelihood = entropy_term(counts, slot.size(), card);
  }
  score.aic = score.log_likelihood - static_cast<double>(score.parameter_count);
  return score;
}

ScoreValue family_score(NodeId child, const std::vector<NodeId>& parents, const DatasetTable& data) {
  return family_score(child, parents, ScoringData(data));
}

ScoreValue aic_score(const Dag& dag, const ScoringData& data) {
  if (dag.node_count() != data.cols()) fail(ErrorKind::InvalidArgument, "DAG and data disagree on size");
  ScoreValue total;
  for (NodeId v = 0; v < dag.node_count(); ++v) {
    ScoreValue s = family_score(v, dag.parents(v), data);
    total.log_likelihood += s.log_likelihood;
    total.parameter_count += s.parameter_count;
    total.aic += s.aic;
  }
  return total;
}

ScoreValue aic_score(const Dag& dag, const DatasetTable& data) {
  return aic_score(dag, ScoringData(data));
}

namespace {

constexpr double kImprovementTolerance = 1e-9;

enum class MoveKind { Add = 0, Delete = 1, Reverse = 2 };

struct Move {
  MoveKind kind = MoveKind::Add;
  NodeId parent = -1;
  NodeId child = -1;
  double delta = kImprovementTolerance;
};

class FamilyCache {
 public:
  explicit FamilyCache(const ScoringData& data) : data_(data), cache_(data.cols()) {}

  double aic(NodeId child, const std::vector<NodeId>& parents) {
    auto& per_child = cache_[child];
    auto it = per_child.find(parents);
    if (it != per_child.end()) return it->second;
    double value = family_score(child, parents, data_).aic;
    per_child.emplace(parents, value);
    return value;
  }

 private:
  const ScoringData& data_;
  std::vector<std::map<std::vector<NodeId>, double>> cache_;
};

std::vector<NodeId> with(std::vector<NodeId> set, NodeId v) {
  set.insert(std::lower_bound(set.begin(), set.end(), v), v);
  return set;
}

std::vector<NodeId> without(std::vector<NodeId> set, NodeId v) {
  set.erase(std::remove(set.begin(), set.end(), v), set.end());
  return set;
}

bool can_add(const Dag& dag, const SearchConstraints& constraints, NodeId p, NodeId c) {
  return p != c && !dag.has_edge(p, c) && constraints.admits(p, c) &&
         static_cast<int>(dag.parents(c).size()) < constraints.max_parents &&
         !dag.would_create_cycle(p, c);
}

bool can_delete(const Dag& dag, const SearchConstraints& constraints, NodeId p, NodeId c) {
  return dag.has_edge(p, c) && !constraints.required.count({p, c});
}

bool can_reverse(const Dag& dag, const SearchConstraints& constraints, NodeId p, NodeId c) {
  return dag.has_edge(p, c) && !constraints.required.count({p, c}) && constraints.admits(c, p) &&
         static_cast<int>(dag.parents(p).size()) < constraints.max_parents &&
         !dag.reversal_creates_cycle(p, c);
}

struct ClimbResult {
  Dag dag;
  double score = 0.0;
};

// Highest-delta improving move; the first in (kind, parent, child) order wins ties.
std::optional<Move> best_move(const Dag& dag, const SearchConstraints& constraints, FamilyCache& cache,
                              const std::vector<double>& family) {
  const int n = dag.node_count();
  Move best;
  bool found = false;
  auto consider = [&](MoveKind kind, NodeId p, NodeId c, double delta) {
    if (delta > best.delta) {
      best = Move{kind, p, c, delta};
      found = true;
    }
  };
  for (NodeId p = 0; p < n; ++p) {
    for (NodeId c = 0; c < n; ++c) {
      if (can_add(dag, constraints, p, c)) {
        consider(MoveKind::Add, p, c, cache.aic(c, with(dag.parents(c), p)) - family[c]);
      }
    }
  }
  for (NodeId p = 0; p < n; ++p) {
    for (NodeId c : dag.children(p)) {
      if (can_delete(dag, constraints, p, c)) {
        consider(MoveKind::Delete, p, c, cache.aic(c, without(dag.parents(c), p)) - family[c]);
      }
    }
  }
  for (NodeId p = 0; p < n; ++p) {
    for (NodeId c : dag.children(p)) {
      if (can_reverse(dag, constraints, p, c)) {
        double delta = cache.aic(c, without(dag.parents(c), p)) - family[c] +
                       cache.aic(p, with(dag.parents(p), c)) - family[p];
        consider(MoveKind::Reverse, p, c, delta);
      }
    }
  }
  if (!found) return std::nullopt;
  return best;
}

std::vector<double> family_scores(const Dag& dag, FamilyCache& cache) {
  std::vector<double> family(dag.node_count());
  for (NodeId v = 0; v < dag.node_count(); ++v) family[v] = cache.aic(v, dag.parents(v));
  return family;
}

// p -> c is covered when c's parents are exactly p's parents plus p.
// Reversing a covered edge keeps the Markov equivalence class.
bool covered(const Dag& dag, NodeId p, NodeId c) {
  const auto& pc = dag.parents(c);
  return pc == with(dag.parents(p), p);
}

constexpr std::size_t kPlateauLimit = 64;

// Walks the equivalence class of a local optimum by covered-edge reversals
// (breadth first, at most kPlateauLimit graphs) and returns the member with
// the best improving move. Score-equivalent scores leave these graphs tied,
// so greedy moves alone cannot cross between them.
std::optional<std::pair<Dag, Move>> escape_plateau(const Dag& optimum, const SearchConstraints& constraints,
                                                   FamilyCache& cache) {
  std::optional<std::pair<Dag, Move>> best;
  std::set<std::vector<Edge>> seen{optimum.edges()};
  std::deque<Dag> queue{optimum};
  while (!queue.empty()) {
    const Dag dag = std::move(queue.front());
    queue.pop_front();
    for (const auto& [p, c] : dag.edges()) {
      if (seen.size() > kPlateauLimit) break;
      if (!covered(dag, p, c) || !can_reverse(dag, constraints, p, c)) continue;
      Dag next = dag;
      next.reverse_edge(p, c);
      if (!seen.insert(next.edges()).second) continue;
      auto move = best_move(next, constraints, cache, family_scores(next, cache));
      if (move && (!best || move->delta > best->second.delta + kImprovementTolerance)) best.emplace(next, *move);
      queue.push_back(std::move(next));
    }
  }
  return best;
}

ClimbResult climb(Dag dag, const SearchConstraints& constraints, FamilyCache& cache,
                  std::vector<double>* score_trace) {
  std::vector<double> family = family_scores(dag, cache);
  auto total = [&] { return std::accumulate(family.begin(), family.end(), 0.0); };
  if (score_trace) score_trace->push_back(total());

  while (true) {
    std::optional<Move> move = best_move(dag, constraints, cache, family);
    if (!move) {
      auto escape = escape_plateau(dag, constraints, cache);
      if (!escape) break;
      dag = std::move(escape->first);
      family = family_scores(dag, cache);
      move = escape->second;
    }
    switch (move->kind) {
      case MoveKind::Add: dag.add_edge(move->parent, move->child); break;
      case MoveKind::Delete: dag.remove_edge(move->parent, move->child); break;
      case MoveKind::Reverse: dag.reverse_edge(move->parent, move->child); break;
    }
    family[move->parent] = cache.aic(move->parent, dag.parents(move->parent));
    family[move->child] = cache.aic(move->child, dag.parents(move->child));
    if (score_trace) score_trace->push_back(total());
  }
  return {std::move(dag), total()};
}

}  // namespace

Dag hill_climb(const ScoringData& data, const SearchConstraints& constraints, std::uint64_t seed,
               int restarts, HillClimbTrace* trace) {
  const int n = data.cols();
  validate_constraints(constraints, n);
  if (restarts < 1) fail(ErrorKind::InvalidArgument, "restarts must be at least 1");
  if (data.rows() == 0) fail(ErrorKind::EmptyData, "cannot learn from an empty table");

  Dag start(n);
  for (const auto& [p, c] : constraints.required) start.add_edge(p, c);

  FamilyCache cache(data);
  std::optional<ClimbResult> best;
  if (trace) *trace = HillClimbTrace{};
  for (int r = 0; r < restarts; ++r) {
    Dag initial = start;
    if (r > 0) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
      for (int k = 0; k < r; ++k) {
        std::vector<Edge> admissible;
        for (NodeId p = 0; p < n; ++p) {
          for (NodeId c = 0; c < n; ++c) {
            if (can_add(initial, constraints, p, c)) admissible.emplace_back(p, c);
          }
        }
        if (admissible.empty()) break;
        auto [p, c] = admissible[rng.below(admissible.size())];
        initial.add_edge(p, c);
      }
    }
    std::vector<double> scores;
    ClimbResult result = climb(std::move(initial), constraints, cache, trace ? &scores : nullptr);
    if (trace) trace->scores.insert(trace->scores.end(), scores.begin(), scores.end());
    if (!best || result.score > best->score) {
      best = std::move(result);
      if (trace) trace->best_restart = r;
    }
  }
  if (trace) trace->best_score = best->score;
  return std::move(best->dag);
}

Dag hill_climb(const DatasetTable& data, const SearchConstraints& constraints, std::uint64_t seed,
               int restarts, HillClimbTrace* trace) {
  return hill_climb(ScoringData(data), constraints, seed, restarts, trace);
}

double EnsembleSummary::frequency(NodeId parent, NodeId child) const {
  if (replicates <= 0) return 0.0;
  auto it = edge_counts.find({parent, child});
  return it == edge_counts.end() ? 0.0 : static_cast<double>(it->second) / replicates;
}

std::map<Edge, double> EnsembleSummary::edge_frequency() const {
  std::map<Edge, double> out;
  for (const auto& [edge, count] : edge_counts) {
    out.emplace(edge, static_cast<double>(count) / replicates);
  }
  return out;
}

EnsembleSummary bootstrap_ensemble(const DatasetTable& data, const SearchConstraints& constraints,
                                   const EnsembleOptions& options) {
  if (options.replicates < 1) fail(ErrorKind::InvalidArgument, "bootstrap count must be at least 1");
  const ScoringData full(data);
  validate_constraints(constraints, full.cols());

  const int b = options.replicates;
  std::vector<int> order = options.execution_order;
  if (order.empty()) {
    order.resize(b);
    std::iota(order.begin(), order.end(), 0);
  } else {
    std::vector<int> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < b; ++i) {
      if (static_cast<int>(sorted.size()) != b || sorted[i] != i) {
        fail(ErrorKind::InvalidArgument, "execution order must be a permutation of the replicates");
      }
    }
  }

  EnsembleSummary summary;
  summary.replicates = b;
  summary.node_count = full.cols();
  summary.replicate_seeds.resize(b);
  for (int i = 0; i < b; ++i) summary.replicate_seeds[i] = derive_seed(options.seed, i);

  std::vector<std::vector<Edge>> results(b);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (true) {
      std::size_t k = next.fetch_add(1);
      if (k >= order.size()) return;
      const int i = order[k];
      try {
        const std::uint64_t s = summary.replicate_seeds[i];
        results[i] = hill_climb(full.resample(s), constraints, s, options.restarts).edges();
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = order.size();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(b));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  for (const auto& edges : results) {
    for (const auto& e : edges) ++summary.edge_counts[e];
  }
  return summary;
}

namespace {

struct Candidate {
  double confidence;
  Edge edge;
};

// Weakest first; ties resolve to the lexicographically smallest edge.
bool weaker(const Candidate& a, const Candidate& b) {
  if (a.confidence != b.confidence) return a.confidence < b.confidence;
  return a.edge < b.edge;
}

}  // namespace

Dag average_structure(const EnsembleSummary& summary, double threshold,
                      const std::optional<SearchConstraints>& constraints) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "threshold must lie in (0, 1]");
  }
  const int n = summary.node_count;
  constexpr double kUnanimous = 1.0 - 1e-12;

  std::map<Edge, double> kept;
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      const double ab = summary.frequency(a, b);
      const double ba = summary.frequency(b, a);
      const double support = ab + ba;
      if (!(support > threshold || support >= kUnanimous)) continue;
      Edge edge = ab >= ba ? Edge{a, b} : Edge{b, a};
      double confidence = std::max(ab, ba);
      if (constraints && !constraints->admits(edge.first, edge.second)) {
        edge = {edge.second, edge.first};
        confidence = std::min(ab, ba);
        if (!constraints->admits(edge.first, edge.second)) continue;
      }
      kept.emplace(edge, confidence);
    }
  }
  auto is_required = [&](const Edge& e) { return constraints && constraints->required.count(e); };

  auto build = [&] {
    std::vector<std::vector<NodeId>> out(n);
    for (const auto& [e, conf] : kept) out[e.first].push_back(e.second);
    return out;
  };
  auto reaches = [&](const std::vector<std::vector<NodeId>>& adj, NodeId from, NodeId to) {
    std::vector<char> seen(n, 0);
    std::vector<NodeId> stack{from};
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      if (seen[v]) continue;
      seen[v] = 1;
      for (NodeId c : adj[v]) stack.push_back(c);
    }
    return false;
  };

  // Drop the weakest edge lying on any directed cycle until none remain.
  while (true) {
    const auto adj = build();
    std::optional<Candidate> weakest;
    for (const auto& [e, conf] : kept) {
      if (is_required(e) || !reaches(adj, e.second, e.first)) continue;
      Candidate cand{conf, e};
      if (!weakest || weaker(cand, *weakest)) weakest = cand;
    }
    if (!weakest) break;
    kept.erase(weakest->edge);
  }

  if (constraints) {
    for (NodeId c = 0; c < n; ++c) {
      while (true) {
        std::vector<Candidate> incoming;
        int count = 0;
        for (const auto& [e, conf] : kept) {
          if (e.second != c) continue;
          ++count;
          if (!is_required(e)) incoming.push_back({conf, e});
        }
        if (count <= constraints->max_parents || incoming.empty()) break;
        kept.erase(std::min_element(incoming.begin(), incoming.end(), weaker)->edge);
      }
    }
  }

  Dag dag(n);
  for (const auto& [e, conf] : kept) dag.add_edge(e.first, e.second);
  if (constraints) {
    for (const auto& e : constraints->required) {
      if (!dag.has_edge(e.first, e.second)) dag.add_edge(e.first, e.second);
    }
  }
  return dag;
}

}  // namespace bnet
