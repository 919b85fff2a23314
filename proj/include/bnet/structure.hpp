#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "bnet/dag.hpp"
#include "bnet/table.hpp"

namespace bnet {

struct SearchConstraints {
  int max_parents = 4;
  std::set<Edge> forbidden;
  std::set<Edge> required;
  // Empty, or one tier per node; edges may only point to an equal or later tier.
  std::vector<int> tier_of;

  bool admits(NodeId parent, NodeId child) const;
};

// Throws ConstraintUnsatisfiable when the required edges conflict with the
// forbidden set, the tiers, max_parents, or each other.
void validate_constraints(const SearchConstraints& constraints, int node_count);

// AIC in the maximization convention: aic = log_likelihood - parameter_count.
struct ScoreValue {
  double log_likelihood = 0.0;
  long long parameter_count = 0;
  double aic = 0.0;
};

// Counting view of a table with no missing cells, laid out column-major.
class ScoringData {
 public:
  // Throws EmptyData, and InvalidArgument when a cell is missing.
  ScoringData() = default;
  explicit ScoringData(const DatasetTable& table);
  ScoringData(std::vector<std::vector<int>> columns, std::vector<int> cardinalities);

  std::size_t rows() const noexcept { return rows_; }
  int cols() const noexcept { return static_cast<int>(columns_.size()); }
  const std::vector<int>& column(int c) const { return columns_.at(c); }
  int cardinality(int c) const { return cards_.at(c); }

  // Bootstrap resample (with replacement) of the rows.
  ScoringData resample(std::uint64_t seed) const;

 private:
  std::vector<std::vector<int>> columns_;
  std::vector<int> cards_;
  std::size_t rows_ = 0;
};

ScoreValue family_score(NodeId child, const std::vector<NodeId>& parents, const ScoringData& data);
ScoreValue family_score(NodeId child, const std::vector<NodeId>& parents, const DatasetTable& data);
ScoreValue aic_score(const Dag& dag, const ScoringData& data);
ScoreValue aic_score(const Dag& dag, const DatasetTable& data);

struct HillClimbTrace {
  // Per restart: the starting score, then the total after each accepted move.
  std::vector<double> scores;
  double best_score = 0.0;
  int best_restart = 0;
};

// Greedy add/delete/reverse ascent. At a local optimum the search also walks
// the optimum's equivalence class through covered-edge reversals (up to 64
// graphs) and resumes from the member with the best improving move, if any.
// Restart 0 starts from the empty graph (plus required edges); restart r > 0
// first applies r random admissible additions. Returns the best local
// optimum over `restarts` starts.
Dag hill_climb(const ScoringData& data, const SearchConstraints& constraints, std::uint64_t seed,
               int restarts = 1, HillClimbTrace* trace = nullptr);
Dag hill_climb(const DatasetTable& data, const SearchConstraints& constraints, std::uint64_t seed,
               int restarts = 1, HillClimbTrace* trace = nullptr);

struct EnsembleSummary {
  int replicates = 0;
  int node_count = 0;
  std::map<Edge, int> edge_counts;
  std::vector<std::uint64_t> replicate_seeds;

  double frequency(NodeId parent, NodeId child) const;
  // Only edges observed at least once.
  std::map<Edge, double> edge_frequency() const;

  friend bool operator==(const EnsembleSummary&, const EnsembleSummary&) = default;
};

struct EnsembleOptions {
  int replicates = 101;
  int restarts = 1;
  std::uint64_t seed = 0;
  // 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
  // Replicate execution order; empty means ascending. The summary does not
  // depend on it.
  std::vector<int> execution_order;
};

// Replicate i resamples with derive_seed(seed, i) and runs hill_climb.
EnsembleSummary bootstrap_ensemble(const DatasetTable& data, const SearchConstraints& constraints,
                                   const EnsembleOptions& options);

// Keeps a skeleton edge iff f(a->b) + f(b->a) exceeds `threshold` (a
// unanimous edge always qualifies); orientation follows the larger frequency,
// ties to the lower-index parent. Cycles and max_parents overflows are then
// repaired by dropping the weakest offending edge.
Dag average_structure(const EnsembleSummary& summary, double threshold = 0.5,
                      const std::optional<SearchConstraints>& constraints = std::nullopt);

}  // namespace bnet
