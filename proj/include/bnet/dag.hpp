#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace bnet {

using NodeId = int;
using Edge = std::pair<NodeId, NodeId>;  // (parent, child)

// Directed acyclic graph over dense node ids [0, node_count). Every mutation
// re-establishes acyclicity; parent and child lists stay sorted ascending.
class Dag {
 public:
  Dag() = default;
  explicit Dag(int node_count);

  int node_count() const noexcept { return static_cast<int>(parents_.size()); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  const std::vector<NodeId>& parents(NodeId node) const { return parents_.at(node); }
  const std::vector<NodeId>& children(NodeId node) const { return children_.at(node); }

  bool has_edge(NodeId parent, NodeId child) const;
  // True iff a directed path from `from` to `to` exists (a node reaches itself).
  bool has_path(NodeId from, NodeId to) const;
  bool would_create_cycle(NodeId parent, NodeId child) const;
  // Cycle check for reversing an existing edge parent->child.
  bool reversal_creates_cycle(NodeId parent, NodeId child) const;

  // Throws CycleError, DuplicateEdge or InvalidArgument.
  void add_edge(NodeId parent, NodeId child);
  void remove_edge(NodeId parent, NodeId child);
  void reverse_edge(NodeId parent, NodeId child);

  // Sorted lexicographically by (parent, child).
  std::vector<Edge> edges() const;

  friend bool operator==(const Dag&, const Dag&) = default;

 private:
  void check_node(NodeId node) const;

  std::vector<std::vector<NodeId>> parents_;
  std::vector<std::vector<NodeId>> children_;
  std::size_t edge_count_ = 0;
};

// Kahn's algorithm with ascending-index tie-break.
std::vector<NodeId> topological_order(const Dag& dag);

// Bayes-ball reachability over active trails. Throws OverlapError when the
// three sets intersect.
bool d_separated(const Dag& dag, const std::vector<NodeId>& x,
                 const std::vector<NodeId>& y, const std::vector<NodeId>& z);

}  // namespace bnet
