#include "bnet/dag.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <string>

#include "bnet/error.hpp"

namespace bnet {

namespace {

void insert_sorted(std::vector<NodeId>& list, NodeId value) {
  list.insert(std::lower_bound(list.begin(), list.end(), value), value);
}

void erase_sorted(std::vector<NodeId>& list, NodeId value) {
  auto it = std::lower_bound(list.begin(), list.end(), value);
  if (it != list.end() && *it == value) list.erase(it);
}

}  // namespace

Dag::Dag(int node_count) {
  if (node_count < 0) fail(ErrorKind::InvalidArgument, "negative node count");
  parents_.resize(node_count);
  children_.resize(node_count);
}

void Dag::check_node(NodeId node) const {
  if (node < 0 || node >= node_count()) {
    fail(ErrorKind::InvalidArgument, "node " + std::to_string(node) + " out of range");
  }
}

bool Dag::has_edge(NodeId parent, NodeId child) const {
  check_node(parent);
  check_node(child);
  return std::binary_search(parents_[child].begin(), parents_[child].end(), parent);
}

bool Dag::has_path(NodeId from, NodeId to) const {
  check_node(from);
  check_node(to);
  if (from == to) return true;
  std::vector<char> seen(node_count(), 0);
  std::vector<NodeId> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    NodeId node = stack.back();
    stack.pop_back();
    for (NodeId next : children_[node]) {
      if (next == to) return true;
      if (!seen[next]) {
        seen[next] = 1;
        stack.push_back(next);
      }
    }
  }
  return false;
}

bool Dag::would_create_cycle(NodeId parent, NodeId child) const {
  return has_path(child, parent);
}

bool Dag::reversal_creates_cycle(NodeId parent, NodeId child) const {
  // After removing parent->child, adding child->parent closes a cycle iff
  // parent still reaches child through some other path.
  std::vector<char> seen(node_count(), 0);
  std::vector<NodeId> stack;
  for (NodeId next : children_[parent]) {
    if (next != child && !seen[next]) {
      seen[next] = 1;
      stack.push_back(next);
    }
  }
  while (!stack.empty()) {
    NodeId node = stack.back();
    stack.pop_back();
    if (node == child) return true;
    for (NodeId next : children_[node]) {
      if (!seen[next]) {
        seen[next] = 1;
        stack.push_back(next);
      }
    }
  }
  return false;
}

void Dag::add_edge(NodeId parent, NodeId child) {
  check_node(parent);
  check_node(child);
  if (parent == child) {
    fail(ErrorKind::CycleError, "self-loop on node " + std::to_string(parent));
  }
  if (has_edge(parent, child)) {
    fail(ErrorKind::DuplicateEdge, "edge " + std::to_string(parent) + "->" +
                                       std::to_string(child) + " already present");
  }
  if (would_create_cycle(parent, child)) {
    fail(ErrorKind::CycleError, "edge " + std::to_string(parent) + "->" +
                                    std::to_string(child) + " closes a directed cycle");
  }
  insert_sorted(parents_[child], parent);
  insert_sorted(children_[parent], child);
  ++edge_count_;
}

void Dag::remove_edge(NodeId parent, NodeId child) {
  if (!has_edge(parent, child)) {
    fail(ErrorKind::InvalidArgument, "edge " + std::to_string(parent) + "->" +
                                         std::to_string(child) + " not present");
  }
  erase_sorted(parents_[child], parent);
  erase_sorted(children_[parent], child);
  --edge_count_;
}

void Dag::reverse_edge(NodeId parent, NodeId child) {
  if (!has_edge(parent, child)) {
    fail(ErrorKind::InvalidArgument, "edge " + std::to_string(parent) + "->" +
                                         std::to_string(child) + " not present");
  }
  if (reversal_creates_cycle(parent, child)) {
    fail(ErrorKind::CycleError, "reversing " + std::to_string(parent) + "->" +
                                    std::to_string(child) + " closes a directed cycle");
  }
  remove_edge(parent, child);
  add_edge(child, parent);
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeId p = 0; p < node_count(); ++p) {
    for (NodeId c : children_[p]) out.emplace_back(p, c);
  }
  return out;
}

std::vector<NodeId> topological_order(const Dag& dag) {
  const int n = dag.node_count();
  std::vector<int> indegree(n);
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId v = 0; v < n; ++v) {
    indegree[v] = static_cast<int>(dag.parents(v).size());
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<NodeId> order;
  order.reserve(n);
  while (!ready.empty()) {
    NodeId v = ready.top();
    ready.pop();
    order.push_back(v);
    for (NodeId c : dag.children(v)) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  return order;
}

bool d_separated(const Dag& dag, const std::vector<NodeId>& x,
                 const std::vector<NodeId>& y, const std::vector<NodeId>& z) {
  const int n = dag.node_count();
  enum : char { kNone = 0, kX = 1, kY = 2, kZ = 4 };
  std::vector<char> role(n, kNone);
  auto mark = [&](const std::vector<NodeId>& set, char flag) {
    for (NodeId v : set) {
      if (v < 0 || v >= n) fail(ErrorKind::InvalidArgument, "node out of range");
      if (role[v] != kNone && role[v] != flag) {
        fail(ErrorKind::OverlapError, "node sets intersect at node " + std::to_string(v));
      }
      role[v] = flag;
    }
  };
  mark(x, kX);
  mark(y, kY);
  mark(z, kZ);

  // Ancestors of z (inclusive): a collider is open iff it is in this set.
  std::vector<char> z_ancestor(n, 0);
  std::vector<NodeId> stack(z.begin(), z.end());
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    if (z_ancestor[v]) continue;
    z_ancestor[v] = 1;
    for (NodeId p : dag.parents(v)) stack.push_back(p);
  }

  // Traverse (node, direction) states; `up` means we arrived from a child.
  std::vector<char> visited_up(n, 0), visited_down(n, 0);
  std::vector<std::pair<NodeId, bool>> frontier;
  for (NodeId v : x) frontier.emplace_back(v, true);
  while (!frontier.empty()) {
    auto [v, up] = frontier.back();
    frontier.pop_back();
    auto& visited = up ? visited_up : visited_down;
    if (visited[v]) continue;
    visited[v] = 1;
    const bool observed = role[v] == kZ;
    if (!observed && role[v] == kY) return false;
    if (up) {
      if (!observed) {
        for (NodeId p : dag.parents(v)) frontier.emplace_back(p, true);
        for (NodeId c : dag.children(v)) frontier.emplace_back(c, false);
      }
    } else {
      if (!observed) {
        for (NodeId c : dag.children(v)) frontier.emplace_back(c, false);
      }
      if (z_ancestor[v]) {
        for (NodeId p : dag.parents(v)) frontier.emplace_back(p, true);
      }
    }
  }
  return true;
}

}  // namespace bnet
