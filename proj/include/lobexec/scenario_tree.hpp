#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace lobexec {

using NodeId = std::int64_t;

inline constexpr NodeId kNoParent = -1;

/// One atom of the time-t sigma-algebra. `beta` is the resilience factor
/// realized at this node's time (unused at the root), `gamma` the price
/// impact (inverse book depth) at this node's time.
struct TreeNode {
  NodeId id = 0;
  int time = 0;
  NodeId parent = kNoParent;
  double prob = 1.0;  // transition probability from the parent, 1 at the root
  double beta = 1.0;
  double gamma = 1.0;
  std::vector<NodeId> children;  // ascending id

  bool is_root() const { return parent == kNoParent; }
};

/// Finite filtered probability space carrying the market data.
///
/// Nodes live on levels `start..horizon`; every node at a time before the
/// horizon has at least one child and child transition probabilities sum to
/// one. Trees are immutable after construction and safe to share across
/// threads.
class ScenarioTree {
 public:
  /// Throws std::invalid_argument on any structural defect (dangling parent,
  /// level mismatch, probability out of range, non-positive beta/gamma,
  /// child probabilities not summing to one, ...).
  ScenarioTree(int start, int horizon, std::vector<TreeNode> nodes);

  int start() const { return start_; }
  int horizon() const { return horizon_; }
  /// Number of trading steps strictly after the start time.
  int depth() const { return horizon_ - start_; }

  NodeId root_id() const { return root_; }
  const TreeNode& node(NodeId id) const;
  bool contains(NodeId id) const { return index_.count(id) != 0; }
  bool is_terminal(NodeId id) const { return node(id).time == horizon_; }

  /// Multiplicative impact increment along the edge into `child_id`.
  double eta(NodeId child_id) const;

  std::size_t node_count() const { return nodes_.size(); }
  /// All nodes, ascending id.
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  /// Node ids at time t, ascending.
  const std::vector<NodeId>& at_time(int t) const;
  const std::vector<NodeId>& leaf_ids() const { return at_time(horizon_); }
  std::size_t max_branching() const { return max_branching_; }

 private:
  int start_;
  int horizon_;
  NodeId root_ = kNoParent;
  std::vector<TreeNode> nodes_;
  std::unordered_map<NodeId, std::size_t> index_;
  std::vector<std::vector<NodeId>> levels_;
  std::size_t max_branching_ = 0;
};

struct Violation {
  std::string location;  // "node:<id>" or "step:<k>"
  std::string rule;
  double measured = 0.0;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

/// Checks the backward-recursion well-posedness condition at every
/// non-terminal node: the conditional expectation of beta^2/eta over the
/// children must stay below one with a strict 1e-12 margin. Positivity of
/// beta and gamma is re-checked as well. Failures are reported, not thrown.
ValidationReport validate(const ScenarioTree& tree);

nlohmann::json tree_to_json(const ScenarioTree& tree);

/// Builds a tree from its JSON description (top-level keys `horizon`,
/// `start`, `nodes`). Throws std::invalid_argument on malformed input.
ScenarioTree build_tree(const nlohmann::json& spec);

}  // namespace lobexec
