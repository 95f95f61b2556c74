#pragma once

#include <iosfwd>
#include <span>
#include <unordered_map>
#include <vector>

#include "lobexec/pimi.hpp"
#include "lobexec/scenario_tree.hpp"

namespace lobexec {

/// Characterizing process of the execution problem, attached to every node
/// (tree mode) or to every time index (pimi mode). Values lie in (0, 1/2];
/// twice the value is the fraction of the immediate-close cost that optimal
/// execution still pays at zero deviation.
class YField {
 public:
  enum class Mode { Tree, Pimi };

  static YField for_tree(std::unordered_map<NodeId, double> by_node);
  static YField for_pimi(int start, std::vector<double> by_time);

  Mode mode() const { return mode_; }
  double at_node(NodeId id) const;
  double at_time(int t) const;
  /// Value at a tree node under either mode (pimi mode keys on node time).
  double at(const ScenarioTree& tree, NodeId id) const;

  const std::unordered_map<NodeId, double>& by_node() const { return by_node_; }
  const std::vector<double>& by_time() const { return by_time_; }
  int start_time() const { return start_; }

 private:
  Mode mode_ = Mode::Tree;
  std::unordered_map<NodeId, double> by_node_;
  std::vector<double> by_time_;
  int start_ = 0;
};

/// Conditional one-step aggregates over the children of a non-terminal node,
/// with eta taken relative to the node's own gamma. These drive the backward
/// recursion, the optimal trade, the deviation-position ratio and the event
/// classifications.
struct OneStepStats {
  double exp_eta_y = 0.0;   // E[eta Y']
  double exp_beta = 0.0;    // E[beta]
  double exp_y = 0.0;       // E[Y']
  double trade_num = 0.0;   // E[Y' (beta - eta)]
  double trade_den = 0.0;   // E[(Y'/eta)(beta - eta)^2 + (1 - beta^2/eta)/2]
  double one_go_lhs = 0.0;  // E[(Y' - 1/2) beta^2/eta - Y' beta + 1/2]
  double trade_den_scale = 0.0;  // sum of absolute summands of trade_den
  double trade_num_scale = 0.0;
  double one_go_scale = 0.0;
};

OneStepStats one_step_stats(const ScenarioTree& tree, NodeId id, const YField& y);

/// Backward sweep over the tree: 1/2 at every leaf, then level by level the
/// one-step recursion. Values a hair above 1/2 from rounding are snapped to
/// 1/2; anything further out throws. Throws std::domain_error when the
/// recursion denominator vanishes (validation skipped or marginal model).
YField compute_y(const ScenarioTree& tree);

/// Deterministic per-time recursion for pimi models; agrees with compute_y
/// on the expanded tree at every node.
YField compute_y_pimi(const PIMIModel& model);

/// Reciprocal cost index for deterministic per-step (beta, eta) sequences
/// with beta^2 < eta, evaluated by the literal product/sum formula.
/// Index k of the result corresponds to k steps before the horizon counted
/// from the front: result.front() is the earliest time, result.back() == 1.
std::vector<double> compute_z_closed_form(std::span<const double> beta,
                                          std::span<const double> eta);

/// Coefficients of the one-step cost-to-go xi -> a xi^2 + b xi + c at a
/// non-terminal node for state (x, d); a > 0 on validated trees.
struct QuadCoeffs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

QuadCoeffs quad_coeffs(const ScenarioTree& tree, NodeId id, const YField& y,
                       double x, double d);

/// Minimal expected cost of closing position x with pre-trade deviation d
/// starting at the given node.
double value_function(const ScenarioTree& tree, NodeId id, const YField& y,
                      double x, double d);

/// min over k in {node time, ..., horizon} of E[gamma_k | node] / (2 gamma),
/// an upper bound for the characterizing value at the node.
double y_upper_bound(const ScenarioTree& tree, NodeId id);

/// CSV columns: node_id,time,gamma,Y
void write_y_csv(const ScenarioTree& tree, const YField& y, std::ostream& os);
nlohmann::json y_to_json(const ScenarioTree& tree, const YField& y);

}  // namespace lobexec
