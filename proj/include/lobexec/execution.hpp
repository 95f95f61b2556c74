#pragma once

#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

#include "lobexec/backward.hpp"
#include "lobexec/scenario_tree.hpp"

namespace lobexec {

/// Optimal-policy trade, post-trade position and pre-trade deviation at every
/// reachable node for one start state. The position is zero at every leaf.
struct StrategyField {
  struct NodeState {
    double trade = 0.0;
    double position_after = 0.0;
    double deviation_before = 0.0;
  };
  NodeId start_node = 0;
  double start_position = 0.0;
  double start_deviation = 0.0;
  std::unordered_map<NodeId, NodeState> states;
};

/// Exact expected cost with the per-leaf breakdown backing it.
struct CostReport {
  struct LeafCost {
    NodeId leaf = 0;
    double path_prob = 0.0;
    double cost = 0.0;
  };
  double expected_cost = 0.0;
  std::vector<LeafCost> per_leaf;  // ascending leaf id
  std::optional<double> price_overlay_offset;
};

/// Unique cost-minimizing trade at the node for position x and pre-trade
/// deviation d; the full remaining position at terminal nodes.
double optimal_trade(const ScenarioTree& tree, NodeId id, const YField& y,
                     double x, double d);

/// Forward sweep from the root applying optimal_trade and the deviation
/// dynamics along every edge.
StrategyField generate_strategy(const ScenarioTree& tree, const YField& y,
                                double x, double d);

/// Expected cost of an arbitrary adapted trade map (one value per node).
/// Leaf trades are overridden to close the position unless
/// `enforce_leaf_closure` is false, in which case a non-closing leaf is
/// rejected. A map missing a required node is rejected as non-adapted input.
CostReport evaluate_strategy(const ScenarioTree& tree,
                             const std::unordered_map<NodeId, double>& trades,
                             double x, double d,
                             bool enforce_leaf_closure = true);

CostReport evaluate_strategy(const ScenarioTree& tree, const StrategyField& field);

/// Post-trade deviation-to-position ratio of the optimal policy; independent
/// of the state. The marker distinguishes the terminal/еdge value from float
/// overflow: is_inf is set at terminal nodes and wherever the denominator
/// vanishes against a nonzero numerator.
struct DeviationPositionRatio {
  double value = 0.0;
  bool is_inf = false;
};

DeviationPositionRatio deviation_position_ratio(const ScenarioTree& tree,
                                                NodeId id, const YField& y);

/// Books the exact cost offset -x * unaffected_price contributed by a
/// martingale unaffected price; per-leaf liquidity costs are unchanged.
CostReport overlay_unaffected_price(CostReport report, double unaffected_price,
                                    double x);

/// CSV columns: node_id,time,trade,position_after,deviation_before
void write_strategy_csv(const ScenarioTree& tree, const StrategyField& field,
                        std::ostream& os);
nlohmann::json cost_report_to_json(const CostReport& report);

}  // namespace lobexec
