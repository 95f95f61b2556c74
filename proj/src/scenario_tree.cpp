#include "lobexec/scenario_tree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lobexec {

namespace {

constexpr double kProbSumTol = 1e-12;
constexpr double kAssumptionMargin = 1e-12;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

std::string node_str(NodeId id) {
  std::ostringstream os;
  os << "node:" << id;
  return os.str();
}

}  // namespace

ScenarioTree::ScenarioTree(int start, int horizon, std::vector<TreeNode> nodes)
    : start_(start), horizon_(horizon), nodes_(std::move(nodes)) {
  if (horizon_ < start_) fail("horizon must not precede the start time");
  if (nodes_.empty()) fail("tree has no nodes");

  std::sort(nodes_.begin(), nodes_.end(),
            [](const TreeNode& a, const TreeNode& b) { return a.id < b.id; });
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (i > 0 && nodes_[i].id == nodes_[i - 1].id)
      fail("duplicate node id " + std::to_string(nodes_[i].id));
    index_.emplace(nodes_[i].id, i);
    nodes_[i].children.clear();
  }

  for (auto& n : nodes_) {
    if (!(std::isfinite(n.beta) && n.beta > 0.0))
      fail("non-positive beta at " + node_str(n.id));
    if (!(std::isfinite(n.gamma) && n.gamma > 0.0))
      fail("non-positive gamma at " + node_str(n.id));
    if (n.time < start_ || n.time > horizon_)
      fail("time out of range at " + node_str(n.id));
    if (n.is_root()) {
      if (root_ != kNoParent) fail("more than one root node");
      root_ = n.id;
      if (n.time != start_) fail("root node must sit at the start time");
      n.prob = 1.0;
    } else {
      auto it = index_.find(n.parent);
      if (it == index_.end())
        fail("dangling parent reference at " + node_str(n.id));
      const TreeNode& p = nodes_[it->second];
      if (n.time != p.time + 1)
        fail("child level mismatch at " + node_str(n.id));
      if (!(std::isfinite(n.prob) && n.prob > 0.0 && n.prob <= 1.0))
        fail("transition probability out of range at " + node_str(n.id));
    }
  }
  if (root_ == kNoParent) fail("tree has no root node");

  // Children in ascending id order: nodes_ is id-sorted.
  for (const auto& n : nodes_) {
    if (!n.is_root()) nodes_[index_.at(n.parent)].children.push_back(n.id);
  }

  levels_.assign(static_cast<std::size_t>(horizon_ - start_) + 1, {});
  for (const auto& n : nodes_) {
    levels_[static_cast<std::size_t>(n.time - start_)].push_back(n.id);
    max_branching_ = std::max(max_branching_, n.children.size());
    if (n.time == horizon_) {
      if (!n.children.empty()) fail("terminal node with children: " + node_str(n.id));
    } else {
      if (n.children.empty()) fail("non-terminal node without children: " + node_str(n.id));
      double sum = 0.0;
      for (NodeId c : n.children) sum += node(c).prob;
      if (std::abs(sum - 1.0) > kProbSumTol)
        fail("child probabilities do not sum to one at " + node_str(n.id));
    }
  }
}

const TreeNode& ScenarioTree::node(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end())
    throw std::invalid_argument("unknown node id " + std::to_string(id));
  return nodes_[it->second];
}

double ScenarioTree::eta(NodeId child_id) const {
  const TreeNode& c = node(child_id);
  if (c.is_root()) throw std::invalid_argument("root node has no incoming edge");
  return c.gamma / node(c.parent).gamma;
}

const std::vector<NodeId>& ScenarioTree::at_time(int t) const {
  if (t < start_ || t > horizon_)
    throw std::invalid_argument("time out of range: " + std::to_string(t));
  return levels_[static_cast<std::size_t>(t - start_)];
}

ValidationReport validate(const ScenarioTree& tree) {
  ValidationReport report;
  for (const auto& n : tree.nodes()) {
    if (!(n.beta > 0.0))
      report.violations.push_back({node_str(n.id), "beta_positive", n.beta});
    if (!(n.gamma > 0.0))
      report.violations.push_back({node_str(n.id), "gamma_positive", n.gamma});
    if (n.time == tree.horizon()) continue;
    double s = 0.0;
    for (NodeId c : n.children) {
      const TreeNode& ch = tree.node(c);
      s += ch.prob * ch.beta * ch.beta / (ch.gamma / n.gamma);
    }
    if (!(s < 1.0 - kAssumptionMargin))
      report.violations.push_back({node_str(n.id), "structural_assumption", s});
  }
  report.ok = report.violations.empty();
  return report;
}

nlohmann::json tree_to_json(const ScenarioTree& tree) {
  nlohmann::json j;
  j["horizon"] = tree.horizon();
  j["start"] = tree.start();
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes()) {
    nlohmann::json nj;
    nj["id"] = n.id;
    nj["time"] = n.time;
    if (!n.is_root()) {
      nj["parent"] = n.parent;
      nj["prob"] = n.prob;
    }
    nj["beta"] = n.beta;
    nj["gamma"] = n.gamma;
    nodes.push_back(std::move(nj));
  }
  j["nodes"] = std::move(nodes);
  return j;
}

namespace {

double require_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    fail(std::string("missing or non-numeric field '") + key + "'");
  return j.at(key).get<double>();
}

int require_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer())
    fail(std::string("missing or non-integer field '") + key + "'");
  return j.at(key).get<int>();
}

}  // namespace

ScenarioTree build_tree(const nlohmann::json& spec) {
  if (!spec.is_object()) fail("model description must be a JSON object");
  int horizon = require_int(spec, "horizon");
  int start = require_int(spec, "start");
  if (!spec.contains("nodes") || !spec.at("nodes").is_array())
    fail("missing 'nodes' array");
  std::vector<TreeNode> nodes;
  nodes.reserve(spec.at("nodes").size());
  for (const auto& nj : spec.at("nodes")) {
    if (!nj.is_object()) fail("node entries must be objects");
    TreeNode n;
    if (!nj.contains("id") || !nj.at("id").is_number_integer())
      fail("node without integer id");
    n.id = nj.at("id").get<NodeId>();
    n.time = require_int(nj, "time");
    if (nj.contains("parent") && !nj.at("parent").is_null()) {
      if (!nj.at("parent").is_number_integer())
        fail("non-integer parent at " + node_str(n.id));
      n.parent = nj.at("parent").get<NodeId>();
      n.prob = require_number(nj, "prob");
    }
    n.beta = require_number(nj, "beta");
    n.gamma = require_number(nj, "gamma");
    nodes.push_back(std::move(n));
  }
  return ScenarioTree(start, horizon, std::move(nodes));
}

}  // namespace lobexec
