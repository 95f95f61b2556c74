#include "lobexec/backward.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace lobexec {

namespace {

constexpr double kDenGuard = 1e-14;
constexpr double kHalfSnap = 1e-12;

double snap_to_range(double y, const std::string& where) {
  if (y > 0.5) {
    if (y > 0.5 + kHalfSnap)
      throw std::domain_error("characterizing value above 1/2 at " + where);
    y = 0.5;
  }
  if (!(y > 0.0))
    throw std::domain_error("characterizing value not positive at " + where);
  return y;
}

template <typename Lookup>
OneStepStats gather_stats(const ScenarioTree& tree, const TreeNode& n,
                          Lookup&& y_child) {
  OneStepStats s;
  for (NodeId cid : n.children) {
    const TreeNode& c = tree.node(cid);
    const double w = c.prob;
    const double eta = c.gamma / n.gamma;
    const double beta = c.beta;
    const double yc = y_child(c);
    const double diff = beta - eta;
    const double b2e = beta * beta / eta;
    s.exp_eta_y += w * eta * yc;
    s.exp_beta += w * beta;
    s.exp_y += w * yc;
    s.trade_num += w * yc * diff;
    s.trade_den += w * (yc / eta * diff * diff + 0.5 * (1.0 - b2e));
    s.one_go_lhs += w * ((yc - 0.5) * b2e - yc * beta + 0.5);
    s.trade_den_scale += w * (yc / eta * diff * diff + 0.5 * (1.0 + b2e));
    s.trade_num_scale += w * yc * (beta + eta);
    s.one_go_scale += w * ((0.5 - yc) * b2e + yc * beta + 0.5);
  }
  return s;
}

}  // namespace

YField YField::for_tree(std::unordered_map<NodeId, double> by_node) {
  YField f;
  f.mode_ = Mode::Tree;
  f.by_node_ = std::move(by_node);
  return f;
}

YField YField::for_pimi(int start, std::vector<double> by_time) {
  YField f;
  f.mode_ = Mode::Pimi;
  f.start_ = start;
  f.by_time_ = std::move(by_time);
  return f;
}

double YField::at_node(NodeId id) const {
  auto it = by_node_.find(id);
  if (it == by_node_.end())
    throw std::invalid_argument("no characterizing value for node " + std::to_string(id));
  return it->second;
}

double YField::at_time(int t) const {
  auto i = static_cast<std::size_t>(t - start_);
  if (t < start_ || i >= by_time_.size())
    throw std::invalid_argument("no characterizing value for time " + std::to_string(t));
  return by_time_[i];
}

double YField::at(const ScenarioTree& tree, NodeId id) const {
  return mode_ == Mode::Tree ? at_node(id) : at_time(tree.node(id).time);
}

OneStepStats one_step_stats(const ScenarioTree& tree, NodeId id, const YField& y) {
  const TreeNode& n = tree.node(id);
  if (tree.is_terminal(id))
    throw std::invalid_argument("one_step_stats requires a non-terminal node");
  return gather_stats(tree, n, [&](const TreeNode& c) { return y.at(tree, c.id); });
}

YField compute_y(const ScenarioTree& tree) {
  std::unordered_map<NodeId, double> y;
  y.reserve(tree.node_count());
  for (int t = tree.horizon(); t >= tree.start(); --t) {
    for (NodeId id : tree.at_time(t)) {
      if (t == tree.horizon()) {
        y[id] = 0.5;
        continue;
      }
      const TreeNode& n = tree.node(id);
      OneStepStats s =
          gather_stats(tree, n, [&](const TreeNode& c) { return y.at(c.id); });
      if (!(s.trade_den > kDenGuard * std::max(1.0, s.trade_den_scale)))
        throw std::domain_error("recursion denominator vanished at node:" +
                                std::to_string(id));
      double v = s.exp_eta_y - s.trade_num * s.trade_num / s.trade_den;
      y[id] = snap_to_range(v, "node:" + std::to_string(id));
    }
  }
  return YField::for_tree(std::move(y));
}

YField compute_y_pimi(const PIMIModel& m) {
  const int n = m.step_count();
  std::vector<double> y(static_cast<std::size_t>(n) + 1);
  y[n] = 0.5;
  for (int k = n - 1; k >= 0; --k) {
    double eb = 0.0, ee = 0.0, ea = 0.0, ev = 0.0, ev_scale = 0.0;
    for (const auto& a : m.steps[k]) {
      eb += a.weight * a.beta;
      ee += a.weight * a.eta;
      ea += a.weight * a.beta * a.beta / a.eta;
      const double diff = a.beta - a.eta;
      ev += a.weight * diff * diff / a.eta;
    }
    ev_scale = ev + 0.5 * (1.0 + ea);
    const double yn = y[k + 1];
    const double den = yn * ev + 0.5 * (1.0 - ea);
    if (!(den > kDenGuard * std::max(1.0, ev_scale)))
      throw std::domain_error("recursion denominator vanished at step:" +
                              std::to_string(k));
    double v = ee * yn - yn * yn * (eb - ee) * (eb - ee) / den;
    y[k] = snap_to_range(v, "step:" + std::to_string(k));
  }
  return YField::for_pimi(m.start, std::move(y));
}

std::vector<double> compute_z_closed_form(std::span<const double> beta,
                                          std::span<const double> eta) {
  if (beta.size() != eta.size())
    throw std::invalid_argument("beta and eta sequences must have equal length");
  const std::size_t n = beta.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(beta[i] > 0.0 && eta[i] > 0.0))
      throw std::invalid_argument("beta and eta must be positive");
    if (!(beta[i] * beta[i] < eta[i]))
      throw std::invalid_argument("beta^2 < eta required at step " + std::to_string(i));
  }
  std::vector<double> z(n + 1);
  z[n] = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    double prod = 1.0, acc = 0.0;
    for (std::size_t j = k; j < n; ++j) {
      prod /= eta[j];
      const double diff = eta[j] - beta[j];
      acc += prod * diff * diff / (eta[j] - beta[j] * beta[j]);
    }
    z[k] = prod + acc;
  }
  return z;
}

QuadCoeffs quad_coeffs(const ScenarioTree& tree, NodeId id, const YField& y,
                       double x, double d) {
  const TreeNode& n = tree.node(id);
  if (tree.is_terminal(id))
    throw std::invalid_argument("quad_coeffs requires a non-terminal node");
  QuadCoeffs q;
  double a_over_gamma = 0.0;
  for (NodeId cid : n.children) {
    const TreeNode& c = tree.node(cid);
    const double w = c.prob;
    const double eta = c.gamma / n.gamma;
    const double beta = c.beta;
    const double yc = y.at(tree, cid);
    const double diff = beta - eta;
    const double b2e = beta * beta / eta;
    const double impulse = beta * d - c.gamma * x;
    a_over_gamma += w * (yc / eta * diff * diff + 0.5 * (1.0 - b2e));
    q.b += w * (d * (1.0 - b2e) + 2.0 * yc * (beta / eta - 1.0) * impulse);
    q.c += w * (yc / c.gamma * impulse * impulse -
                d * d * beta * beta / (2.0 * c.gamma));
  }
  q.a = n.gamma * a_over_gamma;
  if (!(q.a > 0.0))
    throw std::domain_error("non-positive quadratic coefficient at node:" +
                            std::to_string(id));
  return q;
}

double value_function(const ScenarioTree& tree, NodeId id, const YField& y,
                      double x, double d) {
  const TreeNode& n = tree.node(id);
  const double yn = y.at(tree, id);
  const double spread = d - n.gamma * x;
  return yn / n.gamma * spread * spread - d * d / (2.0 * n.gamma);
}

double y_upper_bound(const ScenarioTree& tree, NodeId id) {
  const TreeNode& start = tree.node(id);
  std::vector<std::pair<NodeId, double>> frontier{{id, 1.0}};
  double best = std::numeric_limits<double>::infinity();
  for (int t = start.time;; ++t) {
    double e = 0.0;
    for (const auto& [nid, pr] : frontier) e += pr * tree.node(nid).gamma;
    best = std::min(best, e);
    if (t == tree.horizon()) break;
    std::vector<std::pair<NodeId, double>> next;
    next.reserve(frontier.size() * 2);
    for (const auto& [nid, pr] : frontier)
      for (NodeId cid : tree.node(nid).children)
        next.emplace_back(cid, pr * tree.node(cid).prob);
    frontier = std::move(next);
  }
  return best / (2.0 * start.gamma);
}

void write_y_csv(const ScenarioTree& tree, const YField& y, std::ostream& os) {
  os << "node_id,time,gamma,Y\n";
  os << std::setprecision(17);
  for (const auto& n : tree.nodes())
    os << n.id << ',' << n.time << ',' << n.gamma << ',' << y.at(tree, n.id)
       << '\n';
}

nlohmann::json y_to_json(const ScenarioTree& tree, const YField& y) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& n : tree.nodes())
    rows.push_back({{"node_id", n.id},
                    {"time", n.time},
                    {"gamma", n.gamma},
                    {"Y", y.at(tree, n.id)}});
  return rows;
}

}  // namespace lobexec
