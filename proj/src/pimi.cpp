#include "lobexec/pimi.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lobexec {

namespace {

std::string step_str(int k) { return "step:" + std::to_string(k); }

void check_structure(const PIMIModel& m) {
  if (m.horizon < m.start)
    throw std::invalid_argument("horizon must not precede the start time");
  if (m.step_count() != m.horizon - m.start)
    throw std::invalid_argument("step count does not match horizon - start");
  if (!(std::isfinite(m.gamma_start) && m.gamma_start > 0.0))
    throw std::invalid_argument("gamma_start must be positive");
  for (int k = 0; k < m.step_count(); ++k) {
    if (m.steps[k].empty())
      throw std::invalid_argument("empty atom list at " + step_str(k));
    for (const auto& a : m.steps[k]) {
      if (!(std::isfinite(a.weight) && a.weight > 0.0 && a.weight <= 1.0))
        throw std::invalid_argument("weight out of range at " + step_str(k));
      if (!(std::isfinite(a.beta) && a.beta > 0.0))
        throw std::invalid_argument("non-positive beta at " + step_str(k));
      if (!(std::isfinite(a.eta) && a.eta > 0.0))
        throw std::invalid_argument("non-positive eta at " + step_str(k));
    }
  }
}

}  // namespace

ValidationReport validate(const PIMIModel& m) {
  check_structure(m);
  ValidationReport report;
  for (int k = 0; k < m.step_count(); ++k) {
    double wsum = 0.0, s = 0.0;
    for (const auto& a : m.steps[k]) {
      wsum += a.weight;
      s += a.weight * a.beta * a.beta / a.eta;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
      report.violations.push_back({step_str(k), "weight_sum", wsum});
    if (!(s < 1.0 - 1e-12))
      report.violations.push_back({step_str(k), "structural_assumption", s});
  }
  report.ok = report.violations.empty();
  return report;
}

ScenarioTree pimi_to_tree(const PIMIModel& m, std::size_t node_cap) {
  check_structure(m);

  std::size_t total = 1, level = 1;
  for (const auto& atoms : m.steps) {
    if (level > node_cap / atoms.size())
      throw std::domain_error("pimi expansion exceeds the node cap");
    level *= atoms.size();
    total += level;
    if (total > node_cap)
      throw std::domain_error("pimi expansion exceeds the node cap");
  }

  std::vector<TreeNode> nodes;
  nodes.reserve(total);
  TreeNode root;
  root.id = 0;
  root.time = m.start;
  root.beta = 1.0;
  root.gamma = m.gamma_start;
  nodes.push_back(root);

  std::vector<std::size_t> frontier{0};
  NodeId next_id = 1;
  for (int k = 0; k < m.step_count(); ++k) {
    std::vector<std::size_t> next;
    next.reserve(frontier.size() * m.steps[k].size());
    for (std::size_t pi : frontier) {
      const double pg = nodes[pi].gamma;
      for (const auto& a : m.steps[k]) {
        TreeNode c;
        c.id = next_id++;
        c.time = m.start + k + 1;
        c.parent = nodes[pi].id;
        c.prob = a.weight;
        c.beta = a.beta;
        c.gamma = pg * a.eta;
        next.push_back(nodes.size());
        nodes.push_back(c);
      }
    }
    frontier = std::move(next);
  }
  return ScenarioTree(m.start, m.horizon, std::move(nodes));
}

nlohmann::json pimi_to_json(const PIMIModel& m) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& atoms : m.steps) {
    nlohmann::json sj = nlohmann::json::array();
    for (const auto& a : atoms) sj.push_back({a.weight, a.beta, a.eta});
    steps.push_back(std::move(sj));
  }
  nlohmann::json j;
  j["horizon"] = m.horizon;
  j["start"] = m.start;
  j["pimi"] = {{"gamma_start", m.gamma_start}, {"steps", std::move(steps)}};
  return j;
}

PIMIModel build_pimi(const nlohmann::json& spec) {
  if (!spec.is_object() || !spec.contains("pimi") || !spec.at("pimi").is_object())
    throw std::invalid_argument("missing 'pimi' object");
  if (!spec.contains("horizon") || !spec.at("horizon").is_number_integer() ||
      !spec.contains("start") || !spec.at("start").is_number_integer())
    throw std::invalid_argument("missing integer 'horizon'/'start'");
  const auto& pj = spec.at("pimi");
  PIMIModel m;
  m.horizon = spec.at("horizon").get<int>();
  m.start = spec.at("start").get<int>();
  if (!pj.contains("gamma_start") || !pj.at("gamma_start").is_number())
    throw std::invalid_argument("missing numeric 'gamma_start'");
  m.gamma_start = pj.at("gamma_start").get<double>();
  if (!pj.contains("steps") || !pj.at("steps").is_array())
    throw std::invalid_argument("missing 'steps' array");
  for (const auto& sj : pj.at("steps")) {
    if (!sj.is_array()) throw std::invalid_argument("each step must be an array of atoms");
    std::vector<PimiAtom> atoms;
    for (const auto& aj : sj) {
      if (!aj.is_array() || aj.size() != 3 || !aj[0].is_number() ||
          !aj[1].is_number() || !aj[2].is_number())
        throw std::invalid_argument("atoms must be [weight, beta, eta] triples");
      atoms.push_back({aj[0].get<double>(), aj[1].get<double>(), aj[2].get<double>()});
    }
    m.steps.push_back(std::move(atoms));
  }
  check_structure(m);
  return m;
}

}  // namespace lobexec
