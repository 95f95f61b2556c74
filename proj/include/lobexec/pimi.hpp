#pragma once

#include <cstddef>
#include <vector>

#include "lobexec/scenario_tree.hpp"

namespace lobexec {

struct PimiAtom {
  double weight = 1.0;
  double beta = 1.0;
  double eta = 1.0;
};

/// Market model whose per-step resilience and impact increments are drawn
/// independently of the past. `steps[k]` is the finite distribution of
/// (beta, eta) realized at time `start + k + 1`; the characterizing process
/// does not depend on which eta path is realized.
struct PIMIModel {
  int start = 0;
  int horizon = 0;
  double gamma_start = 1.0;
  std::vector<std::vector<PimiAtom>> steps;

  int step_count() const { return static_cast<int>(steps.size()); }
};

/// Reports per step: weights summing to one within 1e-12 and the
/// well-posedness condition sum w * beta^2/eta < 1 - 1e-12.
ValidationReport validate(const PIMIModel& model);

/// Expands the model into the product scenario tree: every node of a level
/// carries the same child distribution, gamma multiplies by the eta atom
/// along each edge. Throws std::domain_error when the expansion would exceed
/// `node_cap` nodes.
ScenarioTree pimi_to_tree(const PIMIModel& model, std::size_t node_cap = 1000000);

nlohmann::json pimi_to_json(const PIMIModel& model);

/// Parses {"horizon", "start", "pimi": {"gamma_start", "steps"}}. Throws
/// std::invalid_argument on malformed input, non-positive atom values or
/// weights outside (0,1].
PIMIModel build_pimi(const nlohmann::json& spec);

}  // namespace lobexec
