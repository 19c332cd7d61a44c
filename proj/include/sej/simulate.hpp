#pragma once

// Synthetic participants following the decomposed view of the adversary's
// decision: the adversary acts with probability rule(u*, pC*), and each
// participant reports noisy, grid-snapped versions of the true quantities.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sej/dataset.hpp"
#include "sej/recomposition.hpp"

namespace sej {

struct SimulatedQuestion {
  std::string question_id;
  std::string text;
  Domain domain = Domain::Other;
  double u_star = 0.5;   // adversary's status-quo utility (true pB)
  double pc_star = 0.5;  // adversary's success probability (true pC)
};

enum class RevisionPolicy { None, Repair };

struct SimulationConfig {
  int n_participants = 96;
  std::vector<SimulatedQuestion> questions;
  RecompositionRule adversary_rule = RecompositionRule::ara(1.0);
  double noise_width = 0.2;  // total width of the uniform reporting noise
  RevisionPolicy revision = RevisionPolicy::None;
  double repair_fraction = 0.0;
  std::optional<int> knowledge;  // fixed level; uniform on 1..5 when absent
  std::uint64_t seed = 1;

  void validate() const;
  static SimulationConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// Nearest selection on the 10% grid.
int snap_to_grid(double p);

Dataset simulate(const SimulationConfig& config);

}  // namespace sej
