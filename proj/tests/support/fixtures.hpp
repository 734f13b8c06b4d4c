#pragma once

#include <string>

#include "mdg/scenario.hpp"

namespace mdg::test {

inline const mdg::Scenario& fig3() {
  static mdg::Scenario scn =
      mdg::load_scenario_file(std::string(MDG_SCENARIO_DIR) + "/paper_fig3.scn");
  return scn;
}

// Minimal valid document for parser edge-case tests.
inline std::string tiny_scenario() {
  return R"([rooms]
R1

[adjacency]
outside = R1

[devices]
T1 = terminal, R1
S1 = server, R1

[links]
T1 - S1

[services]
S1.web = requires: pw; yields: flag
S1.pub

[credentials]
pw = S1.web

[costs]
up = 0.5
ap = 1.0
max_slices = 10
n_attackers = 2
)";
}

}  // namespace mdg::test
