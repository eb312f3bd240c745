#pragma once

#include <string>

#include "opdsim/bifurcation.hpp"
#include "opdsim/engine.hpp"

namespace opdsim {

// Deterministic shortest-roundtrip double formatting shared by all emitters.
std::string format_double(double v);

std::string trajectory_csv(const TrajectoryLog& log);
std::string branch_csv(const EquilibriumBranch& branch);
std::string trash_csv(const TrashField& field);
std::string folds_json(const EquilibriumBranch& branch);

// Run summary: per-agent switch times, totals, crowding series.
std::string summary_json(const Scenario& scenario, const TrajectoryLog& log,
                         double crowding_interval = 1.0);

// Agent paths, patch rectangles and trash markers as a standalone SVG.
std::string trajectory_svg(const Scenario& scenario, const TrajectoryLog& log,
                           const TrashField& final_field);

void write_file(const std::string& path, const std::string& content);

}  // namespace opdsim
