#pragma once

#include <cstdint>
#include <vector>

#include "opdsim/environment.hpp"
#include "opdsim/integrator.hpp"
#include "opdsim/model.hpp"
#include "opdsim/safety.hpp"

namespace opdsim {

struct AgentSpec {
    AgentParams params;
    double z0 = 0.5;
    double x0 = 0.6;
    double y0 = 0.0;
};

struct Scenario {
    Patch patch1{1, 0.2, 1.0, -0.15, 0.15};
    Patch patch2{2, -1.0, -0.2, -0.15, 0.15};
    std::vector<AgentSpec> agents;
    int trash_patch1 = 0;  // seeded uniform placement counts
    int trash_patch2 = 0;
    std::vector<TrashItem> trash_items;  // explicit extra items
    std::vector<Event> events;
    IntegratorConfig integrator;
    SafetyConfig safety;
    EnvironmentConfig environment;
    std::uint64_t seed = 1;

    void validate() const;
};

struct LogRow {
    double t;
    int agent_id;
    double z, x, y;
    double b, q, u, kx_eff;
    int patch;  // 1, 2, or 0 for transit
    int picked;
};

struct TrajectoryLog {
    int n_agents = 0;
    double dt = 0.0;
    std::vector<LogRow> rows;  // one row per agent at t = 0 and after every step
};

struct RunResult {
    TrajectoryLog log;
    TrashField trash;  // final field with collection timestamps
};

// Full deterministic scenario run. Per step: events, sensing (ascending agent
// id), bias update, field evaluation with effective K_x, safety filtering from
// a common snapshot, RK4 integration, patch-entry/waypoint bookkeeping, log.
TrajectoryLog run(const Scenario& scenario);
RunResult run_full(const Scenario& scenario);

struct SwitchRecord {
    double t;
    int from_patch;
    int to_patch;
};

// Zero-crossing times of z per agent.
std::vector<std::vector<SwitchRecord>> switch_times(const TrajectoryLog& log);

// Mean pairwise inverse distance among agents inside `patch` at time t
// (nearest logged instant); 0 with fewer than two agents present.
double crowding_metric(const TrajectoryLog& log, int patch, double t);

}  // namespace opdsim
