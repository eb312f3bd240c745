#include "opdsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opdsim {

void Scenario::validate() const {
    if (agents.empty()) throw std::invalid_argument("scenario has no agents");
    integrator.validate();
    environment.validate();
    if (patch1.id != 1 || patch2.id != 2) throw std::invalid_argument("patch ids must be 1 and 2");
    const Patch mirror = patch1.mirrored();
    if (std::fabs(mirror.x_min - patch2.x_min) > 1e-12 ||
        std::fabs(mirror.x_max - patch2.x_max) > 1e-12 ||
        std::fabs(mirror.y_min - patch2.y_min) > 1e-12 ||
        std::fabs(mirror.y_max - patch2.y_max) > 1e-12)
        throw std::invalid_argument("patch 2 must mirror patch 1 across x = 0");
    for (const auto& a : agents) {
        a.params.validate();
        if (a.z0 == 0.0 || a.x0 == 0.0 || (a.z0 > 0) != (a.x0 > 0))
            throw std::invalid_argument("initial opinion and x must have matching nonzero signs");
        if (std::fabs(a.params.l - patch1.x_max) > 1e-9)
            throw std::invalid_argument("patch outer edge must sit at distance l from x = 0");
    }
    for (const auto& it : trash_items)
        if (!patch1.contains(it.x, it.y) && !patch2.contains(it.x, it.y))
            throw std::invalid_argument("trash item outside both patches");
    if (trash_patch1 < 0 || trash_patch2 < 0)
        throw std::invalid_argument("trash counts must be non-negative");
    for (const auto& ev : events) {
        if (ev.time < 0.0) throw std::invalid_argument("event time must be >= 0");
        if ((ev.kind == EventKind::set_u || ev.kind == EventKind::set_kx) &&
            (ev.agent < 0 || ev.agent >= (int)agents.size()))
            throw std::invalid_argument("event agent index out of range");
        if (ev.kind == EventKind::add_trash && ev.patch != 1 && ev.patch != 2)
            throw std::invalid_argument("add_trash patch must be 1 or 2");
    }
}

namespace {

struct AgentRuntime {
    AgentParams nominal;
    AgentState state;
    EfficiencyAccount acct;
    EffectiveKxTracker tracker;
    int stall_count = 0;
};

int region_code(PatchRegion r) {
    switch (r) {
        case PatchRegion::patch1: return 1;
        case PatchRegion::patch2: return 2;
        default: return 0;
    }
}

}  // namespace

RunResult run_full(const Scenario& scenario) {
    scenario.validate();
    SimRng rng(scenario.seed);

    TrashField field;
    field.items = scenario.trash_items;
    field.scatter(scenario.patch1, scenario.trash_patch1, rng);
    field.scatter(scenario.patch2, scenario.trash_patch2, rng);

    const Patch& p1 = scenario.patch1;
    const Patch& p2 = scenario.patch2;
    const IntegratorConfig& cfg = scenario.integrator;
    const EnvironmentConfig& env = scenario.environment;
    const int n = static_cast<int>(scenario.agents.size());

    std::vector<AgentRuntime> ag(n);
    for (int i = 0; i < n; ++i) {
        const AgentSpec& sp = scenario.agents[i];
        ag[i].nominal = sp.params;
        ag[i].state.z = sp.z0;
        ag[i].state.x = sp.x0;
        ag[i].state.y = sp.y0;
        ag[i].state.y_bar = sp.y0;
        ag[i].tracker = EffectiveKxTracker(scenario.safety.window_steps);
        ag[i].acct.q0 = env.q0;
        ag[i].acct.epsilon = env.epsilon;
        ag[i].acct.q_min = env.q_min;
        const PatchRegion reg = classify_position(sp.x0, sp.y0, p1, p2);
        const int home = reg == PatchRegion::transit ? (sp.z0 > 0 ? 1 : 2) : region_code(reg);
        ag[i].acct.account_patch = home;
        ag[i].acct.s = home == 1 ? 1.0 : -1.0;
    }

    // Initial waypoints for committed agents, ascending id.
    for (int i = 0; i < n; ++i) {
        if (committed(ag[i].state, ag[i].nominal)) {
            const int fav = ag[i].state.z > 0 ? 1 : 2;
            ag[i].state = resample_waypoint(ag[i].state, fav == 1 ? p1 : p2, rng);
        }
    }

    std::vector<Event> events = scenario.events;
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.time < b.time; });
    std::size_t next_event = 0;

    const long nsteps = std::lround(cfg.t_end / cfg.dt);
    TrajectoryLog log;
    log.n_agents = n;
    log.dt = cfg.dt;
    log.rows.reserve(static_cast<std::size_t>(n) * (nsteps + 1));

    auto log_all = [&](double t, const std::vector<int>& picked) {
        for (int i = 0; i < n; ++i) {
            LogRow row;
            row.t = t;
            row.agent_id = i;
            row.z = ag[i].state.z;
            row.x = ag[i].state.x;
            row.y = ag[i].state.y;
            row.b = bias_from_efficiency(ag[i].acct);
            row.q = efficiency(ag[i].acct);
            row.u = ag[i].nominal.u;
            row.kx_eff = ag[i].tracker.effective(ag[i].nominal.k_x);
            row.patch = region_code(classify_position(ag[i].state.x, ag[i].state.y, p1, p2));
            row.picked = picked.empty() ? 0 : picked[i];
            log.rows.push_back(row);
        }
    };
    log_all(0.0, {});

    std::vector<int> picked(n, 0);
    std::vector<XY> snapshot(n), cmd(n), dv(n);
    std::vector<double> bias(n), kx_eff(n), ratio(n);

    for (long step_idx = 0; step_idx < nsteps; ++step_idx) {
        const double t = step_idx * cfg.dt;

        // (1) due events
        while (next_event < events.size() && events[next_event].time <= t + 1e-12) {
            const Event& ev = events[next_event++];
            switch (ev.kind) {
                case EventKind::set_u: ag[ev.agent].nominal.u = ev.value; break;
                case EventKind::set_kx: ag[ev.agent].nominal.k_x = ev.value; break;
                case EventKind::add_trash:
                    field.scatter(ev.patch == 1 ? p1 : p2, ev.count, rng);
                    break;
            }
        }

        // (2) sensing, ascending agent id
        for (int i = 0; i < n; ++i) {
            picked[i] = sense_and_collect(ag[i].state.x, ag[i].state.y, field,
                                          env.pickup_radius, p1, p2, t);
            ag[i].acct.collected_count += picked[i];
        }

        // (3) bias and effective K_x
        for (int i = 0; i < n; ++i) {
            bias[i] = bias_from_efficiency(ag[i].acct);
            kx_eff[i] = ag[i].tracker.effective(ag[i].nominal.k_x);
        }

        // (4) commanded velocities from a common snapshot
        for (int i = 0; i < n; ++i) {
            snapshot[i] = XY{ag[i].state.x, ag[i].state.y};
            AgentParams p = ag[i].nominal;
            p.b = bias[i];
            p.k_x = kx_eff[i];
            const Vec2 f = coupled_field(p, ag[i].state.z, ag[i].state.x, ag[i].state.rho);
            cmd[i] = XY{f.dx, y_field(p, ag[i].state.y, ag[i].state.y_bar)};
        }

        // (5) safety filter
        for (int i = 0; i < n; ++i) {
            if (!scenario.safety.enabled() || n == 1) {
                dv[i] = XY{0.0, 0.0};
                ratio[i] = 1.0;
                continue;
            }
            std::vector<XY> nbrs;
            nbrs.reserve(n - 1);
            for (int j = 0; j < n; ++j)
                if (j != i) nbrs.push_back(snapshot[j]);
            const FilterResult fr = filter_velocity(snapshot[i], cmd[i], nbrs, scenario.safety);
            dv[i] = XY{fr.velocity.x - cmd[i].x, fr.velocity.y - cmd[i].y};
            ratio[i] = fr.speed_ratio;
        }

        // (6) integrate; (7) accounts, entries, waypoints
        for (int i = 0; i < n; ++i) {
            AgentRuntime& a = ag[i];
            AgentParams p = a.nominal;
            p.b = bias[i];
            p.k_x = kx_eff[i];
            AgentState next;
            try {
                next = step(a.state, p, cfg, dv[i].x, dv[i].y);
            } catch (NumericalError& err) {
                throw NumericalError(err.what(), step_idx);
            }

            const Patch& acct_patch = a.acct.account_patch == 1 ? p1 : p2;
            if (acct_patch.contains(a.state.x, a.state.y) &&
                acct_patch.contains(next.x, next.y)) {
                a.acct.distance_in_patch += std::hypot(next.x - a.state.x, next.y - a.state.y);
            }

            const double speed = std::hypot(next.x - a.state.x, next.y - a.state.y) / cfg.dt;
            const auto entered = detect_patch_entry(a.state, next, p1, p2);
            a.state = next;
            if (entered) a.acct = on_patch_entry(a.acct, *entered);

            if (a.state.has_waypoint && speed < cfg.stall_speed_frac * kx_eff[i] * cfg.arrival_tol)
                ++a.stall_count;
            else
                a.stall_count = 0;

            if (committed(a.state, a.nominal)) {
                const int fav = a.state.z > 0 ? 1 : 2;
                const double wx = waypoint_x(p, a.state.z, a.state.rho);
                const bool arrived = a.state.has_waypoint &&
                                     std::hypot(wx - a.state.x, a.state.y_bar - a.state.y) <
                                         cfg.arrival_tol;
                const bool stalled = a.stall_count >= cfg.stall_steps;
                if (!a.state.has_waypoint || a.state.waypoint_patch != fav || arrived || stalled) {
                    a.state = resample_waypoint(a.state, fav == 1 ? p1 : p2, rng);
                    a.stall_count = 0;
                }
            }
            a.tracker.record(ratio[i]);
        }

        // (8) log
        log_all((step_idx + 1) * cfg.dt, picked);
    }
    return RunResult{std::move(log), std::move(field)};
}

TrajectoryLog run(const Scenario& scenario) { return run_full(scenario).log; }

std::vector<std::vector<SwitchRecord>> switch_times(const TrajectoryLog& log) {
    std::vector<std::vector<SwitchRecord>> out(log.n_agents);
    std::vector<double> prev_z(log.n_agents, 0.0);
    std::vector<bool> seen(log.n_agents, false);
    for (const LogRow& r : log.rows) {
        if (seen[r.agent_id] && prev_z[r.agent_id] * r.z < 0.0) {
            const int from = prev_z[r.agent_id] > 0 ? 1 : 2;
            out[r.agent_id].push_back(SwitchRecord{r.t, from, from == 1 ? 2 : 1});
        }
        prev_z[r.agent_id] = r.z;
        seen[r.agent_id] = true;
    }
    return out;
}

double crowding_metric(const TrajectoryLog& log, int patch, double t) {
    if (log.rows.empty()) return 0.0;
    // Nearest logged instant.
    const double step = log.dt > 0 ? log.dt : 1.0;
    double best_t = log.rows.front().t;
    double best_d = std::fabs(best_t - t);
    for (const LogRow& r : log.rows) {
        const double d = std::fabs(r.t - t);
        if (d < best_d - 1e-15) {
            best_d = d;
            best_t = r.t;
        }
        if (r.t > t + step) break;
    }
    std::vector<XY> pos;
    for (const LogRow& r : log.rows)
        if (std::fabs(r.t - best_t) < 1e-12 && r.patch == patch) pos.push_back(XY{r.x, r.y});
    if (pos.size() < 2) return 0.0;
    double s = 0.0;
    int m = 0;
    for (std::size_t i = 0; i < pos.size(); ++i)
        for (std::size_t j = i + 1; j < pos.size(); ++j) {
            const double d = std::hypot(pos[i].x - pos[j].x, pos[i].y - pos[j].y);
            s += 1.0 / std::max(d, 1e-9);
            ++m;
        }
    return s / m;
}

}  // namespace opdsim
