#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "opdsim/model.hpp"
#include "opdsim/rng.hpp"

namespace opdsim {

struct IntegratorConfig {
    double dt = 0.01;
    double t_end = 200.0;
    double arrival_tol = 0.02;  // waypoint arrival distance
    // A leg also ends when the realized speed stays below
    // stall_speed_frac * K_x_eff * arrival_tol for stall_steps consecutive
    // steps; the agent then replans. Keeps agents from parking forever on
    // interior equilibria of the coupled field, where no distance accrues.
    double stall_speed_frac = 0.25;
    int stall_steps = 50;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
        if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be >= 0");
        if (!(arrival_tol > 0.0)) throw std::invalid_argument("arrival_tol must be > 0");
    }
};

enum class EventKind { set_u, add_trash, set_kx };

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::set_u;
    int agent = -1;  // set_u / set_kx
    int patch = 0;   // add_trash
    double value = 0.0;
    int count = 0;
};

// Raised when a derivative or state stops being finite mid-run.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, long step) : std::runtime_error(what), step(step) {}
    long step;
};

// One RK4 step of (dz, dx, dy). vel_offset is an additive, step-constant
// correction to (dx, dy) used by the engine to fold in the safety filter;
// zero offset gives the plain smooth-field integrator.
AgentState step(const AgentState& s, const AgentParams& p, const IntegratorConfig& cfg,
                double vx_offset = 0.0, double vy_offset = 0.0);

// Draw a fresh random point in `patch` and retarget the waypoint.
// Caller guarantees the agent is committed (switch_fn(z) < 0.5).
AgentState resample_waypoint(const AgentState& s, const Patch& patch, SimRng& rng);

// Patch newly entered during the step, judged by end-of-step containment.
std::optional<Patch> detect_patch_entry(const AgentState& prev, const AgentState& next,
                                        const Patch& p1, const Patch& p2);

inline bool committed(const AgentState& s, const AgentParams& p) {
    return switch_fn(s.z, p.sigma) < 0.5;
}

}  // namespace opdsim
