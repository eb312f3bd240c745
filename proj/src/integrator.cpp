#include "opdsim/integrator.hpp"

#include <cmath>

namespace opdsim {

namespace {

struct Deriv {
    double dz, dx, dy;
};

Deriv eval(const AgentParams& p, const AgentState& s, double z, double x, double y,
           double vx_offset, double vy_offset) {
    const Vec2 f = coupled_field(p, z, x, s.rho);
    return Deriv{f.dz, f.dx + vx_offset, p.k_y * (s.y_bar - y) + vy_offset};
}

}  // namespace

AgentState step(const AgentState& s, const AgentParams& p, const IntegratorConfig& cfg,
                double vx_offset, double vy_offset) {
    const double h = cfg.dt;
    const Deriv k1 = eval(p, s, s.z, s.x, s.y, vx_offset, vy_offset);
    const Deriv k2 = eval(p, s, s.z + h / 2 * k1.dz, s.x + h / 2 * k1.dx,
                          s.y + h / 2 * k1.dy, vx_offset, vy_offset);
    const Deriv k3 = eval(p, s, s.z + h / 2 * k2.dz, s.x + h / 2 * k2.dx,
                          s.y + h / 2 * k2.dy, vx_offset, vy_offset);
    const Deriv k4 = eval(p, s, s.z + h * k3.dz, s.x + h * k3.dx, s.y + h * k3.dy,
                          vx_offset, vy_offset);
    AgentState out = s;
    out.z = s.z + h / 6 * (k1.dz + 2 * k2.dz + 2 * k3.dz + k4.dz);
    out.x = s.x + h / 6 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx);
    out.y = s.y + h / 6 * (k1.dy + 2 * k2.dy + 2 * k3.dy + k4.dy);
    if (!out.finite())
        throw NumericalError("non-finite state after RK4 step (parameter blow-up?)", -1);
    return out;
}

AgentState resample_waypoint(const AgentState& s, const Patch& patch, SimRng& rng) {
    AgentState out = s;
    const double rx = rng.uniform(patch.x_min, patch.x_max);
    const double ry = rng.uniform(patch.y_min, patch.y_max);
    out.rho = std::fabs(rx);
    out.y_bar = ry;
    out.has_waypoint = true;
    out.waypoint_patch = patch.id;
    return out;
}

std::optional<Patch> detect_patch_entry(const AgentState& prev, const AgentState& next,
                                        const Patch& p1, const Patch& p2) {
    for (const Patch& p : {p1, p2}) {
        if (p.contains(next.x, next.y) && !p.contains(prev.x, prev.y)) return p;
    }
    return std::nullopt;
}

}  // namespace opdsim
