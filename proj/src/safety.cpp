#include "opdsim/safety.hpp"

#include <cmath>

namespace opdsim {

FilterResult filter_velocity(const XY& self_pos, const XY& cmd, const std::vector<XY>& neighbors,
                             const SafetyConfig& cfg) {
    const double cmd_norm = std::hypot(cmd.x, cmd.y);
    if (!cfg.enabled() || neighbors.empty()) return {cmd, 1.0};

    struct HalfSpace {
        double nx, ny, c;  // feasible iff nx vx + ny vy >= c
    };
    std::vector<HalfSpace> cons;
    cons.reserve(neighbors.size());
    const double d_safe = 2.0 * cfg.agent_radius + cfg.margin;
    for (const XY& q : neighbors) {
        const double px = self_pos.x - q.x, py = self_pos.y - q.y;
        const double h = px * px + py * py - d_safe * d_safe;
        cons.push_back({px, py, -(cfg.gain_alpha / 2.0) * h});
    }

    double vx = cmd.x, vy = cmd.y;
    bool feasible = false;
    for (int sweep = 0; sweep < 20 && !feasible; ++sweep) {
        feasible = true;
        for (const HalfSpace& hs : cons) {
            const double s = vx * hs.nx + vy * hs.ny;
            if (s < hs.c - 1e-15) {
                const double n2 = hs.nx * hs.nx + hs.ny * hs.ny;
                if (n2 < 1e-300) continue;  // coincident agents carry no direction
                const double step = (hs.c - s) / n2;
                vx += step * hs.nx;
                vy += step * hs.ny;
                feasible = false;
            }
        }
    }
    if (!feasible) return {XY{0.0, 0.0}, 0.0};
    const double ratio = std::hypot(vx, vy) / std::max(cmd_norm, 1e-30);
    return {XY{vx, vy}, ratio};
}

}  // namespace opdsim
