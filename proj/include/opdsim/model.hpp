#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace opdsim {

// Per-agent model constants. All strictly positive except the bias b.
struct AgentParams {
    double d = 1.0;      // opinion damping
    double u = 1.3;      // attention gain (self-reinforcement)
    double b = 0.0;      // bias input, favors task 1 when > 0
    double k_z = 2.0;    // opinion-position coupling weight
    double k_x = 0.15;   // x-velocity gain
    double k_y = 0.15;   // y-velocity gain
    double k = 10.0;     // opinion-to-waypoint weight
    double sigma = 0.1;  // switch width
    double l = 1.0;      // patch outer-edge distance from x = 0

    void validate() const;
};

enum class PatchRegion { patch1, patch2, transit };

// Rectangular task region. Patch 1 lives in x > 0, patch 2 mirrors it in x < 0.
struct Patch {
    int id = 1;  // 1 or 2
    double x_min = 0.2, x_max = 1.0;
    double y_min = -0.5, y_max = 0.5;

    bool contains(double x, double y) const {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }
    double width() const { return x_max - x_min; }
    Patch mirrored() const { return Patch{id == 1 ? 2 : 1, -x_max, -x_min, y_min, y_max}; }
};

// Dynamic state of one agent. The waypoint is stored as (rho, y_bar); its
// x-coordinate is opinion-dependent, see waypoint_x().
struct AgentState {
    double z = 0.0;  // opinion; sign encodes the preferred task
    double x = 0.0;
    double y = 0.0;
    bool has_waypoint = false;
    double rho = 0.0;    // |r_x| of the current random point
    double y_bar = 0.0;  // y-coordinate of the current random point
    int waypoint_patch = 0;

    bool finite() const {
        return std::isfinite(z) && std::isfinite(x) && std::isfinite(y);
    }
};

struct Vec2 {
    double dz = 0.0;
    double dx = 0.0;
};

struct Mat2 {
    double a11 = 0, a12 = 0, a21 = 0, a22 = 0;
    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }
};

// Complex eigenvalues of a real 2x2 matrix, as (re, im) pairs.
struct Eig2 {
    double re1, im1, re2, im2;
};
Eig2 eigenvalues(const Mat2& m);

// Odd saturating nonlinearity, S(0) = 0, S'(0) = 1.
inline double saturation(double z) { return std::tanh(z); }

// Smooth navigation/switching gate in (0, 1]; ~1 near z = 0, ~0 once |z| >> sigma.
inline double switch_fn(double z, double sigma) {
    return std::exp(-z * z / (2.0 * sigma * sigma));
}

// dz/dt of the uncoupled opinion: -d z + u S(z) + b.
inline double uncoupled_opinion_field(const AgentParams& p, double z) {
    return -p.d * z + p.u * saturation(z) + p.b;
}

// Opinion-weighted waypoint x-coordinate, (rho/l) tanh(k z).
inline double waypoint_x(const AgentParams& p, double z, double rho) {
    return rho / p.l * std::tanh(p.k * z);
}

// Coupled opinion/position vector field.
//   dz = -d z + u S(z) + b - K_z eta(z) (z - x)
//   dx = (1 - eta(z)) K_x (xbar(z) - x) - eta(z) (x - z)
inline Vec2 coupled_field(const AgentParams& p, double z, double x, double rho) {
    const double e = switch_fn(z, p.sigma);
    Vec2 out;
    out.dz = uncoupled_opinion_field(p, z) - p.k_z * e * (z - x);
    out.dx = (1.0 - e) * p.k_x * (waypoint_x(p, z, rho) - x) - e * (x - z);
    return out;
}

// dy/dt = K_y (y_bar - y).
inline double y_field(const AgentParams& p, double y, double y_bar) {
    return p.k_y * (y_bar - y);
}

// Jacobian of coupled_field with respect to (z, x).
Mat2 coupled_jacobian(const AgentParams& p, double z, double x, double rho);

// Region classification of a position against the two patches.
PatchRegion classify_position(double x, double y, const Patch& p1, const Patch& p2);

}  // namespace opdsim
