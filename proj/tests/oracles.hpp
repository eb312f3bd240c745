#pragma once

// Test-only oracles, kept independent of the continuation/Newton paths they
// cross-check. The equilibrium set of the coupled field admits two routes the
// production code does not take:
//   (1) dense grid scan of the scalar reduction g plus bisection;
//   (2) explicit parametrization by z: h is linear in x and f linear in b, so
//       every equilibrium is (z, x_o(z), b_o(z)) and folds in b are the
//       critical points of b_o.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "opdsim/model.hpp"

namespace oracle {

inline double eta(double z, double sigma) { return std::exp(-z * z / (2 * sigma * sigma)); }

inline double xbar(const opdsim::AgentParams& p, double rho, double z) {
    return rho / p.l * std::tanh(p.k * z);
}

// x with h(z, x) = 0 at this z.
inline double x_o(const opdsim::AgentParams& p, double rho, double z) {
    const double e = eta(z, p.sigma);
    const double w = (1.0 - e) * p.k_x;
    return (w * xbar(p, rho, z) + e * z) / (w + e);
}

// b making (z, x_o(z)) a zero of f.
inline double b_o(const opdsim::AgentParams& p, double rho, double z) {
    const double e = eta(z, p.sigma);
    return p.d * z - p.u * std::tanh(z) + p.k_z * e * (z - x_o(p, rho, z));
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double xtol = 1e-14) {
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > xtol; ++i) {
        const double mid = (lo + hi) / 2;
        const double fm = f(mid);
        if ((flo <= 0) == (fm <= 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return (lo + hi) / 2;
}

struct Fold {
    double z, x, b;
};

// All folds in b over |z| <= z_max via critical points of b_o.
inline std::vector<Fold> folds_in_b(const opdsim::AgentParams& p, double rho,
                                    double z_max = 3.0, int n = 600001) {
    auto dbdz = [&](double z) {
        const double eps = 1e-7;
        return (b_o(p, rho, z + eps) - b_o(p, rho, z - eps)) / (2 * eps);
    };
    std::vector<Fold> out;
    double prev_z = -z_max, prev_d = dbdz(prev_z);
    for (int i = 1; i < n; ++i) {
        const double z = -z_max + 2 * z_max * i / (n - 1);
        const double d = dbdz(z);
        if (prev_d * d < 0) {
            const double zf = bisect(dbdz, prev_z, z);
            out.push_back(Fold{zf, x_o(p, rho, zf), b_o(p, rho, zf)});
        }
        prev_z = z;
        prev_d = d;
    }
    return out;
}

// Roots of a scalar function on a uniform grid with bisection refinement.
inline std::vector<double> grid_roots(const std::function<double(double)>& f, double lo,
                                      double hi, double step) {
    std::vector<double> out;
    double prev_x = lo, prev_f = f(lo);
    for (double x = lo + step; x <= hi + step / 2; x += step) {
        const double fx = f(x);
        if (prev_f == 0.0) out.push_back(prev_x);
        else if (prev_f * fx < 0) out.push_back(bisect(f, prev_x, x));
        prev_x = x;
        prev_f = fx;
    }
    return out;
}

// Plain Newton on (f, h) with a finite-difference Jacobian; independent of the
// production solver's analytic derivatives.
inline std::optional<std::pair<double, double>> fd_newton(const opdsim::AgentParams& p,
                                                          double rho, double z0, double x0) {
    double z = z0, x = x0;
    auto F = [&](double zz, double xx, double out[2]) {
        const opdsim::Vec2 v = opdsim::coupled_field(p, zz, xx, rho);
        out[0] = v.dz;
        out[1] = v.dx;
    };
    for (int it = 0; it < 80; ++it) {
        double r[2];
        F(z, x, r);
        if (std::fabs(r[0]) < 1e-12 && std::fabs(r[1]) < 1e-12) return std::make_pair(z, x);
        const double e = 1e-7;
        double rp[2], rm[2];
        F(z + e, x, rp);
        F(z - e, x, rm);
        const double a11 = (rp[0] - rm[0]) / (2 * e), a21 = (rp[1] - rm[1]) / (2 * e);
        F(z, x + e, rp);
        F(z, x - e, rm);
        const double a12 = (rp[0] - rm[0]) / (2 * e), a22 = (rp[1] - rm[1]) / (2 * e);
        const double det = a11 * a22 - a12 * a21;
        if (std::fabs(det) < 1e-300) return std::nullopt;
        double dz = (-r[0] * a22 + r[1] * a12) / det;
        double dx = (-r[1] * a11 + r[0] * a21) / det;
        const double lim = std::max(std::fabs(dz), std::fabs(dx));
        if (lim > 0.2) {
            dz *= 0.2 / lim;
            dx *= 0.2 / lim;
        }
        z += dz;
        x += dx;
        if (!std::isfinite(z) || !std::isfinite(x)) return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace oracle
