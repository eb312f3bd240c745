#include "opdsim/model.hpp"

namespace opdsim {

void AgentParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(name) + " must be > 0");
    };
    positive(d, "d");
    positive(u, "u");
    positive(k_z, "k_z");
    positive(k_x, "k_x");
    positive(k_y, "k_y");
    positive(k, "k");
    positive(sigma, "sigma");
    positive(l, "l");
    if (!std::isfinite(b)) throw std::invalid_argument("b must be finite");
}

Eig2 eigenvalues(const Mat2& m) {
    const double tr = m.trace();
    const double disc = tr * tr - 4.0 * m.det();
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        return Eig2{(tr - s) / 2.0, 0.0, (tr + s) / 2.0, 0.0};
    }
    const double s = std::sqrt(-disc);
    return Eig2{tr / 2.0, -s / 2.0, tr / 2.0, s / 2.0};
}

Mat2 coupled_jacobian(const AgentParams& p, double z, double x, double rho) {
    const double e = switch_fn(z, p.sigma);
    const double de = -z / (p.sigma * p.sigma) * e;  // d eta / dz
    const double ch = std::cosh(z);
    const double sp = 1.0 / (ch * ch);  // S'(z)
    const double chk = std::cosh(p.k * z);
    const double dxbar = rho / p.l * p.k / (chk * chk);
    Mat2 j;
    j.a11 = -p.d + p.u * sp - p.k_z * (de * (z - x) + e);
    j.a12 = p.k_z * e;
    j.a21 = -de * p.k_x * (waypoint_x(p, z, rho) - x) + (1.0 - e) * p.k_x * dxbar -
            de * (x - z) + e;
    j.a22 = -(1.0 - e) * p.k_x - e;
    return j;
}

PatchRegion classify_position(double x, double y, const Patch& p1, const Patch& p2) {
    if (p1.contains(x, y)) return PatchRegion::patch1;
    if (p2.contains(x, y)) return PatchRegion::patch2;
    return PatchRegion::transit;
}

}  // namespace opdsim
