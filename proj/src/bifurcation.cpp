#include "opdsim/bifurcation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace opdsim {

namespace {

constexpr double kMarginalEig = 1e-9;

struct Vec3 {
    double v[3];
};

// Gaussian elimination with partial pivoting; returns false when singular.
bool solve3(double a[3][3], double b[3], double out[3]) {
    int idx[3] = {0, 1, 2};
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::fabs(a[idx[r]][c]) > std::fabs(a[idx[piv]][c])) piv = r;
        std::swap(idx[c], idx[piv]);
        const double p = a[idx[c]][c];
        if (std::fabs(p) < 1e-300) return false;
        for (int r = c + 1; r < 3; ++r) {
            const double m = a[idx[r]][c] / p;
            for (int cc = c; cc < 3; ++cc) a[idx[r]][cc] -= m * a[idx[c]][cc];
            b[idx[r]] -= m * b[idx[c]];
        }
    }
    for (int c = 2; c >= 0; --c) {
        double s = b[idx[c]];
        for (int cc = c + 1; cc < 3; ++cc) s -= a[idx[c]][cc] * out[cc];
        out[c] = s / a[idx[c]][c];
    }
    return true;
}

double get_free(const AgentParams& p, FreeParam fp) {
    return fp == FreeParam::u ? p.u : p.b;
}

void set_free(AgentParams& p, FreeParam fp, double v) {
    if (fp == FreeParam::u)
        p.u = v;
    else
        p.b = v;
}

// Residual (f, h) and its derivative with respect to the free parameter.
void residual(const AgentParams& p, double rho, double z, double x, double out[2]) {
    const Vec2 fh = coupled_field(p, z, x, rho);
    out[0] = fh.dz;
    out[1] = fh.dx;
}

void dresidual_dparam(FreeParam fp, double z, double out[2]) {
    out[0] = fp == FreeParam::u ? saturation(z) : 1.0;
    out[1] = 0.0;
}

Stability classify_sample(const AgentParams& p, double rho, double z, double x) {
    const Eig2 e = eigenvalues(coupled_jacobian(p, z, x, rho));
    const double m = std::max(e.re1, e.re2);
    if (m < -kMarginalEig) return Stability::stable;
    if (m > kMarginalEig) return Stability::unstable;
    return Stability::marginal;
}

// Unit tangent of the solution curve: nullspace of the 2x3 matrix
// [df/d(z,x) | df/dparam].
bool curve_tangent(const AgentParams& p, double rho, FreeParam fp, double z, double x,
                   double out[3]) {
    const Mat2 jac = coupled_jacobian(p, z, x, rho);
    double dp[2];
    dresidual_dparam(fp, z, dp);
    // Tangent t solves [jac | dp] t = 0: take cross product of the two rows.
    const double r1[3] = {jac.a11, jac.a12, dp[0]};
    const double r2[3] = {jac.a21, jac.a22, dp[1]};
    out[0] = r1[1] * r2[2] - r1[2] * r2[1];
    out[1] = r1[2] * r2[0] - r1[0] * r2[2];
    out[2] = r1[0] * r2[1] - r1[1] * r2[0];
    const double n = std::sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2]);
    if (n < 1e-300) return false;
    for (int i = 0; i < 3; ++i) out[i] /= n;
    return true;
}

struct CorrectorResult {
    double z, x, param;
    int iters;
    bool ok;
};

// Newton on the bordered system {f = 0, h = 0, (Y - Y0) . t = ds}.
CorrectorResult correct(const AgentParams& base, double rho, FreeParam fp, const double y0[3],
                        const double tangent[3], double ds, double tol) {
    double y[3] = {y0[0] + ds * tangent[0], y0[1] + ds * tangent[1], y0[2] + ds * tangent[2]};
    AgentParams p = base;
    for (int it = 0; it < 14; ++it) {
        set_free(p, fp, y[2]);
        double r[2];
        residual(p, rho, y[0], y[1], r);
        const double arc = (y[0] - y0[0]) * tangent[0] + (y[1] - y0[1]) * tangent[1] +
                           (y[2] - y0[2]) * tangent[2] - ds;
        if (std::fabs(r[0]) < tol && std::fabs(r[1]) < tol && std::fabs(arc) < tol)
            return {y[0], y[1], y[2], it, true};
        const Mat2 j = coupled_jacobian(p, y[0], y[1], rho);
        double dp[2];
        dresidual_dparam(fp, y[0], dp);
        double a[3][3] = {{j.a11, j.a12, dp[0]}, {j.a21, j.a22, dp[1]},
                          {tangent[0], tangent[1], tangent[2]}};
        double rhs[3] = {-r[0], -r[1], -arc};
        double d[3];
        if (!solve3(a, rhs, d)) return {y[0], y[1], y[2], it, false};
        y[0] += d[0];
        y[1] += d[1];
        y[2] += d[2];
        if (!std::isfinite(y[0]) || !std::isfinite(y[1]) || !std::isfinite(y[2]))
            return {y[0], y[1], y[2], it, false};
    }
    return {y[0], y[1], y[2], 14, false};
}

// Newton on the fold system {f = 0, h = 0, det J = 0}; derivatives of det J
// taken by central differences.
std::optional<FoldPoint> polish_fold(const AgentParams& base, double rho, FreeParam fp,
                                     double z0, double x0, double param0) {
    AgentParams p = base;
    double y[3] = {z0, x0, param0};
    auto detj = [&](double z, double x, double prm) {
        AgentParams q = base;
        set_free(q, fp, prm);
        return coupled_jacobian(q, z, x, rho).det();
    };
    for (int it = 0; it < 40; ++it) {
        set_free(p, fp, y[2]);
        double r[2];
        residual(p, rho, y[0], y[1], r);
        const double dj = detj(y[0], y[1], y[2]);
        if (std::fabs(r[0]) < 1e-13 && std::fabs(r[1]) < 1e-13 && std::fabs(dj) < 1e-11)
            return FoldPoint{y[2], y[0], y[1], true};
        const Mat2 j = coupled_jacobian(p, y[0], y[1], rho);
        double dp[2];
        dresidual_dparam(fp, y[0], dp);
        const double e = 1e-7;
        const double dz = (detj(y[0] + e, y[1], y[2]) - detj(y[0] - e, y[1], y[2])) / (2 * e);
        const double dx = (detj(y[0], y[1] + e, y[2]) - detj(y[0], y[1] - e, y[2])) / (2 * e);
        const double dq = (detj(y[0], y[1], y[2] + e) - detj(y[0], y[1], y[2] - e)) / (2 * e);
        double a[3][3] = {{j.a11, j.a12, dp[0]}, {j.a21, j.a22, dp[1]}, {dz, dx, dq}};
        double rhs[3] = {-r[0], -r[1], -dj};
        double d[3];
        if (!solve3(a, rhs, d)) return std::nullopt;
        double lim = std::max({std::fabs(d[0]), std::fabs(d[1]), std::fabs(d[2])});
        const double cap = 0.05;
        if (lim > cap)
            for (double& v : d) v *= cap / lim;
        y[0] += d[0];
        y[1] += d[1];
        y[2] += d[2];
    }
    return std::nullopt;
}

}  // namespace

Mat2 neutral_jacobian(const AgentParams& p) {
    return Mat2{-p.d + p.u - p.k_z, p.k_z, 1.0, -1.0};
}

NeutralStability neutral_stability(const AgentParams& p) {
    const Eig2 e = eigenvalues(neutral_jacobian(p));
    const double m = std::max(e.re1, e.re2);
    if (m < -1e-12) return NeutralStability::stable;
    if (m > 1e-12) return NeutralStability::unstable;
    return NeutralStability::marginal;
}

CriticalityReport classify_criticality(const AgentParams& p, double rho) {
    const double c3 = -2.0 * p.d / p.k_z - 3.0 * p.k_x * (1.0 - p.k * rho / p.l) / p.sigma;
    const double inner = 20.0 * p.k_x * p.k_z * p.k * p.k * p.k * p.sigma * rho / p.l +
                         15.0 * p.k_x * p.k_z * p.k * rho / p.l - 16.0 * p.d * p.sigma * p.sigma +
                         20.0 * p.k_x * p.d * p.sigma - 15.0 * p.k_x * p.k_z;
    const double quintic = -inner / (p.k_z * p.sigma * p.sigma);
    CriticalityReport rep;
    rep.c3 = c3;
    rep.quintic = quintic;
    rep.in_theory = quintic < 0.0;
    if (std::fabs(c3) <= 1e-12)
        rep.kind = Criticality::degenerate_quintic;
    else
        rep.kind = c3 < 0.0 ? Criticality::supercritical : Criticality::subcritical_quintic;
    return rep;
}

ScalarReduction reduce_to_scalar(const AgentParams& p, double rho, double z) {
    const double e = switch_fn(z, p.sigma);
    if (e < 1e-300) throw std::domain_error("switch_fn underflow: scalar reduction invalid");
    // At equilibrium f(z, x) = 0 gives x = z - f_u(z) / (K_z eta(z)).
    const double w = (p.d * z - p.u * saturation(z) - p.b) / (p.k_z * e);
    const double x = z + w;
    const double g = (1.0 - e) * p.k_x * (waypoint_x(p, z, rho) - x) - e * w;
    return ScalarReduction{x, g};
}

std::optional<std::pair<double, double>> newton_equilibrium(const AgentParams& p, double rho,
                                                            double z0, double x0, double tol,
                                                            int max_iter) {
    double z = z0, x = x0;
    for (int it = 0; it < max_iter; ++it) {
        double r[2];
        residual(p, rho, z, x, r);
        if (std::fabs(r[0]) < tol && std::fabs(r[1]) < tol) return std::make_pair(z, x);
        const Mat2 j = coupled_jacobian(p, z, x, rho);
        const double det = j.det();
        if (std::fabs(det) < 1e-300) return std::nullopt;
        double dz = (-r[0] * j.a22 + r[1] * j.a12) / det;
        double dx = (-r[1] * j.a11 + r[0] * j.a21) / det;
        const double lim = std::max(std::fabs(dz), std::fabs(dx));
        const double cap = 0.25;
        if (lim > cap) {
            dz *= cap / lim;
            dx *= cap / lim;
        }
        z += dz;
        x += dx;
        if (!std::isfinite(z) || !std::isfinite(x)) return std::nullopt;
    }
    return std::nullopt;
}

double x_from_h(const AgentParams& p, double rho, double z) {
    const double e = switch_fn(z, p.sigma);
    const double w = (1.0 - e) * p.k_x;
    return (w * waypoint_x(p, z, rho) + e * z) / (w + e);
}

std::vector<std::pair<double, double>> find_equilibria(const AgentParams& p, double rho,
                                                       double z_max) {
    std::vector<std::pair<double, double>> out;
    auto push_unique = [&](double z, double x) {
        for (const auto& q : out)
            if (std::fabs(q.first - z) < 1e-7 && std::fabs(q.second - x) < 1e-7) return;
        out.emplace_back(z, x);
    };
    const int n = 481;
    for (int i = 0; i < n; ++i) {
        const double z0 = -z_max + 2.0 * z_max * i / (n - 1);
        const auto sol = newton_equilibrium(p, rho, z0, x_from_h(p, rho, z0));
        if (sol && std::fabs(sol->first) <= z_max + 1e-9) push_unique(sol->first, sol->second);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<BranchStart> default_branch_start(const BifurcationProblem& problem) {
    const double p0 = get_free(problem.params, problem.free_param);
    AgentParams p = problem.params;
    set_free(p, problem.free_param, p0);
    const auto eqs = find_equilibria(p, problem.rho, 4.0);
    if (eqs.empty()) return std::nullopt;
    // Prefer the outermost positive-z equilibrium; fall back to the largest |z|.
    const auto* best = &eqs.back();
    if (best->first < 0) best = &eqs.front();
    return BranchStart{p0, best->first, best->second};
}

EquilibriumBranch continue_branch(const BifurcationProblem& problem, const BranchStart& start) {
    const FreeParam fp = problem.free_param;
    const double rho = problem.rho;
    AgentParams p = problem.params;
    set_free(p, fp, start.param);
    const auto corrected = newton_equilibrium(p, rho, start.z, start.x, problem.tol);
    if (!corrected) throw std::invalid_argument("continuation start is not an equilibrium");

    EquilibriumBranch branch;
    const double y0[3] = {corrected->first, corrected->second, start.param};

    auto sample_of = [&](const double y[3], bool fold) {
        AgentParams q = problem.params;
        set_free(q, fp, y[2]);
        return BranchSample{y[2], y[0], y[1], classify_sample(q, rho, y[0], y[1]), fold};
    };

    auto true_tangent = [&](const double y[3], const double orient[3], double out[3]) {
        AgentParams q = problem.params;
        set_free(q, fp, y[2]);
        if (!curve_tangent(q, rho, fp, y[0], y[1], out)) return false;
        const double dot = out[0] * orient[0] + out[1] * orient[1] + out[2] * orient[2];
        if (dot < 0)
            for (int i = 0; i < 3; ++i) out[i] = -out[i];
        return true;
    };

    auto push_fold = [&](const FoldPoint& f) {
        for (const auto& g : branch.folds)
            if (std::fabs(g.param - f.param) < 1e-7 && std::fabs(g.z - f.z) < 1e-6) return;
        branch.folds.push_back(f);
    };

    // Half-sweep in one orientation; samples appended to `out`.
    auto sweep = [&](int dir, std::vector<BranchSample>& out) {
        double y[3] = {y0[0], y0[1], y0[2]};
        double t[3];
        {
            AgentParams q = problem.params;
            set_free(q, fp, y[2]);
            if (!curve_tangent(q, rho, fp, y[0], y[1], t)) return;
            // Orient the initial tangent by the requested parameter direction;
            // if the start sits near a fold, orient by z instead.
            const double ref = std::fabs(t[2]) > 1e-8 ? t[2] : t[0];
            if (ref * dir < 0)
                for (double& v : t) v = -v;
        }
        double ds = problem.initial_step;
        int halvings = 0;
        while ((int)out.size() < problem.max_samples) {
            const CorrectorResult c = correct(problem.params, rho, fp, y, t, ds, problem.tol);
            if (!c.ok) {
                ds /= 2;
                if (++halvings > 10) break;
                continue;
            }
            halvings = 0;
            double yn[3] = {c.z, c.x, c.param};
            double tn[3] = {yn[0] - y[0], yn[1] - y[1], yn[2] - y[2]};
            const double nn = std::sqrt(tn[0] * tn[0] + tn[1] * tn[1] + tn[2] * tn[2]);
            if (nn < 1e-15) break;
            for (double& v : tn) v /= nn;

            // Fold: the parameter component of the exact tangent flips sign.
            double te_old[3], te_new[3];
            if (true_tangent(y, t, te_old) && true_tangent(yn, tn, te_new) &&
                te_old[2] * te_new[2] < 0) {
                // Bisection on the arclength sub-step.
                double lo = 0.0, hi = ds;
                double ylo[3] = {y[0], y[1], y[2]};
                double yhi[3] = {yn[0], yn[1], yn[2]};
                const double sgn_lo = te_old[2];
                for (int it = 0; it < 80 && std::fabs(yhi[2] - ylo[2]) > 1e-9; ++it) {
                    const double mid = (lo + hi) / 2;
                    const CorrectorResult cm =
                        correct(problem.params, rho, fp, y, t, mid, problem.tol);
                    if (!cm.ok) break;
                    double ym[3] = {cm.z, cm.x, cm.param};
                    double tm[3];
                    if (!true_tangent(ym, t, tm)) break;
                    if (tm[2] * sgn_lo > 0) {
                        lo = mid;
                        ylo[0] = ym[0]; ylo[1] = ym[1]; ylo[2] = ym[2];
                    } else {
                        hi = mid;
                        yhi[0] = ym[0]; yhi[1] = ym[1]; yhi[2] = ym[2];
                    }
                }
                double zf = (ylo[0] + yhi[0]) / 2, xf = (ylo[1] + yhi[1]) / 2,
                       pf = (ylo[2] + yhi[2]) / 2;
                auto polished = polish_fold(problem.params, rho, fp, zf, xf, pf);
                FoldPoint fold = polished ? *polished
                                          : FoldPoint{pf, zf, xf,
                                                      std::fabs(yhi[2] - ylo[2]) <= 1e-8};
                push_fold(fold);
                out.push_back(BranchSample{fold.param, fold.z, fold.x, Stability::marginal, true});
            }

            y[0] = yn[0]; y[1] = yn[1]; y[2] = yn[2];
            for (int i = 0; i < 3; ++i) t[i] = tn[i];
            out.push_back(sample_of(y, false));

            if (y[2] < problem.range_min - 1e-12 || y[2] > problem.range_max + 1e-12) break;
            if (std::fabs(y[0]) > 50.0 || std::fabs(y[1]) > 50.0) break;
            // Step adaptation on corrector effort.
            if (c.iters <= 4)
                ds = std::min(ds * 1.4, problem.max_step);
            else if (c.iters >= 9)
                ds = std::max(ds / 1.4, 1e-10);
        }
    };

    std::vector<BranchSample> backward, forward;
    sweep(-1, backward);
    sweep(+1, forward);
    std::reverse(backward.begin(), backward.end());
    branch.samples = std::move(backward);
    branch.samples.push_back(sample_of(y0, false));
    branch.samples.insert(branch.samples.end(), forward.begin(), forward.end());
    std::sort(branch.folds.begin(), branch.folds.end(),
              [](const FoldPoint& a, const FoldPoint& b) { return a.z < b.z; });
    return branch;
}

SaddlePair normal_form_saddles(double u, double d) {
    if (!(u > d)) throw std::domain_error("normal_form_saddles requires u > d");
    const double m = (u - d) / 3.0;
    const double z = std::sqrt(m);
    const double b = -2.0 * std::pow(m, 1.5);
    return SaddlePair{z, b, -z, -b};
}

DecisiveFolds decisive_folds(const EquilibriumBranch& branch) {
    DecisiveFolds out;
    for (const auto& f : branch.folds) {
        if (f.z > 0) {
            if (!out.b1 || f.param < out.b1->param) out.b1 = f;
        } else if (f.z < 0) {
            if (!out.b2 || f.param > out.b2->param) out.b2 = f;
        }
    }
    return out;
}

SensitivityResult threshold_sensitivity(const BifurcationProblem& problem, const FoldPoint& fold,
                                        ThresholdParam which, double delta) {
    if (!fold.refined) throw std::invalid_argument("fold not converged; refusing sensitivity");
    if (problem.free_param != FreeParam::b)
        throw std::invalid_argument("threshold sensitivity is defined for b-continuations");

    AgentParams p = problem.params;
    p.b = fold.param;
    const double e = switch_fn(fold.z, p.sigma);

    SensitivityResult res{};
    if (which == ThresholdParam::u) {
        // From dg/du = S(z) dg/db (implicit function theorem on the reduction).
        res.closed_form = -saturation(fold.z);
    } else {
        // dg/dK_x = (1 - eta)(xbar - x); dg/db = (K_x (1/eta - 1) + 1)/K_z.
        const double dgdkx = (1.0 - e) * (waypoint_x(p, fold.z, problem.rho) - fold.x);
        const double dgdb = (p.k_x * (1.0 / e - 1.0) + 1.0) / p.k_z;
        res.closed_form = -dgdkx / dgdb;
    }

    auto fold_at = [&](double shift) -> double {
        BifurcationProblem q = problem;
        if (which == ThresholdParam::u)
            q.params.u += shift;
        else
            q.params.k_x += shift;
        // Track the same fold: start from its own (z, x) at a nearby b and
        // pick the re-located fold closest in z.
        auto polished = polish_fold(q.params, q.rho, FreeParam::b, fold.z, fold.x, fold.param);
        if (polished && std::fabs(polished->z - fold.z) < 0.2) return polished->param;
        const auto st = default_branch_start(q);
        if (!st) throw std::runtime_error("sensitivity: no equilibrium for shifted problem");
        const auto br = continue_branch(q, *st);
        const FoldPoint* best = nullptr;
        for (const auto& f : br.folds)
            if (!best || std::fabs(f.z - fold.z) < std::fabs(best->z - fold.z)) best = &f;
        if (!best) throw std::runtime_error("sensitivity: shifted continuation lost the fold");
        return best->param;
    };
    const double bp = fold_at(delta);
    const double bm = fold_at(-delta);
    res.finite_difference = (bp - bm) / (2.0 * delta);
    return res;
}

}  // namespace opdsim
