#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "opdsim/model.hpp"

namespace opdsim {

enum class NeutralStability { stable, unstable, marginal };
enum class Criticality { supercritical, subcritical_quintic, degenerate_quintic };
enum class Stability { stable, unstable, marginal };
enum class FreeParam { u, b };

// Jacobian of the coupled field at the neutral equilibrium (0, 0) with b = 0:
// [[-d + u - K_z, K_z], [1, -1]].
Mat2 neutral_jacobian(const AgentParams& p);

// Eigenvalue classification of (z, x) = (0, 0) for b = 0.
NeutralStability neutral_stability(const AgentParams& p);

struct CriticalityReport {
    Criticality kind;
    double c3;       // -2d/K_z - 3K_x(1 - k rho/l)/sigma
    double quintic;  // quintic coefficient; theory requires it negative
    bool in_theory;  // quintic < 0
};

// Pitchfork criticality of the symmetric (b = 0) bifurcation problem in u.
CriticalityReport classify_criticality(const AgentParams& p, double rho);

struct ScalarReduction {
    double x_of_z;   // x solving f(z, x) = 0 at this z
    double g_value;  // h(z, x_of_z); zeros are equilibria of the full system
};

// Scalar equilibrium reduction. Valid only while switch_fn(z) stays above
// numerical underflow; throws std::domain_error otherwise.
ScalarReduction reduce_to_scalar(const AgentParams& p, double rho, double z);

struct BifurcationProblem {
    AgentParams params;  // non-free parameters, plus the free one's start value
    double rho = 0.5;
    FreeParam free_param = FreeParam::b;
    double range_min = -0.35;
    double range_max = 0.35;
    double initial_step = 1e-3;
    double max_step = 0.02;
    double tol = 1e-10;
    int max_samples = 60000;
};

struct BranchSample {
    double param, z, x;
    Stability stability;
    bool is_fold = false;
};

struct FoldPoint {
    double param, z, x;
    bool refined = false;
};

struct EquilibriumBranch {
    std::vector<BranchSample> samples;  // ordered along arclength
    std::vector<FoldPoint> folds;
};

struct BranchStart {
    double param, z, x;
};

// Damped Newton on (f, h) = 0 at fixed parameters.
std::optional<std::pair<double, double>> newton_equilibrium(const AgentParams& p, double rho,
                                                            double z0, double x0,
                                                            double tol = 1e-12,
                                                            int max_iter = 60);

// x solving h(z, x) = 0 for given z (h is linear in x). Used to seed Newton.
double x_from_h(const AgentParams& p, double rho, double z);

// All equilibria with |z| <= z_max, found by multi-start Newton.
std::vector<std::pair<double, double>> find_equilibria(const AgentParams& p, double rho,
                                                       double z_max = 3.0);

// Pseudo-arclength continuation with secant predictor and Newton corrector,
// swept in both directions from `start` until the free parameter leaves the
// range. Folds are located by the tangent's parameter component changing
// sign, bracketed to |dparam| <= 1e-8 and polished by a Newton solve of
// (f, h, det J) = 0.
EquilibriumBranch continue_branch(const BifurcationProblem& problem, const BranchStart& start);

// Positive-branch equilibrium at the problem's start value of the free
// parameter; convenience used by the CLI and tests.
std::optional<BranchStart> default_branch_start(const BifurcationProblem& problem);

struct SaddlePair {
    double z1, b1;  // z1 > 0 > b1
    double z2, b2;  // z2 < 0 < b2
};

// Saddle-node pair of the supercritical normal form -z^3 + (u - d) z + b.
SaddlePair normal_form_saddles(double u, double d);

// Decisive switching thresholds of a continued branch in b: the fold with
// minimal b among z > 0 folds (leave task 1) and maximal b among z < 0 folds
// (leave task 2).
struct DecisiveFolds {
    std::optional<FoldPoint> b1;  // z > 0, b < 0
    std::optional<FoldPoint> b2;  // z < 0, b > 0
};
DecisiveFolds decisive_folds(const EquilibriumBranch& branch);

struct SensitivityResult {
    double closed_form;
    double finite_difference;
};

enum class ThresholdParam { u, k_x };

// Fold-location sensitivity d b*/d param for param in {u, K_x} at a refined
// fold of a b-continuation: closed form plus a central finite difference from
// re-continuations at param +/- delta.
SensitivityResult threshold_sensitivity(const BifurcationProblem& problem, const FoldPoint& fold,
                                        ThresholdParam which, double delta = 1e-3);

}  // namespace opdsim
