#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "opdsim/io.hpp"
#include "opdsim/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace opdsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::vector<std::string> overrides;
    bool overwrite = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config = true) {
    auto* copt = cmd->add_option("--config", o.config_path, "configuration JSON file");
    if (needs_config) copt->required();
    const char* env_dir = std::getenv("OPDSIM_OUT_DIR");
    o.out_dir = env_dir ? env_dir : ".";
    cmd->add_option("--out", o.out_dir, "output directory (default $OPDSIM_OUT_DIR or .)");
    cmd->add_option("--set", o.overrides, "config override, dotted.path=value")
        ->take_all();
    cmd->add_flag("--overwrite", o.overwrite, "allow replacing existing output files");
}

Config load(const CommonOpts& o) {
    std::ifstream in(o.config_path);
    if (!in) throw std::invalid_argument("cannot open config file: " + o.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    if (!o.overrides.empty()) text = apply_overrides(text, o.overrides);
    return parse_config(text);
}

std::string out_path(const CommonOpts& o, const std::string& name) {
    fs::create_directories(o.out_dir);
    const fs::path p = fs::path(o.out_dir) / name;
    if (fs::exists(p) && !o.overwrite)
        throw std::invalid_argument("refusing to overwrite " + p.string() +
                                    " (pass --overwrite)");
    return p.string();
}

int run_simulate(const CommonOpts& o, bool svg) {
    Config cfg = load(o);
    const RunResult res = run_full(cfg.scenario);
    write_file(out_path(o, "trajectory.csv"), trajectory_csv(res.log));
    write_file(out_path(o, "summary.json"), summary_json(cfg.scenario, res.log));
    write_file(out_path(o, "trash.csv"), trash_csv(res.trash));
    if (svg) write_file(out_path(o, "trajectory.svg"),
                        trajectory_svg(cfg.scenario, res.log, res.trash));
    std::cout << "simulate: " << cfg.scenario.agents.size() << " agents, t_end="
              << cfg.scenario.integrator.t_end << ", wrote " << o.out_dir << "\n";
    return kExitOk;
}

// Analytic trivial branch (z = x = 0) for symmetric u-continuations.
EquilibriumBranch trivial_u_branch(const BifurcationProblem& problem) {
    EquilibriumBranch br;
    const int n = 400;
    for (int i = 0; i <= n; ++i) {
        const double u = problem.range_min +
                         (problem.range_max - problem.range_min) * i / n;
        AgentParams p = problem.params;
        p.u = u;
        const Eig2 e = eigenvalues(coupled_jacobian(p, 0.0, 0.0, problem.rho));
        const double m = std::max(e.re1, e.re2);
        const Stability st = m < -1e-9   ? Stability::stable
                             : m > 1e-9  ? Stability::unstable
                                         : Stability::marginal;
        br.samples.push_back(BranchSample{u, 0.0, 0.0, st, false});
    }
    return br;
}

int run_bifurcate(const CommonOpts& o) {
    Config cfg = load(o);
    BifurcationProblem problem = cfg.bifurcation;
    EquilibriumBranch merged;

    if (problem.free_param == FreeParam::u && std::fabs(problem.params.b) < 1e-15) {
        merged = trivial_u_branch(problem);
        // Seed the symmetric non-trivial branch at the top of the range.
        AgentParams p = problem.params;
        p.u = problem.range_max;
        const auto eqs = find_equilibria(p, problem.rho, 4.0);
        const std::pair<double, double>* seed = nullptr;
        for (const auto& e : eqs)
            if (e.first > 1e-6 && (!seed || e.first > seed->first)) seed = &e;
        if (seed) {
            const auto br = continue_branch(
                problem, BranchStart{problem.range_max, seed->first, seed->second});
            merged.samples.insert(merged.samples.end(), br.samples.begin(), br.samples.end());
            merged.folds.insert(merged.folds.end(), br.folds.begin(), br.folds.end());
        }
    } else {
        const auto start = default_branch_start(problem);
        if (!start) throw std::runtime_error("no equilibrium found at the continuation start");
        merged = continue_branch(problem, *start);
    }
    write_file(out_path(o, "branch.csv"), branch_csv(merged));
    write_file(out_path(o, "folds.json"), folds_json(merged));
    std::cout << "bifurcate: " << merged.samples.size() << " samples, " << merged.folds.size()
              << " folds\n";
    return kExitOk;
}

int run_classify(const CommonOpts& o) {
    Config cfg = load(o);
    const CriticalityReport rep = classify_criticality(cfg.bifurcation.params, cfg.bifurcation.rho);
    const char* kind = rep.kind == Criticality::supercritical        ? "supercritical"
                       : rep.kind == Criticality::subcritical_quintic ? "subcritical_quintic"
                                                                      : "degenerate_quintic";
    nlohmann::json j{{"c3", rep.c3},
                     {"kind", kind},
                     {"quintic_coefficient", rep.quintic},
                     {"in_theory", rep.in_theory}};
    write_file(out_path(o, "classification.json"), j.dump(2));
    std::cout << "classify: c3=" << rep.c3 << " -> " << kind;
    if (!rep.in_theory) std::cout << " (out-of-theory: quintic coefficient non-negative)";
    std::cout << "\n";
    return kExitOk;
}

int run_sweep(const CommonOpts& o) {
    Config cfg = load(o);
    if (!cfg.has_sweep) throw std::invalid_argument("config has no sweep section");
    BifurcationProblem base = cfg.bifurcation;
    base.free_param = FreeParam::b;

    struct Row {
        double value = 0, b1 = 0, b2 = 0, z1 = 0, z2 = 0;
        bool ok = false;
    };
    auto one = [&](double v) -> Row {
        Row row;
        row.value = v;
        try {
            BifurcationProblem prob = base;
            if (cfg.sweep.param == ThresholdParam::u)
                prob.params.u = v;
            else
                prob.params.k_x = v;
            const auto start = default_branch_start(prob);
            if (!start) return row;
            const auto br = continue_branch(prob, *start);
            const DecisiveFolds dec = decisive_folds(br);
            if (!dec.b1 || !dec.b2) return row;
            row.b1 = dec.b1->param;
            row.z1 = dec.b1->z;
            row.b2 = dec.b2->param;
            row.z2 = dec.b2->z;
            row.ok = true;
        } catch (const std::exception&) {
            row.ok = false;
        }
        return row;
    };

    std::vector<std::future<Row>> futures;
    futures.reserve(cfg.sweep.values.size());
    for (double v : cfg.sweep.values)
        futures.push_back(std::async(std::launch::async, one, v));

    std::ostringstream out;
    out << "param_value,b1_star,b2_star,z1_star,z2_star,ok\n";
    for (auto& f : futures) {
        const Row r = f.get();
        out << format_double(r.value) << ',' << format_double(r.b1) << ','
            << format_double(r.b2) << ',' << format_double(r.z1) << ',' << format_double(r.z2)
            << ',' << (r.ok ? 1 : 0) << '\n';
    }
    write_file(out_path(o, "thresholds.csv"), out.str());
    std::cout << "sweep: " << cfg.sweep.values.size() << " grid points\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled opinion-dynamics task-switching simulator and bifurcation toolkit"};
    app.require_subcommand(1);

    CommonOpts sim_o, bif_o, cls_o, swp_o, dump_o;
    bool svg = false;
    auto* sim = app.add_subcommand("simulate", "run a scenario; writes trajectory.csv, summary.json");
    add_common(sim, sim_o);
    sim->add_flag("--svg", svg, "also write trajectory.svg");
    auto* bif = app.add_subcommand("bifurcate", "equilibrium continuation; writes branch.csv, folds.json");
    add_common(bif, bif_o);
    auto* cls = app.add_subcommand("classify", "pitchfork criticality of the configured parameters");
    add_common(cls, cls_o);
    auto* swp = app.add_subcommand("sweep", "threshold sweep over u or k_x; writes thresholds.csv");
    add_common(swp, swp_o);
    auto* dmp = app.add_subcommand("dump-defaults", "print the default configuration JSON");
    add_common(dmp, dump_o, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return run_simulate(sim_o, svg);
        if (bif->parsed()) return run_bifurcate(bif_o);
        if (cls->parsed()) return run_classify(cls_o);
        if (swp->parsed()) return run_sweep(swp_o);
        if (dmp->parsed()) {
            std::string text = dump_default_config();
            if (!dump_o.overrides.empty()) text = apply_overrides(text, dump_o.overrides);
            if (dump_o.config_path.empty()) {
                std::cout << text << "\n";
            } else {
                write_file(dump_o.config_path, text);
            }
            return kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure at step " << e.step << ": " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitValidation;
}
