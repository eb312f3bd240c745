#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "opdsim/io.hpp"
#include "opdsim/scenario_io.hpp"

namespace py = pybind11;
using namespace opdsim;

namespace {

AgentParams params_from_dict(const py::dict& d) {
    AgentParams p;
    auto set = [&](const char* key, double& field) {
        if (d.contains(key)) field = d[key].cast<double>();
    };
    set("d", p.d);
    set("u", p.u);
    set("b", p.b);
    set("k_z", p.k_z);
    set("k_x", p.k_x);
    set("k_y", p.k_y);
    set("k", p.k);
    set("sigma", p.sigma);
    set("l", p.l);
    return p;
}

BifurcationProblem problem_from(const py::dict& params, double rho, const std::string& free_param,
                                double range_min, double range_max) {
    BifurcationProblem prob;
    prob.params = params_from_dict(params);
    prob.rho = rho;
    prob.free_param = free_param == "u" ? FreeParam::u : FreeParam::b;
    prob.range_min = range_min;
    prob.range_max = range_max;
    return prob;
}

}  // namespace

PYBIND11_MODULE(_opdsim, m) {
    m.doc() = "Coupled opinion-dynamics task-switching simulator and bifurcation toolkit";

    m.def("saturation", &saturation, py::arg("z"));
    m.def("switch_fn", &switch_fn, py::arg("z"), py::arg("sigma"));
    m.def(
        "uncoupled_opinion_field",
        [](const py::dict& params, double z) {
            return uncoupled_opinion_field(params_from_dict(params), z);
        },
        py::arg("params"), py::arg("z"));
    m.def(
        "coupled_field",
        [](const py::dict& params, double z, double x, double rho) {
            const Vec2 f = coupled_field(params_from_dict(params), z, x, rho);
            return py::make_tuple(f.dz, f.dx);
        },
        py::arg("params"), py::arg("z"), py::arg("x"), py::arg("rho"));
    m.def(
        "waypoint_x",
        [](const py::dict& params, double z, double rho) {
            return waypoint_x(params_from_dict(params), z, rho);
        },
        py::arg("params"), py::arg("z"), py::arg("rho"));

    m.def(
        "neutral_stability",
        [](const py::dict& params) {
            switch (neutral_stability(params_from_dict(params))) {
                case NeutralStability::stable: return "stable";
                case NeutralStability::unstable: return "unstable";
                default: return "marginal";
            }
        },
        py::arg("params"));

    m.def(
        "classify_criticality",
        [](const py::dict& params, double rho) {
            const CriticalityReport r = classify_criticality(params_from_dict(params), rho);
            py::dict out;
            out["c3"] = r.c3;
            out["quintic_coefficient"] = r.quintic;
            out["in_theory"] = r.in_theory;
            out["kind"] = r.kind == Criticality::supercritical        ? "supercritical"
                          : r.kind == Criticality::subcritical_quintic ? "subcritical_quintic"
                                                                       : "degenerate_quintic";
            return out;
        },
        py::arg("params"), py::arg("rho"));

    m.def(
        "normal_form_saddles",
        [](double u, double d) {
            const SaddlePair s = normal_form_saddles(u, d);
            return py::make_tuple(py::make_tuple(s.z1, s.b1), py::make_tuple(s.z2, s.b2));
        },
        py::arg("u"), py::arg("d"));

    m.def(
        "reduce_to_scalar",
        [](const py::dict& params, double rho, double z) {
            const ScalarReduction r = reduce_to_scalar(params_from_dict(params), rho, z);
            return py::make_tuple(r.x_of_z, r.g_value);
        },
        py::arg("params"), py::arg("rho"), py::arg("z"));

    m.def(
        "continue_branch",
        [](const py::dict& params, double rho, const std::string& free_param, double range_min,
           double range_max, double start_param, double start_z, double start_x) {
            const BifurcationProblem prob =
                problem_from(params, rho, free_param, range_min, range_max);
            const EquilibriumBranch br =
                continue_branch(prob, BranchStart{start_param, start_z, start_x});
            py::list samples, folds;
            for (const BranchSample& s : br.samples) {
                const char* st = s.stability == Stability::stable     ? "stable"
                                 : s.stability == Stability::unstable ? "unstable"
                                                                      : "marginal";
                samples.append(py::make_tuple(s.param, s.z, s.x, st, s.is_fold));
            }
            for (const FoldPoint& f : br.folds)
                folds.append(py::make_tuple(f.param, f.z, f.x, f.refined));
            py::dict out;
            out["samples"] = samples;
            out["folds"] = folds;
            return out;
        },
        py::arg("params"), py::arg("rho"), py::arg("free_param"), py::arg("range_min"),
        py::arg("range_max"), py::arg("start_param"), py::arg("start_z"), py::arg("start_x"));

    m.def(
        "find_equilibria",
        [](const py::dict& params, double rho, double z_max) {
            return find_equilibria(params_from_dict(params), rho, z_max);
        },
        py::arg("params"), py::arg("rho"), py::arg("z_max") = 3.0);

    m.def(
        "simulate",
        [](const std::string& config_json) {
            const Config cfg = parse_config(config_json);
            const RunResult res = run_full(cfg.scenario);
            py::dict out;
            out["summary"] = summary_json(cfg.scenario, res.log);
            out["trajectory_csv"] = trajectory_csv(res.log);
            return out;
        },
        py::arg("config_json"), "Run a scenario from a config JSON string");

    m.def("default_config", &dump_default_config);
}
