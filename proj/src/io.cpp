#include "opdsim/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace opdsim {

std::string format_double(double v) {
    char buf[40];
    // %.17g round-trips doubles and is locale-independent for plain digits.
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string trajectory_csv(const TrajectoryLog& log) {
    std::ostringstream out;
    out << "t,agent_id,z,x,y,b,q,u,effective_kx,patch,picked\n";
    for (const LogRow& r : log.rows) {
        out << format_double(r.t) << ',' << r.agent_id << ',' << format_double(r.z) << ','
            << format_double(r.x) << ',' << format_double(r.y) << ',' << format_double(r.b)
            << ',' << format_double(r.q) << ',' << format_double(r.u) << ','
            << format_double(r.kx_eff) << ',' << r.patch << ',' << r.picked << '\n';
    }
    return out.str();
}

std::string branch_csv(const EquilibriumBranch& branch) {
    std::ostringstream out;
    out << "param,z,x,stability,is_fold\n";
    for (const BranchSample& s : branch.samples) {
        const char* st = s.stability == Stability::stable     ? "stable"
                         : s.stability == Stability::unstable ? "unstable"
                                                              : "marginal";
        out << format_double(s.param) << ',' << format_double(s.z) << ',' << format_double(s.x)
            << ',' << st << ',' << (s.is_fold ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string trash_csv(const TrashField& field) {
    std::ostringstream out;
    out << "x,y,collected_at\n";
    for (const TrashItem& it : field.items)
        out << format_double(it.x) << ',' << format_double(it.y) << ','
            << format_double(it.collected ? it.collected_at : -1.0) << '\n';
    return out.str();
}

std::string folds_json(const EquilibriumBranch& branch) {
    nlohmann::json folds = nlohmann::json::array();
    for (const FoldPoint& f : branch.folds)
        folds.push_back({{"param", f.param}, {"z", f.z}, {"x", f.x}, {"refined", f.refined}});
    nlohmann::json j{{"count", branch.folds.size()}, {"folds", folds}};
    return j.dump(2);
}

std::string summary_json(const Scenario& scenario, const TrajectoryLog& log,
                         double crowding_interval) {
    const auto switches = switch_times(log);
    nlohmann::json agents = nlohmann::json::array();
    for (int i = 0; i < log.n_agents; ++i) {
        nlohmann::json sw = nlohmann::json::array();
        for (const SwitchRecord& r : switches[i])
            sw.push_back({{"t", r.t}, {"from_patch", r.from_patch}, {"to_patch", r.to_patch}});
        int collected = 0;
        double kx_sum = 0.0;
        long kx_n = 0;
        const double first =
            switches[i].empty() ? -1.0 : switches[i].front().t;
        for (const LogRow& r : log.rows) {
            if (r.agent_id != i) continue;
            collected += r.picked;
            if (first < 0 || r.t <= first) {
                kx_sum += r.kx_eff;
                ++kx_n;
            }
        }
        nlohmann::json entry{{"switches", sw},
                             {"collected", collected},
                             {"mean_effective_kx_pre_switch", kx_n ? kx_sum / kx_n : 0.0}};
        entry["first_switch"] = switches[i].empty() ? nlohmann::json() : nlohmann::json(first);
        agents.push_back(entry);
    }
    nlohmann::json crowding1 = nlohmann::json::array(), crowding2 = nlohmann::json::array();
    const double t_end = log.rows.empty() ? 0.0 : log.rows.back().t;
    for (double t = 0.0; t <= t_end + 1e-9; t += crowding_interval) {
        crowding1.push_back({t, crowding_metric(log, 1, t)});
        crowding2.push_back({t, crowding_metric(log, 2, t)});
    }
    int total_picked = 0;
    for (const LogRow& r : log.rows) total_picked += r.picked;
    nlohmann::json j{{"seed", scenario.seed},
                     {"t_end", t_end},
                     {"agents", agents},
                     {"total_collected", total_picked},
                     {"crowding", {{"patch1", crowding1}, {"patch2", crowding2}}}};
    return j.dump(2);
}

namespace {

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

}  // namespace

std::string trajectory_svg(const Scenario& scenario, const TrajectoryLog& log,
                           const TrashField& final_field) {
    const double margin = 0.15;
    const double x0 = -scenario.patch1.x_max - margin, x1 = scenario.patch1.x_max + margin;
    const double y0 = scenario.patch1.y_min - margin, y1 = scenario.patch1.y_max + margin;
    const double w = 900.0;
    const double scale = w / (x1 - x0);
    const double h = (y1 - y0) * scale;
    auto px = [&](double x) { return (x - x0) * scale; };
    auto py = [&](double y) { return h - (y - y0) * scale; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const Patch* p : {&scenario.patch1, &scenario.patch2}) {
        out << "<rect x=\"" << px(p->x_min) << "\" y=\"" << py(p->y_max) << "\" width=\""
            << (p->x_max - p->x_min) * scale << "\" height=\"" << (p->y_max - p->y_min) * scale
            << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n";
    }
    for (const TrashItem& it : final_field.items) {
        out << "<circle cx=\"" << px(it.x) << "\" cy=\"" << py(it.y) << "\" r=\"4\" fill=\""
            << (it.collected ? "#2ca02c" : "black") << "\"/>\n";
    }
    for (int i = 0; i < log.n_agents; ++i) {
        const char* color = kPalette[i % 10];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.2\" opacity=\"0.8\" points=\"";
        for (const LogRow& r : log.rows)
            if (r.agent_id == i) out << px(r.x) << ',' << py(r.y) << ' ';
        out << "\"/>\n";
        // end position marker
        for (auto it = log.rows.rbegin(); it != log.rows.rend(); ++it) {
            if (it->agent_id == i) {
                out << "<circle cx=\"" << px(it->x) << "\" cy=\"" << py(it->y)
                    << "\" r=\"6\" fill=\"" << color << "\"/>\n";
                break;
            }
        }
    }
    out << "</svg>\n";
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

}  // namespace opdsim
