#include "opdsim/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace opdsim {

using nlohmann::json;

namespace {

template <typename T>
void read_into(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(where + "." + key + ": " + e.what());
    }
}

AgentParams parse_params(const json& j, const std::string& where) {
    AgentParams p;
    read_into(j, "d", p.d, where);
    read_into(j, "u", p.u, where);
    read_into(j, "b", p.b, where);
    read_into(j, "k_z", p.k_z, where);
    read_into(j, "k_x", p.k_x, where);
    read_into(j, "k_y", p.k_y, where);
    read_into(j, "k", p.k, where);
    read_into(j, "sigma", p.sigma, where);
    read_into(j, "l", p.l, where);
    return p;
}

json params_json(const AgentParams& p) {
    return json{{"d", p.d},     {"u", p.u},         {"b", p.b}, {"k_z", p.k_z},
                {"k_x", p.k_x}, {"k_y", p.k_y},     {"k", p.k}, {"sigma", p.sigma},
                {"l", p.l}};
}

Config defaults() {
    Config cfg;
    cfg.scenario.patch1 = Patch{1, 0.2, 1.0, -0.15, 0.15};
    cfg.scenario.patch2 = cfg.scenario.patch1.mirrored();
    cfg.scenario.agents.push_back(AgentSpec{AgentParams{}, 0.5, 0.6, 0.0});
    cfg.scenario.trash_patch2 = 12;
    cfg.scenario.integrator.t_end = 200.0;
    cfg.bifurcation.params = AgentParams{};
    cfg.bifurcation.params.k_x = 3.0;
    cfg.bifurcation.params.u = 1.1;
    cfg.bifurcation.params.b = 0.0;
    cfg.bifurcation.rho = 0.5;
    cfg.bifurcation.free_param = FreeParam::b;
    cfg.bifurcation.range_min = -0.35;
    cfg.bifurcation.range_max = 0.35;
    return cfg;
}

}  // namespace

Config parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    Config cfg = defaults();

    if (j.contains("scenario")) {
        const json& s = j["scenario"];
        Scenario& sc = cfg.scenario;
        read_into(s, "seed", sc.seed, "scenario");
        if (s.contains("patch1")) {
            const json& p = s["patch1"];
            read_into(p, "x_min", sc.patch1.x_min, "scenario.patch1");
            read_into(p, "x_max", sc.patch1.x_max, "scenario.patch1");
            read_into(p, "y_min", sc.patch1.y_min, "scenario.patch1");
            read_into(p, "y_max", sc.patch1.y_max, "scenario.patch1");
            sc.patch2 = sc.patch1.mirrored();
        }
        if (s.contains("agents")) {
            sc.agents.clear();
            int idx = 0;
            for (const json& a : s["agents"]) {
                const std::string where = "scenario.agents." + std::to_string(idx++);
                AgentSpec spec;
                read_into(a, "z0", spec.z0, where);
                read_into(a, "x0", spec.x0, where);
                read_into(a, "y0", spec.y0, where);
                if (a.contains("params")) spec.params = parse_params(a["params"], where);
                sc.agents.push_back(spec);
            }
        }
        if (s.contains("trash")) {
            const json& tr = s["trash"];
            read_into(tr, "patch1", sc.trash_patch1, "scenario.trash");
            read_into(tr, "patch2", sc.trash_patch2, "scenario.trash");
            if (tr.contains("items")) {
                sc.trash_items.clear();
                for (const json& it : tr["items"]) {
                    if (!it.is_array() || it.size() != 2)
                        throw std::invalid_argument("scenario.trash.items: expected [x, y] pairs");
                    sc.trash_items.push_back(TrashItem{it[0].get<double>(), it[1].get<double>()});
                }
            }
        }
        if (s.contains("events")) {
            sc.events.clear();
            int idx = 0;
            for (const json& e : s["events"]) {
                const std::string where = "scenario.events." + std::to_string(idx++);
                Event ev;
                read_into(e, "time", ev.time, where);
                std::string kind;
                read_into(e, "kind", kind, where);
                if (kind == "set_u")
                    ev.kind = EventKind::set_u;
                else if (kind == "set_kx")
                    ev.kind = EventKind::set_kx;
                else if (kind == "add_trash")
                    ev.kind = EventKind::add_trash;
                else
                    throw std::invalid_argument(where + ".kind: unknown event kind '" + kind + "'");
                read_into(e, "agent", ev.agent, where);
                read_into(e, "patch", ev.patch, where);
                read_into(e, "value", ev.value, where);
                read_into(e, "count", ev.count, where);
                sc.events.push_back(ev);
            }
        }
    }
    if (j.contains("environment")) {
        const json& e = j["environment"];
        read_into(e, "q0", cfg.scenario.environment.q0, "environment");
        read_into(e, "epsilon", cfg.scenario.environment.epsilon, "environment");
        read_into(e, "q_min", cfg.scenario.environment.q_min, "environment");
        read_into(e, "pickup_radius", cfg.scenario.environment.pickup_radius, "environment");
    }
    if (j.contains("integrator")) {
        const json& i = j["integrator"];
        IntegratorConfig& ic = cfg.scenario.integrator;
        read_into(i, "dt", ic.dt, "integrator");
        read_into(i, "t_end", ic.t_end, "integrator");
        read_into(i, "arrival_tol", ic.arrival_tol, "integrator");
        read_into(i, "stall_speed_frac", ic.stall_speed_frac, "integrator");
        read_into(i, "stall_steps", ic.stall_steps, "integrator");
    }
    if (j.contains("safety")) {
        const json& s = j["safety"];
        SafetyConfig& sf = cfg.scenario.safety;
        read_into(s, "agent_radius", sf.agent_radius, "safety");
        read_into(s, "margin", sf.margin, "safety");
        read_into(s, "gain_alpha", sf.gain_alpha, "safety");
        read_into(s, "window_steps", sf.window_steps, "safety");
    }
    if (j.contains("bifurcation")) {
        const json& b = j["bifurcation"];
        BifurcationProblem& bp = cfg.bifurcation;
        if (b.contains("params")) bp.params = parse_params(b["params"], "bifurcation");
        read_into(b, "rho", bp.rho, "bifurcation");
        if (b.contains("free_param")) {
            const std::string f = b["free_param"].get<std::string>();
            if (f == "u")
                bp.free_param = FreeParam::u;
            else if (f == "b")
                bp.free_param = FreeParam::b;
            else
                throw std::invalid_argument("bifurcation.free_param must be 'u' or 'b'");
        }
        if (b.contains("range")) {
            const json& r = b["range"];
            if (!r.is_array() || r.size() != 2)
                throw std::invalid_argument("bifurcation.range: expected [min, max]");
            bp.range_min = r[0].get<double>();
            bp.range_max = r[1].get<double>();
            if (!(bp.range_min < bp.range_max))
                throw std::invalid_argument("bifurcation.range: min must be < max");
        }
        read_into(b, "initial_step", bp.initial_step, "bifurcation");
        read_into(b, "max_step", bp.max_step, "bifurcation");
        read_into(b, "tol", bp.tol, "bifurcation");
        read_into(b, "max_samples", bp.max_samples, "bifurcation");
    }
    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        cfg.has_sweep = true;
        std::string p = "u";
        read_into(s, "param", p, "sweep");
        if (p == "u")
            cfg.sweep.param = ThresholdParam::u;
        else if (p == "k_x")
            cfg.sweep.param = ThresholdParam::k_x;
        else
            throw std::invalid_argument("sweep.param must be 'u' or 'k_x'");
        if (s.contains("values")) {
            cfg.sweep.values = s["values"].get<std::vector<double>>();
        } else if (s.contains("from") && s.contains("to") && s.contains("count")) {
            const double lo = s["from"].get<double>(), hi = s["to"].get<double>();
            const int n = s["count"].get<int>();
            if (n < 1) throw std::invalid_argument("sweep.count must be >= 1");
            for (int i = 0; i < n; ++i)
                cfg.sweep.values.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        } else {
            throw std::invalid_argument("sweep: needs 'values' or 'from'/'to'/'count'");
        }
        if (cfg.sweep.values.empty()) throw std::invalid_argument("sweep.values is empty");
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string apply_overrides(const std::string& json_text,
                            const std::vector<std::string>& overrides) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("override must look like path.to.key=value: " + ov);
        const std::string path = ov.substr(0, eq);
        const std::string value = ov.substr(eq + 1);
        json* node = &j;
        std::stringstream ss(path);
        std::string part;
        std::vector<std::string> parts;
        while (std::getline(ss, part, '.')) parts.push_back(part);
        if (parts.empty()) throw std::invalid_argument("empty override path: " + ov);
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
            const std::string& key = parts[i];
            if (!key.empty() && key.find_first_not_of("0123456789") == std::string::npos) {
                const std::size_t idx = std::stoul(key);
                if (!node->is_array() || idx >= node->size())
                    throw std::invalid_argument("override index out of range: " + ov);
                node = &(*node)[idx];
            } else {
                node = &(*node)[key];
            }
        }
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::parse_error&) {
            parsed = value;  // bare strings pass through
        }
        const std::string& last = parts.back();
        if (!last.empty() && last.find_first_not_of("0123456789") == std::string::npos &&
            node->is_array()) {
            const std::size_t idx = std::stoul(last);
            if (idx >= node->size())
                throw std::invalid_argument("override index out of range: " + ov);
            (*node)[idx] = parsed;
        } else {
            (*node)[last] = parsed;
        }
    }
    return j.dump(2);
}

std::string dump_config(const Config& cfg) {
    const Scenario& sc = cfg.scenario;
    json agents = json::array();
    for (const AgentSpec& a : sc.agents)
        agents.push_back(json{{"z0", a.z0}, {"x0", a.x0}, {"y0", a.y0},
                              {"params", params_json(a.params)}});
    json events = json::array();
    for (const Event& e : sc.events) {
        const char* kind = e.kind == EventKind::set_u ? "set_u"
                           : e.kind == EventKind::set_kx ? "set_kx" : "add_trash";
        events.push_back(json{{"time", e.time}, {"kind", kind}, {"agent", e.agent},
                              {"patch", e.patch}, {"value", e.value}, {"count", e.count}});
    }
    json items = json::array();
    for (const TrashItem& it : sc.trash_items) items.push_back(json::array({it.x, it.y}));

    json j{
        {"scenario",
         {{"seed", sc.seed},
          {"patch1",
           {{"x_min", sc.patch1.x_min}, {"x_max", sc.patch1.x_max},
            {"y_min", sc.patch1.y_min}, {"y_max", sc.patch1.y_max}}},
          {"agents", agents},
          {"trash", {{"patch1", sc.trash_patch1}, {"patch2", sc.trash_patch2}, {"items", items}}},
          {"events", events}}},
        {"environment",
         {{"q0", sc.environment.q0}, {"epsilon", sc.environment.epsilon},
          {"q_min", sc.environment.q_min}, {"pickup_radius", sc.environment.pickup_radius}}},
        {"integrator",
         {{"dt", sc.integrator.dt}, {"t_end", sc.integrator.t_end},
          {"arrival_tol", sc.integrator.arrival_tol},
          {"stall_speed_frac", sc.integrator.stall_speed_frac},
          {"stall_steps", sc.integrator.stall_steps}}},
        {"safety",
         {{"agent_radius", sc.safety.agent_radius}, {"margin", sc.safety.margin},
          {"gain_alpha", sc.safety.gain_alpha}, {"window_steps", sc.safety.window_steps}}},
        {"bifurcation",
         {{"params", params_json(cfg.bifurcation.params)}, {"rho", cfg.bifurcation.rho},
          {"free_param", cfg.bifurcation.free_param == FreeParam::u ? "u" : "b"},
          {"range", json::array({cfg.bifurcation.range_min, cfg.bifurcation.range_max})},
          {"initial_step", cfg.bifurcation.initial_step}, {"max_step", cfg.bifurcation.max_step},
          {"tol", cfg.bifurcation.tol}, {"max_samples", cfg.bifurcation.max_samples}}}};
    if (cfg.has_sweep)
        j["sweep"] = json{{"param", cfg.sweep.param == ThresholdParam::u ? "u" : "k_x"},
                          {"values", cfg.sweep.values}};
    return j.dump(2);
}

std::string dump_default_config() { return dump_config(defaults()); }

}  // namespace opdsim
