#include "memq/config.hpp"

#include <fstream>
#include <json.hpp>

namespace memq {

using nlohmann::json;

void RunConfig::validate() const {
    if (schema_version != 1)
        throw std::invalid_argument("config: unsupported schema_version (expected 1)");
    graph.validate();
    pipeline.schedules.validate();
    if (pipeline.k < 1 || pipeline.k > pipeline.k_total)
        throw std::invalid_argument("config.pipeline: need 1 <= k <= k_total");
    if (pipeline.min_visits_estimate < 1)
        throw std::invalid_argument("config.pipeline.min_visits_estimate: must be >= 1");
    if (pipeline.learn_min_visits < 1)
        throw std::invalid_argument("config.pipeline.learn_min_visits: must be >= 1");
    if (pipeline.trajectory_length < 2)
        throw std::invalid_argument("config.pipeline.trajectory_length: must be >= 2");
    if (pipeline.sync_every < 1)
        throw std::invalid_argument("config.pipeline.sync_every: must be >= 1");
    if (!(pipeline.u_fixed > 0.0 && pipeline.u_fixed < 1.0))
        throw std::invalid_argument("config.pipeline.u_fixed: must be in (0,1)");
    if (scale != "desk" && scale != "paper")
        throw std::invalid_argument("config.scale: must be desk or paper");
    if (zeta != "uniform") {
        double z = std::stod(zeta);
        if (!(z > 0.0 && z < 1.0))
            throw std::invalid_argument("config.zeta: numeric value must be in (0,1)");
    }
    for (auto [s, a] : tracked_pairs)
        if (s < 0 || s >= graph.num_states || a < 0 || a >= graph.num_actions)
            throw std::invalid_argument("config.tracked_pairs: index out of range");
}

ZetaMode RunConfig::zeta_mode() const {
    if (zeta == "uniform") return ZetaMode::random();
    return ZetaMode::fixed(std::stod(zeta));
}

std::string config_to_json(const RunConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["graph"] = json::parse(spec_to_json(cfg.graph));
    if (!cfg.graph_path.empty()) j["graph_path"] = cfg.graph_path;
    json p;
    p["min_visits_estimate"] = cfg.pipeline.min_visits_estimate;
    p["trajectory_length"] = cfg.pipeline.trajectory_length;
    p["k"] = cfg.pipeline.k;
    p["k_total"] = cfg.pipeline.k_total;
    p["schedules"] = {{"c1", cfg.pipeline.schedules.c1},
                      {"c2", cfg.pipeline.schedules.c2},
                      {"c3", cfg.pipeline.schedules.c3},
                      {"c4", cfg.pipeline.schedules.c4}};
    p["u_scheduled"] = cfg.pipeline.u_scheduled;
    p["u_fixed"] = cfg.pipeline.u_fixed;
    p["learn_min_visits"] = cfg.pipeline.learn_min_visits;
    p["budget_overshoot"] = cfg.pipeline.budget_overshoot;
    p["sync_every"] = cfg.pipeline.sync_every;
    p["threads"] = cfg.pipeline.threads;
    j["pipeline"] = std::move(p);
    j["episode_cap"] = cfg.episode_cap;
    j["zeta"] = cfg.zeta;
    json tp = json::array();
    for (auto [s, a] : cfg.tracked_pairs) tp.push_back({s, a});
    j["tracked_pairs"] = std::move(tp);
    j["seed"] = cfg.seed;
    j["scale"] = cfg.scale;
    j["emit_trace"] = cfg.emit_trace;
    return j.dump(2);
}

RunConfig config_from_json(const std::string& text) {
    json j = json::parse(text);
    RunConfig cfg;
    cfg.schema_version = j.value("schema_version", 1);
    if (j.contains("graph")) cfg.graph = spec_from_json(j["graph"].dump());
    cfg.graph_path = j.value("graph_path", std::string());
    if (j.contains("pipeline")) {
        const json& p = j["pipeline"];
        cfg.pipeline.min_visits_estimate =
            p.value("min_visits_estimate", cfg.pipeline.min_visits_estimate);
        cfg.pipeline.trajectory_length =
            p.value("trajectory_length", cfg.pipeline.trajectory_length);
        cfg.pipeline.k = p.value("k", cfg.pipeline.k);
        cfg.pipeline.k_total = p.value("k_total", cfg.pipeline.k_total);
        if (p.contains("schedules")) {
            const json& s = p["schedules"];
            cfg.pipeline.schedules.c1 = s.value("c1", cfg.pipeline.schedules.c1);
            cfg.pipeline.schedules.c2 = s.value("c2", cfg.pipeline.schedules.c2);
            cfg.pipeline.schedules.c3 = s.value("c3", cfg.pipeline.schedules.c3);
            cfg.pipeline.schedules.c4 = s.value("c4", cfg.pipeline.schedules.c4);
        }
        cfg.pipeline.u_scheduled = p.value("u_scheduled", cfg.pipeline.u_scheduled);
        cfg.pipeline.u_fixed = p.value("u_fixed", cfg.pipeline.u_fixed);
        cfg.pipeline.learn_min_visits =
            p.value("learn_min_visits", cfg.pipeline.learn_min_visits);
        cfg.pipeline.budget_overshoot =
            p.value("budget_overshoot", cfg.pipeline.budget_overshoot);
        cfg.pipeline.sync_every = p.value("sync_every", cfg.pipeline.sync_every);
        cfg.pipeline.threads = p.value("threads", cfg.pipeline.threads);
    }
    cfg.episode_cap = j.value("episode_cap", cfg.episode_cap);
    if (j.contains("zeta")) {
        if (j["zeta"].is_string())
            cfg.zeta = j["zeta"].get<std::string>();
        else
            cfg.zeta = j["zeta"].dump();
    }
    if (j.contains("tracked_pairs"))
        for (const auto& t : j["tracked_pairs"])
            cfg.tracked_pairs.emplace_back(t.at(0).get<int>(), t.at(1).get<int>());
    cfg.seed = j.value("seed", cfg.seed);
    cfg.scale = j.value("scale", cfg.scale);
    cfg.emit_trace = j.value("emit_trace", cfg.emit_trace);
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json(text);
}

} // namespace memq
