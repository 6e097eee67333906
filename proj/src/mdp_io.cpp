#include "memq/mdp.hpp"

#include <fstream>
#include <json.hpp>

namespace memq {

using nlohmann::json;

std::string mdp_to_json(const Mdp& mdp) {
    json j;
    j["num_states"] = mdp.num_states;
    j["num_actions"] = mdp.num_actions;
    j["gamma"] = mdp.gamma;
    json trans = json::array();
    for (int s = 0; s < mdp.num_states; ++s)
        for (int a = 0; a < mdp.num_actions; ++a)
            for (int s2 = 0; s2 < mdp.num_states; ++s2) {
                double pr = mdp.prob(s, a, s2);
                if (pr != 0.0) trans.push_back(json::array({s, a, s2, pr}));
            }
    j["transitions"] = std::move(trans);
    json costs = json::array();
    for (int s = 0; s < mdp.num_states; ++s)
        for (int a = 0; a < mdp.num_actions; ++a)
            costs.push_back(json::array({s, a, mdp.cost(s, a)}));
    j["costs"] = std::move(costs);
    return j.dump();
}

Mdp mdp_from_json(const std::string& text) {
    json j = json::parse(text);
    Mdp mdp(j.at("num_states").get<int>(), j.at("num_actions").get<int>(),
            j.at("gamma").get<double>());
    for (const auto& t : j.at("transitions")) {
        int s = t.at(0).get<int>(), a = t.at(1).get<int>(), s2 = t.at(2).get<int>();
        if (s < 0 || s >= mdp.num_states || a < 0 || a >= mdp.num_actions || s2 < 0 ||
            s2 >= mdp.num_states)
            throw std::invalid_argument("mdp_from_json: transition index out of range");
        mdp.prob(s, a, s2) = t.at(3).get<double>();
    }
    for (const auto& t : j.at("costs")) {
        int s = t.at(0).get<int>(), a = t.at(1).get<int>();
        if (s < 0 || s >= mdp.num_states || a < 0 || a >= mdp.num_actions)
            throw std::invalid_argument("mdp_from_json: cost index out of range");
        mdp.cost(s, a) = t.at(2).get<double>();
    }
    mdp.validate();
    return mdp;
}

void save_mdp(const Mdp& mdp, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("save_mdp: cannot open " + path);
    out << mdp_to_json(mdp) << "\n";
}

Mdp load_mdp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_mdp: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return mdp_from_json(text);
}

} // namespace memq
