#pragma once

// Run configuration: one JSON document with a versioned schema that resolves
// to the full parameter set (defaults filled). One root seed deterministically
// derives every stream used anywhere in a run.

#include "memq/bench.hpp"

#include <string>

namespace memq {

struct RunConfig {
    int schema_version = 1;
    GraphSpec graph;
    std::string graph_path; // when set, the MDP is loaded instead of generated
    PipelineOptions pipeline;
    long episode_cap = -1;
    std::string zeta = "uniform"; // "uniform" or a numeric value
    std::vector<std::pair<int, int>> tracked_pairs;
    uint64_t seed = 0;
    std::string scale = "desk"; // desk | paper
    bool emit_trace = false;

    void validate() const;
    ZetaMode zeta_mode() const;
};

std::string config_to_json(const RunConfig& cfg);
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::string& path);

} // namespace memq
