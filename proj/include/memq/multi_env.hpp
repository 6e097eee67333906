#pragma once

// Model estimation from sampled trajectories and construction of the family
// of synthetic n-hop environments: member n has per-action transition matrix
// (P_a)^n, the single-step estimated costs, and effective discount gamma^n.

#include "memq/mdp.hpp"
#include "memq/simulator.hpp"

#include <cstdint>
#include <vector>

namespace memq {

class CoverageFailure : public std::runtime_error {
  public:
    CoverageFailure(const std::string& msg, std::vector<std::pair<int, int>> pairs)
        : std::runtime_error(msg), uncovered(std::move(pairs)) {}
    std::vector<std::pair<int, int>> uncovered;
};

struct EstimatedModel {
    int num_states = 0;
    int num_actions = 0;
    double gamma = 0.0;
    std::vector<uint64_t> transition_counts; // [a][s][s2]
    std::vector<double> cost_sums;           // [a][s]
    std::vector<uint64_t> visit_counts;      // [a][s]
    int min_visits = 0;
    int trajectory_length = 0;

    uint64_t count(int s, int a, int s2) const {
        return transition_counts[(static_cast<size_t>(a) * num_states + s) * num_states + s2];
    }
    uint64_t visits(int s, int a) const {
        return visit_counts[static_cast<size_t>(a) * num_states + s];
    }

    // Empirical-frequency transition rows and sample-mean costs.
    Mdp to_mdp() const;
};

struct EnvMember {
    int order = 1;   // n
    Mdp env;         // transitions (P_a)^n, costs c, gamma = base_gamma^n
};

struct EnvironmentFamily {
    Mdp base;        // estimated base model (order 1)
    std::vector<EnvMember> members;
    int k_total = 0;

    const EnvMember& member(int order) const;
};

// Collects epsilon-greedy (epsilon = 1, uniform) trajectories of length
// trajectory_length with uniformly random restart states until every (s,a)
// pair has at least min_visits samples. Throws CoverageFailure listing the
// uncovered pairs when episode_cap episodes were not enough.
EstimatedModel sample_and_estimate(const Simulator& sim, int min_visits,
                                   int trajectory_length, uint64_t seed,
                                   long episode_cap = -1);

EnvironmentFamily build_family(const Mdp& base, int k_total);

} // namespace memq
