#pragma once

// Random network-graph MDP generation controlled by four structural knobs:
// structure (block-circulant vs free), sparsity, directionality, regularity.
// All actions share one adjacency support; per-action probabilities and costs
// differ. Knob predicates are enforced as per-instance minima and can be
// re-measured from any generated tensor via measure_stats.

#include "memq/mdp.hpp"

#include <cstdint>
#include <vector>

namespace memq {

enum class Structure { structured, unstructured };
enum class Sparsity { sparse, dense };
enum class Direction { directed, undirected };
enum class Regularity { regular, irregular };

struct GraphSpec {
    int num_states = 100;
    int num_actions = 4;
    Structure structure = Structure::structured;
    Sparsity sparsity = Sparsity::sparse;
    Direction direction = Direction::undirected;
    Regularity regularity = Regularity::regular;
    int degree_lo = 0;
    int degree_hi = 5;
    double sparsity_threshold = 0.8;
    double direction_ratio = 0.5;
    double cost_low = 0.5;
    double cost_high = 1.0;
    int block_count = 4;
    double gamma = 0.9;
    uint64_t seed = 0;

    void validate() const;
};

struct KnobDeltas {
    double sparsity_threshold = 0.0;
    double direction_ratio = 0.0;
    int degree_lo = 0;
    int degree_hi = 0;
    double cost_low = 0.0;
    double cost_high = 0.0;
};

struct GraphStats {
    double zero_fraction = 0.0;
    double nonzero_fraction = 0.0;
    double one_directional_fraction = 0.0; // over connected off-diagonal pairs
    bool symmetric_adjacency = false;
    bool all_out_degrees_equal = false;
    int min_out_degree = 0;
    int max_out_degree = 0;
    std::vector<int> out_degrees;
};

Mdp generate(const GraphSpec& spec);
GraphSpec perturb(const GraphSpec& spec, const KnobDeltas& deltas);

GraphStats measure_stats(const Mdp& mdp);

// True iff the per-action transition matrix equals the block-circulant
// completion of its first block row (values, not just support).
bool is_block_circulant(const Mdp& mdp, int action, int block_count);

std::string spec_to_json(const GraphSpec& spec);
GraphSpec spec_from_json(const std::string& text);

} // namespace memq
