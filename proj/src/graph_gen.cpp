#include "memq/graph_gen.hpp"
#include "memq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace memq {
namespace {

using Support = std::vector<uint8_t>; // S*S, row-major

struct SupportView {
    Support cells;
    int S;
    uint8_t& at(int s, int s2) { return cells[static_cast<size_t>(s) * S + s2]; }
    uint8_t at(int s, int s2) const { return cells[static_cast<size_t>(s) * S + s2]; }
};

int out_degree(const SupportView& sup, int s) {
    int d = 0;
    for (int s2 = 0; s2 < sup.S; ++s2) d += sup.at(s, s2);
    return d;
}

[[noreturn]] void infeasible(const std::string& why) {
    throw std::invalid_argument("generate: infeasible knob combination: " + why);
}

// Symmetric circulant offset set of the requested size: offset 0 first when
// the size is odd, then +-1, +-2, ...
std::vector<int> symmetric_offsets(int S, int d) {
    std::vector<int> off;
    int remaining = d;
    if (remaining % 2 == 1) {
        off.push_back(0);
        --remaining;
    }
    for (int k = 1; remaining >= 2 && k <= (S - 1) / 2; ++k) {
        off.push_back(k);
        off.push_back(S - k);
        remaining -= 2;
    }
    if (remaining >= 2 && S % 2 == 0) {
        // S/2 is its own mirror; combine with 0 to absorb the leftover pair
        off.push_back(S / 2);
        --remaining;
        if (std::find(off.begin(), off.end(), 0) == off.end()) {
            off.push_back(0);
            --remaining;
        }
    }
    if (remaining > 0) infeasible("regular degree exceeds representable symmetric offsets");
    return off;
}

SupportView circulant_support(int S, const std::vector<int>& offsets) {
    SupportView sup{Support(static_cast<size_t>(S) * S, 0), S};
    for (int s = 0; s < S; ++s)
        for (int k : offsets) sup.at(s, (s + k) % S) = 1;
    return sup;
}

std::vector<int> draw_degrees(int S, int lo, int hi, Rng& rng) {
    std::vector<int> deg(S);
    for (int tries = 0; tries < 200; ++tries) {
        for (int s = 0; s < S; ++s) deg[s] = rng.range(lo, hi);
        bool varied = false;
        for (int s = 1; s < S; ++s) varied |= (deg[s] != deg[0]);
        if (varied) return deg;
    }
    infeasible("could not draw a varied degree sequence");
}

// Symmetric 0/1 matrix with a prescribed degree sequence, self-loops allowed
// as a last resort (a self-loop adds one to its row degree). Returns false
// when the sequence cannot be realized.
bool symmetric_with_degrees(SupportView& sup, std::vector<int> demand) {
    const int n = static_cast<int>(demand.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int round = 0; round < n; ++round) {
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return demand[a] > demand[b] || (demand[a] == demand[b] && a < b);
        });
        int o = order[0];
        if (demand[o] == 0) return true;
        for (int j = 1; j < n && demand[o] > 0; ++j) {
            int q = order[j];
            if (demand[q] <= 0 || sup.at(o, q)) continue;
            sup.at(o, q) = 1;
            sup.at(q, o) = 1;
            --demand[o];
            --demand[q];
        }
        if (demand[o] > 0 && !sup.at(o, o)) {
            sup.at(o, o) = 1;
            --demand[o];
        }
        if (demand[o] > 0) return false;
    }
    for (int i = 0; i < n; ++i)
        if (demand[i] > 0) return false;
    return true;
}

double measured_zero_fraction(const SupportView& sup) {
    size_t nz = 0;
    for (uint8_t b : sup.cells) nz += b;
    return 1.0 - static_cast<double>(nz) / static_cast<double>(sup.cells.size());
}

double measured_one_dir(const SupportView& sup) {
    long connected = 0, one_dir = 0;
    for (int s = 0; s < sup.S; ++s)
        for (int s2 = s + 1; s2 < sup.S; ++s2) {
            bool ab = sup.at(s, s2), ba = sup.at(s2, s);
            if (ab || ba) {
                ++connected;
                if (ab != ba) ++one_dir;
            }
        }
    if (connected == 0) return 0.0;
    return static_cast<double>(one_dir) / static_cast<double>(connected);
}

void add_self_loops_for_isolated(SupportView& sup) {
    for (int s = 0; s < sup.S; ++s)
        if (out_degree(sup, s) == 0) sup.at(s, s) = 1;
}

// ---- structured (block-circulant) supports -------------------------------

// Assemble the full support from a first block row ("strip", L x S).
SupportView assemble_block_circulant(const std::vector<uint8_t>& strip, int S, int B) {
    const int L = S / B;
    SupportView sup{Support(static_cast<size_t>(S) * S, 0), S};
    for (int r = 0; r < B; ++r)
        for (int o = 0; o < L; ++o)
            for (int cb = 0; cb < B; ++cb) {
                int src_block = (cb - r % B + B) % B;
                for (int pcol = 0; pcol < L; ++pcol)
                    sup.at(r * L + o, cb * L + pcol) =
                        strip[static_cast<size_t>(o) * S + src_block * L + pcol];
            }
    return sup;
}

SupportView structured_support(const GraphSpec& spec, Rng& rng) {
    const int S = spec.num_states, B = spec.block_count, L = S / B;
    if (spec.regularity == Regularity::regular) {
        int d;
        if (spec.sparsity == Sparsity::sparse)
            d = std::max(1, static_cast<int>(std::lround((spec.degree_lo + spec.degree_hi) / 2.0)));
        else
            d = static_cast<int>(std::lround(0.9 * S));
        if (d > S) infeasible("regular degree exceeds the number of states");
        std::vector<int> offsets;
        if (spec.direction == Direction::undirected) {
            offsets = symmetric_offsets(S, d);
        } else {
            if (d >= (S + 1) / 2)
                infeasible("directed structured graph cannot reach the one-directional "
                           "ratio at this degree");
            for (int k = 1; k <= d; ++k) offsets.push_back(k);
        }
        return circulant_support(S, offsets);
    }
    // irregular: per-offset degrees in a block-circulant strip
    std::vector<int> lohi = {spec.degree_lo, spec.degree_hi};
    if (spec.sparsity == Sparsity::dense) {
        if (spec.direction == Direction::undirected)
            infeasible("structured+irregular+undirected+dense is not representable by "
                       "the diagonal-block construction");
        lohi[0] = static_cast<int>(std::ceil(0.85 * S));
        lohi[1] = S;
    }
    std::vector<uint8_t> strip(static_cast<size_t>(L) * S, 0);
    if (spec.direction == Direction::directed) {
        std::vector<int> deg(L);
        for (int tries = 0;; ++tries) {
            for (int o = 0; o < L; ++o) deg[o] = rng.range(lohi[0], lohi[1]);
            bool varied = false;
            for (int o = 1; o < L; ++o) varied |= (deg[o] != deg[0]);
            if (varied) break;
            if (tries == 200) infeasible("could not draw a varied per-offset degree sequence");
        }
        std::vector<int> cols(S);
        std::iota(cols.begin(), cols.end(), 0);
        for (int o = 0; o < L; ++o) {
            if (deg[o] == 0) {
                strip[static_cast<size_t>(o) * S + o] = 1; // self-loop fallback
                continue;
            }
            rng.shuffle(cols);
            for (int k = 0; k < deg[o]; ++k) strip[static_cast<size_t>(o) * S + cols[k]] = 1;
        }
    } else {
        // keep all of the symmetric demand inside the diagonal block T_0 so
        // the assembled matrix is both block-circulant and symmetric; block
        // size caps the per-offset degree
        int hi_cap = std::min(lohi[1], L);
        int lo_cap = std::min(lohi[0], hi_cap);
        if (lo_cap >= hi_cap)
            infeasible("degree range collapses under the block-size cap");
        bool built = false;
        for (int tries = 0; tries < 200 && !built; ++tries) {
            std::vector<int> deg(L);
            for (int o = 0; o < L; ++o) deg[o] = rng.range(lo_cap, hi_cap);
            bool varied = false;
            for (int o = 1; o < L; ++o) varied |= (deg[o] != deg[0]);
            if (!varied) continue;
            SupportView t0{Support(static_cast<size_t>(L) * L, 0), L};
            if (!symmetric_with_degrees(t0, deg)) continue;
            for (int o = 0; o < L; ++o)
                for (int q = 0; q < L; ++q)
                    strip[static_cast<size_t>(o) * S + q] = t0.at(o, q);
            built = true;
        }
        if (!built) infeasible("no symmetric block realizes the degree range");
        for (int o = 0; o < L; ++o) {
            bool any = false;
            for (int q = 0; q < S; ++q) any |= strip[static_cast<size_t>(o) * S + q];
            if (!any) strip[static_cast<size_t>(o) * S + o] = 1;
        }
    }
    return assemble_block_circulant(strip, S, B);
}

// ---- unstructured supports -----------------------------------------------

SupportView random_out_rows(int S, const std::vector<int>& degrees, Rng& rng) {
    SupportView sup{Support(static_cast<size_t>(S) * S, 0), S};
    std::vector<int> cols(S);
    std::iota(cols.begin(), cols.end(), 0);
    for (int s = 0; s < S; ++s) {
        if (degrees[s] == 0) {
            sup.at(s, s) = 1;
            continue;
        }
        rng.shuffle(cols);
        for (int k = 0; k < degrees[s]; ++k) sup.at(s, cols[k]) = 1;
    }
    return sup;
}

void randomize_symmetric(SupportView& sup, Rng& rng, int swaps) {
    // degree-preserving double-edge swaps on the undirected edge list
    struct Edge { int a, b; };
    std::vector<Edge> edges;
    for (int s = 0; s < sup.S; ++s)
        for (int s2 = s; s2 < sup.S; ++s2)
            if (sup.at(s, s2)) edges.push_back({s, s2});
    if (edges.size() < 2) return;
    for (int it = 0; it < swaps; ++it) {
        size_t i = rng.below(edges.size());
        size_t j = rng.below(edges.size());
        if (i == j) continue;
        Edge e1 = edges[i], e2 = edges[j];
        if (e1.a == e1.b || e2.a == e2.b) continue; // leave self-loops in place
        int a = e1.a, b = e1.b, c = e2.a, d = e2.b;
        if (rng.bernoulli(0.5)) std::swap(c, d);
        if (a == c || a == d || b == c || b == d) continue;
        if (sup.at(a, c) || sup.at(b, d)) continue;
        sup.at(a, b) = sup.at(b, a) = 0;
        sup.at(c, d) = sup.at(d, c) = 0;
        sup.at(a, c) = sup.at(c, a) = 1;
        sup.at(b, d) = sup.at(d, b) = 1;
        edges[i] = {std::min(a, c), std::max(a, c)};
        edges[j] = {std::min(b, d), std::max(b, d)};
    }
}

SupportView stub_matched_symmetric(int S, const std::vector<int>& degrees, Rng& rng) {
    SupportView sup{Support(static_cast<size_t>(S) * S, 0), S};
    std::vector<int> stubs;
    for (int s = 0; s < S; ++s)
        for (int k = 0; k < degrees[s]; ++k) stubs.push_back(s);
    rng.shuffle(stubs);
    std::vector<int> leftover;
    for (size_t i = 0; i + 1 < stubs.size(); i += 2) {
        int a = stubs[i], b = stubs[i + 1];
        if (a == b || sup.at(a, b)) {
            leftover.push_back(a);
            leftover.push_back(b);
            continue;
        }
        sup.at(a, b) = sup.at(b, a) = 1;
    }
    if (stubs.size() % 2 == 1) leftover.push_back(stubs.back());
    for (int pass = 0; pass < 20 && leftover.size() >= 2; ++pass) {
        rng.shuffle(leftover);
        std::vector<int> next;
        for (size_t i = 0; i + 1 < leftover.size(); i += 2) {
            int a = leftover[i], b = leftover[i + 1];
            if (a == b || sup.at(a, b)) {
                next.push_back(a);
                next.push_back(b);
                continue;
            }
            sup.at(a, b) = sup.at(b, a) = 1;
        }
        if (leftover.size() % 2 == 1) next.push_back(leftover.back());
        leftover = std::move(next);
    }
    for (int a : leftover)
        if (!sup.at(a, a)) sup.at(a, a) = 1;
    add_self_loops_for_isolated(sup);
    return sup;
}

SupportView dense_symmetric_irregular(int S, Rng& rng) {
    SupportView sup{Support(static_cast<size_t>(S) * S, 0), S};
    std::vector<double> q(S);
    for (int s = 0; s < S; ++s) q[s] = rng.uniform(0.88, 0.97);
    for (int s = 0; s < S; ++s) {
        if (rng.bernoulli(q[s])) sup.at(s, s) = 1;
        for (int s2 = s + 1; s2 < S; ++s2)
            if (rng.bernoulli(0.5 * (q[s] + q[s2]))) sup.at(s, s2) = sup.at(s2, s) = 1;
    }
    add_self_loops_for_isolated(sup);
    return sup;
}

SupportView unstructured_support(const GraphSpec& spec, Rng& rng) {
    const int S = spec.num_states;
    if (spec.regularity == Regularity::regular) {
        int d;
        if (spec.sparsity == Sparsity::sparse)
            d = std::max(1, static_cast<int>(std::lround((spec.degree_lo + spec.degree_hi) / 2.0)));
        else
            d = static_cast<int>(std::lround(0.9 * S));
        if (d > S) infeasible("regular degree exceeds the number of states");
        if (spec.direction == Direction::directed) {
            return random_out_rows(S, std::vector<int>(S, d), rng);
        }
        SupportView sup = circulant_support(S, symmetric_offsets(S, d));
        randomize_symmetric(sup, rng, 20 * S * d);
        return sup;
    }
    // irregular
    if (spec.sparsity == Sparsity::dense) {
        if (spec.direction == Direction::directed)
            infeasible("dense+directed cannot satisfy both thresholds");
        return dense_symmetric_irregular(S, rng);
    }
    std::vector<int> deg = draw_degrees(S, spec.degree_lo, spec.degree_hi, rng);
    if (spec.direction == Direction::directed) return random_out_rows(S, deg, rng);
    return stub_matched_symmetric(S, deg, rng);
}

bool knobs_satisfied(const GraphSpec& spec, const SupportView& sup) {
    double zf = measured_zero_fraction(sup);
    if (spec.sparsity == Sparsity::sparse && zf < spec.sparsity_threshold) return false;
    if (spec.sparsity == Sparsity::dense && (1.0 - zf) < spec.sparsity_threshold) return false;
    if (spec.direction == Direction::directed &&
        measured_one_dir(sup) < spec.direction_ratio)
        return false;
    if (spec.direction == Direction::undirected) {
        for (int s = 0; s < sup.S; ++s)
            for (int s2 = s + 1; s2 < sup.S; ++s2)
                if (sup.at(s, s2) != sup.at(s2, s)) return false;
    }
    std::vector<int> deg(sup.S);
    for (int s = 0; s < sup.S; ++s) deg[s] = out_degree(sup, s);
    if (spec.regularity == Regularity::regular) {
        for (int s = 1; s < sup.S; ++s)
            if (deg[s] != deg[0]) return false;
    } else {
        bool varied = false;
        for (int s = 1; s < sup.S; ++s) varied |= (deg[s] != deg[0]);
        if (!varied) return false;
        int hi = spec.sparsity == Sparsity::dense ? sup.S : std::max(spec.degree_hi, 1);
        for (int s = 0; s < sup.S; ++s)
            if (deg[s] < 0 || deg[s] > hi) return false;
    }
    return true;
}

} // namespace

void GraphSpec::validate() const {
    if (num_states <= 0 || num_actions <= 0)
        throw std::invalid_argument("GraphSpec: state/action counts must be positive");
    if (!(cost_low > 0.0) || !(cost_low < cost_high))
        throw std::invalid_argument("GraphSpec: need 0 < cost_low < cost_high");
    if (degree_lo < 0 || degree_hi < degree_lo)
        throw std::invalid_argument("GraphSpec: degree range must be nonnegative and ordered");
    if (!(sparsity_threshold > 0.0 && sparsity_threshold < 1.0))
        throw std::invalid_argument("GraphSpec: sparsity_threshold must be in (0,1)");
    if (!(direction_ratio > 0.0 && direction_ratio < 1.0))
        throw std::invalid_argument("GraphSpec: direction_ratio must be in (0,1)");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("GraphSpec: gamma must be in (0,1)");
    if (block_count <= 0) throw std::invalid_argument("GraphSpec: block_count must be positive");
}

Mdp generate(const GraphSpec& spec) {
    spec.validate();
    const int S = spec.num_states, A = spec.num_actions;
    if (spec.structure == Structure::structured && S % spec.block_count != 0)
        infeasible("block_count must divide the number of states for structured graphs");
    if (spec.sparsity == Sparsity::dense && spec.direction == Direction::directed)
        infeasible("dense+directed: at >=80% nonzero entries the one-directional "
                   "fraction of connected pairs is at most 0.4 < direction_ratio");
    if (spec.regularity == Regularity::irregular && spec.degree_lo == spec.degree_hi)
        infeasible("irregular requires a nondegenerate degree range");
    if (spec.sparsity == Sparsity::sparse) {
        double max_mean_degree = (1.0 - spec.sparsity_threshold) * S;
        double target = spec.regularity == Regularity::regular
                            ? std::max(1.0, std::round((spec.degree_lo + spec.degree_hi) / 2.0))
                            : (spec.degree_lo + spec.degree_hi) / 2.0;
        if (target > max_mean_degree)
            infeasible("degree range too large for the requested sparsity threshold");
    }

    SupportView sup{Support(), S};
    bool ok = false;
    for (int attempt = 0; attempt < 50 && !ok; ++attempt) {
        Rng rng(derive_seed(spec.seed, "graph-support", static_cast<uint64_t>(attempt)));
        sup = spec.structure == Structure::structured ? structured_support(spec, rng)
                                                      : unstructured_support(spec, rng);
        ok = knobs_satisfied(spec, sup);
    }
    if (!ok) infeasible("no support satisfying all knob predicates found in 50 attempts");

    Mdp mdp(S, A, spec.gamma);
    Rng wrng(derive_seed(spec.seed, "graph-weights"));
    if (spec.structure == Structure::structured) {
        // weights are drawn for the first block row only and replicated by the
        // same block shift as the support, so values stay block-circulant and
        // bit-identical across block rows after normalization
        const int B = spec.block_count, L = S / B;
        for (int a = 0; a < A; ++a) {
            std::vector<double> strip(static_cast<size_t>(L) * S, 0.0);
            std::vector<double> rowsum(L, 0.0);
            for (int o = 0; o < L; ++o)
                for (int col = 0; col < S; ++col)
                    if (sup.at(o, col)) {
                        double w = wrng.uniform01();
                        strip[static_cast<size_t>(o) * S + col] = w;
                        rowsum[o] += w;
                    }
            for (int r = 0; r < B; ++r)
                for (int o = 0; o < L; ++o)
                    for (int cb = 0; cb < B; ++cb) {
                        int src_block = (cb - r % B + B) % B;
                        for (int pcol = 0; pcol < L; ++pcol) {
                            double w = strip[static_cast<size_t>(o) * S + src_block * L + pcol];
                            if (w != 0.0)
                                mdp.prob(r * L + o, a, cb * L + pcol) = w / rowsum[o];
                        }
                    }
        }
    } else {
        for (int a = 0; a < A; ++a)
            for (int s = 0; s < S; ++s) {
                double sum = 0.0;
                std::span<double> row = mdp.row_mut(s, a);
                for (int s2 = 0; s2 < S; ++s2)
                    if (sup.at(s, s2)) {
                        row[s2] = wrng.uniform01();
                        sum += row[s2];
                    }
                for (int s2 = 0; s2 < S; ++s2)
                    if (row[s2] != 0.0) row[s2] /= sum;
            }
    }
    Rng crng(derive_seed(spec.seed, "graph-costs"));
    for (int a = 0; a < A; ++a)
        for (int s = 0; s < S; ++s) mdp.cost(s, a) = crng.uniform(spec.cost_low, spec.cost_high);
    mdp.validate();
    return mdp;
}

GraphSpec perturb(const GraphSpec& spec, const KnobDeltas& deltas) {
    GraphSpec out = spec;
    out.sparsity_threshold += deltas.sparsity_threshold;
    out.direction_ratio += deltas.direction_ratio;
    out.degree_lo += deltas.degree_lo;
    out.degree_hi += deltas.degree_hi;
    out.cost_low += deltas.cost_low;
    out.cost_high += deltas.cost_high;
    out.validate();
    return out;
}

GraphStats measure_stats(const Mdp& mdp) {
    const int S = mdp.num_states, A = mdp.num_actions;
    GraphStats st;
    size_t nz = 0;
    for (double x : mdp.p)
        if (x != 0.0) ++nz;
    st.nonzero_fraction = static_cast<double>(nz) / static_cast<double>(mdp.p.size());
    st.zero_fraction = 1.0 - st.nonzero_fraction;

    // aggregated adjacency: an edge exists if any action has positive probability
    std::vector<uint8_t> adj(static_cast<size_t>(S) * S, 0);
    for (int a = 0; a < A; ++a)
        for (int s = 0; s < S; ++s)
            for (int s2 = 0; s2 < S; ++s2)
                if (mdp.prob(s, a, s2) > 0.0) adj[static_cast<size_t>(s) * S + s2] = 1;

    long connected = 0, one_dir = 0;
    bool sym = true;
    for (int s = 0; s < S; ++s)
        for (int s2 = s + 1; s2 < S; ++s2) {
            bool ab = adj[static_cast<size_t>(s) * S + s2], ba = adj[static_cast<size_t>(s2) * S + s];
            if (ab != ba) sym = false;
            if (ab || ba) {
                ++connected;
                if (ab != ba) ++one_dir;
            }
        }
    st.symmetric_adjacency = sym;
    st.one_directional_fraction =
        connected ? static_cast<double>(one_dir) / static_cast<double>(connected) : 0.0;

    st.out_degrees.resize(S, 0);
    for (int s = 0; s < S; ++s)
        for (int s2 = 0; s2 < S; ++s2) st.out_degrees[s] += adj[static_cast<size_t>(s) * S + s2];
    st.min_out_degree = *std::min_element(st.out_degrees.begin(), st.out_degrees.end());
    st.max_out_degree = *std::max_element(st.out_degrees.begin(), st.out_degrees.end());
    st.all_out_degrees_equal = st.min_out_degree == st.max_out_degree;
    return st;
}

bool is_block_circulant(const Mdp& mdp, int action, int block_count) {
    const int S = mdp.num_states;
    if (block_count <= 0 || S % block_count != 0) return false;
    const int B = block_count, L = S / B;
    for (int r = 1; r < B; ++r)
        for (int cb = 0; cb < B; ++cb) {
            int src_block = (cb - r % B + B) % B;
            for (int o = 0; o < L; ++o)
                for (int pcol = 0; pcol < L; ++pcol)
                    if (mdp.prob(r * L + o, action, cb * L + pcol) !=
                        mdp.prob(o, action, src_block * L + pcol))
                        return false;
        }
    return true;
}

using nlohmann::json;

namespace {
std::string to_string(Structure v) { return v == Structure::structured ? "structured" : "unstructured"; }
std::string to_string(Sparsity v) { return v == Sparsity::sparse ? "sparse" : "dense"; }
std::string to_string(Direction v) { return v == Direction::directed ? "directed" : "undirected"; }
std::string to_string(Regularity v) { return v == Regularity::regular ? "regular" : "irregular"; }

template <typename T> T enum_from(const std::string& s);
template <> Structure enum_from<Structure>(const std::string& s) {
    if (s == "structured") return Structure::structured;
    if (s == "unstructured") return Structure::unstructured;
    throw std::invalid_argument("unknown structure: " + s);
}
template <> Sparsity enum_from<Sparsity>(const std::string& s) {
    if (s == "sparse") return Sparsity::sparse;
    if (s == "dense") return Sparsity::dense;
    throw std::invalid_argument("unknown sparsity: " + s);
}
template <> Direction enum_from<Direction>(const std::string& s) {
    if (s == "directed") return Direction::directed;
    if (s == "undirected") return Direction::undirected;
    throw std::invalid_argument("unknown direction: " + s);
}
template <> Regularity enum_from<Regularity>(const std::string& s) {
    if (s == "regular") return Regularity::regular;
    if (s == "irregular") return Regularity::irregular;
    throw std::invalid_argument("unknown regularity: " + s);
}
} // namespace

std::string spec_to_json(const GraphSpec& spec) {
    json j;
    j["num_states"] = spec.num_states;
    j["num_actions"] = spec.num_actions;
    j["structure"] = to_string(spec.structure);
    j["sparsity"] = to_string(spec.sparsity);
    j["direction"] = to_string(spec.direction);
    j["regularity"] = to_string(spec.regularity);
    j["degree_range"] = {spec.degree_lo, spec.degree_hi};
    j["sparsity_threshold"] = spec.sparsity_threshold;
    j["direction_ratio"] = spec.direction_ratio;
    j["cost_low"] = spec.cost_low;
    j["cost_high"] = spec.cost_high;
    j["block_count"] = spec.block_count;
    j["gamma"] = spec.gamma;
    j["seed"] = spec.seed;
    return j.dump();
}

GraphSpec spec_from_json(const std::string& text) {
    json j = json::parse(text);
    GraphSpec s;
    s.num_states = j.value("num_states", s.num_states);
    s.num_actions = j.value("num_actions", s.num_actions);
    if (j.contains("structure")) s.structure = enum_from<Structure>(j["structure"]);
    if (j.contains("sparsity")) s.sparsity = enum_from<Sparsity>(j["sparsity"]);
    if (j.contains("direction")) s.direction = enum_from<Direction>(j["direction"]);
    if (j.contains("regularity")) s.regularity = enum_from<Regularity>(j["regularity"]);
    if (j.contains("degree_range")) {
        s.degree_lo = j["degree_range"].at(0).get<int>();
        s.degree_hi = j["degree_range"].at(1).get<int>();
    }
    s.sparsity_threshold = j.value("sparsity_threshold", s.sparsity_threshold);
    s.direction_ratio = j.value("direction_ratio", s.direction_ratio);
    s.cost_low = j.value("cost_low", s.cost_low);
    s.cost_high = j.value("cost_high", s.cost_high);
    s.block_count = j.value("block_count", s.block_count);
    s.gamma = j.value("gamma", s.gamma);
    s.seed = j.value("seed", s.seed);
    s.validate();
    return s;
}

} // namespace memq
