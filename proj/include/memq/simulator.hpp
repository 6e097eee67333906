#pragma once

// Sampling access to an MDP: per-(s,a) cumulative rows for O(log S) next-state
// draws, deterministic given the caller's Rng stream. Optional zero-mean
// bounded noise on instantaneous cost samples (off by default).

#include "memq/mdp.hpp"
#include "memq/rng.hpp"

#include <algorithm>

namespace memq {

class Simulator {
  public:
    explicit Simulator(const Mdp& mdp, double cost_noise = 0.0)
        : mdp_(&mdp), cost_noise_(cost_noise) {
        const int S = mdp.num_states, A = mdp.num_actions;
        cdf_.resize(static_cast<size_t>(S) * A * S);
        for (int a = 0; a < A; ++a)
            for (int s = 0; s < S; ++s) {
                std::span<const double> row = mdp.row(s, a);
                double acc = 0.0;
                size_t base = (static_cast<size_t>(a) * S + s) * S;
                for (int s2 = 0; s2 < S; ++s2) {
                    acc += row[s2];
                    cdf_[base + s2] = acc;
                }
            }
    }

    const Mdp& mdp() const { return *mdp_; }

    int next_state(int s, int a, Rng& rng) const {
        size_t base = (static_cast<size_t>(a) * mdp_->num_states + s) *
                      static_cast<size_t>(mdp_->num_states);
        return rng.from_cdf({&cdf_[base], static_cast<size_t>(mdp_->num_states)});
    }

    double sample_cost(int s, int a, Rng& rng) const {
        double c = mdp_->cost(s, a);
        if (cost_noise_ > 0.0)
            c = std::max(1e-12, c + rng.uniform(-cost_noise_, cost_noise_));
        return c;
    }

  private:
    const Mdp* mdp_;
    double cost_noise_;
    std::vector<double> cdf_;
};

} // namespace memq
