#pragma once

// Tabular Q-learning per environment plus the ensemble combiner. The learning
// rate follows alpha_k = (1 + k/c1)^-1 at the updated pair's own update count
// k, exploration follows eps_t = max(c2^t, c3) on the member's step counter,
// and the ensemble ratio follows u_t = 1 - exp(-t/c4) on the global step
// counter (a fixed u is also supported).

#include "memq/mdp.hpp"
#include "memq/multi_env.hpp"
#include "memq/rng.hpp"
#include "memq/simulator.hpp"

#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

namespace memq {

struct Schedules {
    double c1 = 1000.0;
    double c2 = 0.999;
    double c3 = 0.05;
    double c4 = 2000.0;

    double alpha(uint64_t k) const { return 1.0 / (1.0 + static_cast<double>(k) / c1); }
    double eps(uint64_t t) const;
    double u(uint64_t t) const;
    void validate() const;
};

struct Sample {
    int s;
    int a;
    int s2;
    double cost;
};

// Q(s,a) <- (1-alpha) Q(s,a) + alpha (c + gamma_eff min_a' Q(s2,a')).
void apply_q_step(QTable& q, const Sample& sample, double alpha, double gamma_eff);
QTable q_step(const QTable& q, const Sample& sample, double alpha, double gamma_eff);

struct SingleEnvOptions {
    Schedules schedules;
    int min_visits = 40;
    int trajectory_length = 10;
    long episode_cap = -1; // negative: derived from min_visits
    double q_init_floor = 1e-3;
};

// Episodic epsilon-greedy Q-learning on one environment until every (s,a)
// has at least min_visits updates. Throws CoverageFailure on budget failure.
QTable run_single_env(const Simulator& env, const SingleEnvOptions& opts, uint64_t seed);

struct EnsembleState {
    std::vector<QTable> members;
    QTable ensemble;
    uint64_t t = 0;
};

// One synchronization step: ensemble <- u*ensemble + (1-u)*mean(members).
void ensemble_update(EnsembleState& state, double u);

struct TrackedPair {
    int s = 0;
    int a = 0;
    double ln_v = 0.0; // log of the exploration probability of this pair
};

struct CoverageSeries {
    std::vector<TrackedPair> pairs;
    std::vector<uint64_t> t;
    std::vector<std::vector<double>> ln_c; // [pair][record]
};

struct ErrorSnapshot {
    uint64_t t;
    double sum;
    double sumsq;
    uint64_t n;
};

struct EnsembleOptions {
    Schedules schedules;
    bool u_scheduled = true;
    double u_fixed = 0.5;
    int min_visits = 40;
    int trajectory_length = 10;
    double budget_overshoot = 2.2;
    uint64_t steps_override = 0; // nonzero: exact global step budget
    int sync_every = 1;          // ensemble combine cadence in global steps
    double q_init_floor = 1e-3;

    // optional instrumentation
    int record_every = 0;
    const QTable* q_star = nullptr;            // member-error tracking reference
    std::vector<TrackedPair> tracked_pairs;
    int coverage_member = 1;                   // order whose occupancy is traced
    bool track_member_coverage = false;
    bool track_ensemble_coverage = false;
    const Policy* pi_star = nullptr;           // for trace APE
    std::ostream* trace_jsonl = nullptr;
    const std::vector<Mdp>* member_models = nullptr; // for trace bellman gaps
};

struct EnsembleResult {
    QTable q_hat;
    Policy policy;
    std::vector<int> orders;
    std::vector<QTable> member_tables;
    uint64_t steps = 0;
    std::vector<std::vector<ErrorSnapshot>> member_errors; // aligned with orders
    CoverageSeries member_coverage;
    CoverageSeries ensemble_coverage;
};

// Lockstep multi-environment learner: at global step t member with order n
// takes one step of its own environment iff t % n == 0; the ensemble table is
// refreshed every sync_every steps. Runs for a fixed global budget.
EnsembleResult run_ensemble(const EnvironmentFamily& family,
                            const std::vector<Simulator>& member_sims,
                            const std::vector<int>& orders, const EnsembleOptions& opts,
                            uint64_t seed);

std::vector<Simulator> build_simulators(const EnvironmentFamily& family,
                                        double cost_noise = 0.0);

// Pooled mean and lambda = sqrt(3 * pooled variance) over the snapshots whose
// t lies in the trailing window_fraction of the run.
struct ErrorStats {
    double mean = 0.0;
    double variance = 0.0;
    double lambda = 0.0;
};
ErrorStats pooled_error_stats(const std::vector<ErrorSnapshot>& snaps,
                              double window_fraction = 0.5);

} // namespace memq
