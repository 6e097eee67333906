#pragma once

// Occupancy measures, exploration distributions, local/global coverage
// coefficients, the log-moment Taylor helper, and the interval evaluators for
// the four coverage-coefficient propositions (n-th environment, ensemble,
// ensemble-vs-K, arbitrary action count) plus the softmax variant.

#include "memq/mdp.hpp"
#include "memq/q_engine.hpp"
#include "memq/simulator.hpp"

#include <utility>
#include <vector>

namespace memq {

enum class ActionSelection { linear, softmax };

struct OccupancyModel {
    ActionSelection mode = ActionSelection::linear;
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> d; // per-state action distribution, [s][a]

    double at(int s, int a) const { return d[static_cast<size_t>(s) * num_actions + a]; }
};

OccupancyModel occupancy(const QTable& q, ActionSelection mode);

enum class VNormalization { joint, per_state };

struct VMoments {
    double e_ln_v = 0.0;
    double v_ln_v = 0.0;
};

struct ExplorationDistribution {
    int num_states = 0;
    int num_actions = 0;
    VNormalization norm = VNormalization::joint;
    double floor = 0.0;
    std::vector<double> v; // [s][a]

    double at(int s, int a) const { return v[static_cast<size_t>(s) * num_actions + a]; }
    double ln_at(int s, int a) const;

    // Moments of ln v under uniform weighting over all pairs, or over a
    // designated pair set; a single pair gives (ln v_sa, 0).
    VMoments moments() const;
    VMoments moments_over(const std::vector<std::pair<int, int>>& pairs) const;

    static ExplorationDistribution uniform(int S, int A, VNormalization norm);
    static ExplorationDistribution from_occupancies(const std::vector<OccupancyModel>& occs,
                                                    double floor, VNormalization norm);
};

struct CoverageRecord {
    std::vector<double> local;    // C(s,a) for all pairs, [s][a]
    std::vector<double> local_ln; // ln C
    double global = 0.0;          // max over pairs
    double global_ln = 0.0;
};

CoverageRecord coverage(const OccupancyModel& occ, const ExplorationDistribution& v);

// Time series of ln C for tracked pairs plus the global (max) trace.
class CoverageTrace {
  public:
    CoverageTrace(std::vector<std::pair<int, int>> tracked) : tracked_(std::move(tracked)) {
        series_.resize(tracked_.size());
    }

    void record(uint64_t t, const OccupancyModel& occ, const ExplorationDistribution& v);

    const std::vector<std::pair<int, int>>& tracked() const { return tracked_; }
    const std::vector<uint64_t>& times() const { return times_; }
    const std::vector<double>& series(size_t pair_idx) const { return series_[pair_idx]; }
    const std::vector<double>& global_series() const { return global_; }

    // mean/variance of a pair's trailing window
    std::pair<double, double> window_stats(size_t pair_idx, double window_fraction) const;

  private:
    std::vector<std::pair<int, int>> tracked_;
    std::vector<uint64_t> times_;
    std::vector<std::vector<double>> series_;
    std::vector<double> global_;
};

// Independent learners on the base environment (varied seeds, initializations
// and schedule constants); v = floored, renormalized average of their final
// linear occupancy models.
ExplorationDistribution build_exploration_dist(const Simulator& base_env,
                                               const std::vector<uint64_t>& seeds,
                                               const SingleEnvOptions& opts,
                                               VNormalization norm, double floor = -1.0);

// Second-order expansion of the log of a positive random variable:
// (ln mu - sigma2/(2 mu^2), sigma2/mu^2). Accurate for mu/sigma > 1.5.
std::pair<double, double> taylor_log_moments(double mu, double sigma2);

struct BoundSet {
    double exp_lb = 0.0;
    double exp_ub = 0.0;
    double var_lb = 0.0;
    double var_ub = 0.0;
    int prop_id = 0;
    // inputs snapshot
    double q_star = 0.0;
    double theta = 0.0;
    double lambda = 0.0;
    double u = 0.0;
    int k = 0;
    int num_actions = 2;
    VMoments v_moments;
    ActionSelection mode = ActionSelection::linear;
};

// n-th environment, two actions (softmax mode swaps in the Appendix-F
// epsilon bound and requires only theta > 0).
BoundSet prop1_bounds(double q_star_sa, double theta, double lambda_n,
                      const VMoments& v, ActionSelection mode = ActionSelection::linear);
// ensemble policy with update ratio u, lambda_max = max_n lambda_n
BoundSet prop2_bounds(double q_star_sa, double theta, double lambda_max, double u,
                      const VMoments& v);
// ensemble policy as a function of the member count K, f(lambda,u)=(lambda^2/3)(1-u)/(1+u)
BoundSet prop3_bounds(double q_star_sa, double theta, double lambda_max, double u, int k,
                      const VMoments& v);
// n-th environment, arbitrary action count
BoundSet prop4_bounds(double q_star_sa, double theta, double lambda_n, int num_actions,
                      const VMoments& v);

// Appendix-F bound on the occupancy share under softmax selection.
double softmax_epsilon_bound(double theta);

// Largest same-state ratio of optimal Q-values; never below 1 + inflation.
double estimate_theta(const QTable& q_star, double inflation = 1e-6);

} // namespace memq
