#include "memq/coverage.hpp"

#include <algorithm>
#include <cmath>

namespace memq {

OccupancyModel occupancy(const QTable& q, ActionSelection mode) {
    OccupancyModel m;
    m.mode = mode;
    m.num_states = q.num_states;
    m.num_actions = q.num_actions;
    m.d.resize(q.values.size());
    for (int s = 0; s < q.num_states; ++s) {
        if (mode == ActionSelection::linear) {
            double sum = 0.0;
            for (int a = 0; a < q.num_actions; ++a) {
                double x = q.q(s, a);
                if (!(x > 0.0))
                    throw std::invalid_argument(
                        "occupancy: linear mode needs strictly positive Q-values");
                sum += x;
            }
            if (!(sum > 0.0)) throw std::invalid_argument("occupancy: zero row sum");
            for (int a = 0; a < q.num_actions; ++a)
                m.d[static_cast<size_t>(s) * q.num_actions + a] = q.q(s, a) / sum;
        } else {
            double mx = q.q(s, 0);
            for (int a = 1; a < q.num_actions; ++a) mx = std::max(mx, q.q(s, a));
            double sum = 0.0;
            for (int a = 0; a < q.num_actions; ++a) sum += std::exp(q.q(s, a) - mx);
            for (int a = 0; a < q.num_actions; ++a)
                m.d[static_cast<size_t>(s) * q.num_actions + a] =
                    std::exp(q.q(s, a) - mx) / sum;
        }
    }
    return m;
}

double ExplorationDistribution::ln_at(int s, int a) const { return std::log(at(s, a)); }

VMoments ExplorationDistribution::moments() const {
    std::vector<std::pair<int, int>> all;
    all.reserve(static_cast<size_t>(num_states) * num_actions);
    for (int s = 0; s < num_states; ++s)
        for (int a = 0; a < num_actions; ++a) all.emplace_back(s, a);
    return moments_over(all);
}

VMoments ExplorationDistribution::moments_over(
    const std::vector<std::pair<int, int>>& pairs) const {
    if (pairs.empty()) throw std::invalid_argument("moments_over: empty pair set");
    double sum = 0.0, sumsq = 0.0;
    for (auto [s, a] : pairs) {
        double l = ln_at(s, a);
        sum += l;
        sumsq += l * l;
    }
    double n = static_cast<double>(pairs.size());
    VMoments m;
    m.e_ln_v = sum / n;
    m.v_ln_v = std::max(0.0, sumsq / n - m.e_ln_v * m.e_ln_v);
    return m;
}

ExplorationDistribution ExplorationDistribution::uniform(int S, int A, VNormalization norm) {
    ExplorationDistribution e;
    e.num_states = S;
    e.num_actions = A;
    e.norm = norm;
    double val = norm == VNormalization::joint ? 1.0 / (static_cast<double>(S) * A)
                                               : 1.0 / static_cast<double>(A);
    e.v.assign(static_cast<size_t>(S) * A, val);
    e.floor = val;
    return e;
}

ExplorationDistribution ExplorationDistribution::from_occupancies(
    const std::vector<OccupancyModel>& occs, double floor, VNormalization norm) {
    if (occs.empty())
        throw std::invalid_argument("from_occupancies: need at least one occupancy model");
    const int S = occs[0].num_states, A = occs[0].num_actions;
    ExplorationDistribution e;
    e.num_states = S;
    e.num_actions = A;
    e.norm = norm;
    e.floor = floor;
    e.v.assign(static_cast<size_t>(S) * A, 0.0);
    for (const auto& occ : occs) {
        if (occ.num_states != S || occ.num_actions != A)
            throw std::invalid_argument("from_occupancies: dimension mismatch");
        for (size_t i = 0; i < e.v.size(); ++i) e.v[i] += occ.d[i];
    }
    for (double& x : e.v) x /= static_cast<double>(occs.size());
    if (norm == VNormalization::per_state) {
        for (int s = 0; s < S; ++s) {
            double sum = 0.0;
            for (int a = 0; a < A; ++a) {
                double& x = e.v[static_cast<size_t>(s) * A + a];
                x = std::max(x, floor);
                sum += x;
            }
            for (int a = 0; a < A; ++a) e.v[static_cast<size_t>(s) * A + a] /= sum;
        }
    } else {
        double sum = 0.0;
        for (double& x : e.v) {
            x /= static_cast<double>(S); // uniform state weighting
            x = std::max(x, floor);
            sum += x;
        }
        for (double& x : e.v) x /= sum;
    }
    return e;
}

CoverageRecord coverage(const OccupancyModel& occ, const ExplorationDistribution& v) {
    if (occ.num_states != v.num_states || occ.num_actions != v.num_actions)
        throw std::invalid_argument("coverage: dimension mismatch");
    CoverageRecord rec;
    rec.local.resize(occ.d.size());
    rec.local_ln.resize(occ.d.size());
    rec.global = 0.0;
    for (size_t i = 0; i < occ.d.size(); ++i) {
        rec.local[i] = occ.d[i] / v.v[i];
        rec.local_ln[i] = std::log(rec.local[i]);
        rec.global = std::max(rec.global, rec.local[i]);
    }
    rec.global_ln = std::log(rec.global);
    return rec;
}

void CoverageTrace::record(uint64_t t, const OccupancyModel& occ,
                           const ExplorationDistribution& v) {
    CoverageRecord rec = coverage(occ, v);
    times_.push_back(t);
    for (size_t i = 0; i < tracked_.size(); ++i) {
        auto [s, a] = tracked_[i];
        series_[i].push_back(rec.local_ln[static_cast<size_t>(s) * occ.num_actions + a]);
    }
    global_.push_back(rec.global_ln);
}

std::pair<double, double> CoverageTrace::window_stats(size_t pair_idx,
                                                      double window_fraction) const {
    const std::vector<double>& s = series_[pair_idx];
    if (s.empty()) return {0.0, 0.0};
    size_t from = static_cast<size_t>(
        std::floor(static_cast<double>(s.size()) * (1.0 - window_fraction)));
    from = std::min(from, s.size() - 1);
    double sum = 0.0, sumsq = 0.0;
    size_t n = 0;
    for (size_t i = from; i < s.size(); ++i) {
        sum += s[i];
        sumsq += s[i] * s[i];
        ++n;
    }
    double mean = sum / static_cast<double>(n);
    double var = std::max(0.0, sumsq / static_cast<double>(n) - mean * mean);
    return {mean, var};
}

ExplorationDistribution build_exploration_dist(const Simulator& base_env,
                                               const std::vector<uint64_t>& seeds,
                                               const SingleEnvOptions& opts,
                                               VNormalization norm, double floor) {
    if (seeds.empty()) throw std::invalid_argument("build_exploration_dist: need >= 1 seed");
    const int S = base_env.mdp().num_states, A = base_env.mdp().num_actions;
    if (floor < 0.0) floor = 1e-6 / (static_cast<double>(S) * A);
    std::vector<OccupancyModel> occs;
    occs.reserve(seeds.size());
    for (size_t i = 0; i < seeds.size(); ++i) {
        SingleEnvOptions vary = opts;
        // independent robustness: vary the initialization and the schedule
        vary.q_init_floor = opts.q_init_floor * (1.0 + 0.5 * static_cast<double>(i));
        vary.schedules.c1 = opts.schedules.c1 * (1.0 + 0.25 * static_cast<double>(i % 3));
        QTable q = run_single_env(base_env, vary, seeds[i]);
        occs.push_back(occupancy(q, ActionSelection::linear));
    }
    return ExplorationDistribution::from_occupancies(occs, floor, norm);
}

std::pair<double, double> taylor_log_moments(double mu, double sigma2) {
    if (!(mu > 0.0)) throw std::invalid_argument("taylor_log_moments: mu must be > 0");
    if (sigma2 < 0.0) throw std::invalid_argument("taylor_log_moments: sigma2 must be >= 0");
    return {std::log(mu) - sigma2 / (2.0 * mu * mu), sigma2 / (mu * mu)};
}

double softmax_epsilon_bound(double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("softmax_epsilon_bound: theta must be > 0");
    return 1.0 / (1.0 + std::exp(-1.0 / theta));
}

double estimate_theta(const QTable& q_star, double inflation) {
    double theta = 1.0;
    for (int s = 0; s < q_star.num_states; ++s) {
        double lo = q_star.q(s, 0), hi = q_star.q(s, 0);
        for (int a = 1; a < q_star.num_actions; ++a) {
            lo = std::min(lo, q_star.q(s, a));
            hi = std::max(hi, q_star.q(s, a));
        }
        if (!(lo > 0.0))
            throw std::invalid_argument("estimate_theta: Q* must be strictly positive");
        theta = std::max(theta, hi / lo);
    }
    return std::max(theta, 1.0 + inflation);
}

namespace {

// Shared kernel for the per-environment propositions; eps_lb/eps_ub bound the
// occupancy share of an action, eps_varlb enters the variance lower bound.
BoundSet env_bounds_kernel(double q_star, double theta, double lambda, int num_actions,
                           double eps_lb, double eps_ub, double eps_varlb,
                           const VMoments& v) {
    if (!(q_star > 0.0)) throw std::invalid_argument("bounds: q_star must be > 0");
    if (lambda < 0.0) throw std::invalid_argument("bounds: lambda must be >= 0");
    const double a = static_cast<double>(num_actions);
    const double base = lambda * lambda / (3.0 * q_star * q_star);
    BoundSet b;
    b.q_star = q_star;
    b.theta = theta;
    b.lambda = lambda;
    b.num_actions = num_actions;
    b.v_moments = v;
    b.exp_lb = std::log(eps_lb) - lambda * lambda / (6.0 * q_star * q_star) - v.e_ln_v;
    b.exp_ub = std::log(eps_ub) + base * ((a * a / 2.0) * eps_ub * eps_ub - 0.5) - v.e_ln_v;
    b.var_lb = std::max(base * (1.0 - 2.0 * a * eps_varlb) + v.v_ln_v, 0.0);
    b.var_ub = base * (1.0 + a * eps_ub) * (1.0 + a * eps_ub) + v.v_ln_v;
    return b;
}

BoundSet ensemble_bounds_kernel(double q_star, double theta, double factor,
                                const VMoments& v) {
    if (!(q_star > 0.0)) throw std::invalid_argument("bounds: q_star must be > 0");
    if (!(theta > 1.0)) throw std::invalid_argument("bounds: theta must be > 1");
    BoundSet b;
    b.q_star = q_star;
    b.theta = theta;
    b.v_moments = v;
    double eps_ub = theta / (1.0 + theta);
    b.exp_lb = std::log(1.0 / (1.0 + theta)) - v.e_ln_v;
    b.exp_ub = std::log(eps_ub) + factor * (2.0 * eps_ub * eps_ub - 0.5) - v.e_ln_v;
    b.var_lb = v.v_ln_v;
    b.var_ub = factor * (1.0 + 2.0 * eps_ub) * (1.0 + 2.0 * eps_ub) + v.v_ln_v;
    return b;
}

} // namespace

BoundSet prop1_bounds(double q_star_sa, double theta, double lambda_n, const VMoments& v,
                      ActionSelection mode) {
    BoundSet b;
    if (mode == ActionSelection::linear) {
        if (!(theta > 1.0)) throw std::invalid_argument("prop1_bounds: theta must be > 1");
        b = env_bounds_kernel(q_star_sa, theta, lambda_n, 2, 1.0 / (1.0 + theta),
                              theta / (1.0 + theta), theta / (1.0 + theta), v);
    } else {
        if (!(theta > 0.0))
            throw std::invalid_argument("prop1_bounds: softmax mode needs theta > 0");
        double eps_ub = softmax_epsilon_bound(theta);
        double eps_lb = 1.0 / (1.0 + std::exp(1.0 / theta));
        b = env_bounds_kernel(q_star_sa, theta, lambda_n, 2, eps_lb, eps_ub, eps_ub, v);
    }
    b.prop_id = 1;
    b.mode = mode;
    return b;
}

BoundSet prop2_bounds(double q_star_sa, double theta, double lambda_max, double u,
                      const VMoments& v) {
    BoundSet b = prop3_bounds(q_star_sa, theta, lambda_max, u, 1, v);
    b.prop_id = 2;
    return b;
}

BoundSet prop3_bounds(double q_star_sa, double theta, double lambda_max, double u, int k,
                      const VMoments& v) {
    if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("prop3_bounds: u must be in (0,1)");
    if (k < 1) throw std::invalid_argument("prop3_bounds: k must be >= 1");
    if (lambda_max < 0.0) throw std::invalid_argument("prop3_bounds: lambda must be >= 0");
    double f = (lambda_max * lambda_max / 3.0) * (1.0 - u) / (1.0 + u);
    double factor = f / (static_cast<double>(k) * q_star_sa * q_star_sa);
    BoundSet b = ensemble_bounds_kernel(q_star_sa, theta, factor, v);
    b.prop_id = 3;
    b.lambda = lambda_max;
    b.u = u;
    b.k = k;
    return b;
}

BoundSet prop4_bounds(double q_star_sa, double theta, double lambda_n, int num_actions,
                      const VMoments& v) {
    if (num_actions < 2) throw std::invalid_argument("prop4_bounds: num_actions must be >= 2");
    if (!(theta > 1.0)) throw std::invalid_argument("prop4_bounds: theta must be > 1");
    BoundSet b;
    if (num_actions == 2) {
        // the two-action specialization is the same set of expressions; share
        // the exact argument forms so the results agree bit for bit
        b = env_bounds_kernel(q_star_sa, theta, lambda_n, 2, 1.0 / (1.0 + theta),
                              theta / (1.0 + theta), theta / (1.0 + theta), v);
    } else {
        const double a = static_cast<double>(num_actions);
        b = env_bounds_kernel(q_star_sa, theta, lambda_n, num_actions,
                              1.0 / (1.0 + a * theta - theta), theta / (theta + a - 1.0),
                              theta / (1.0 + theta), v);
    }
    b.prop_id = 4;
    return b;
}

} // namespace memq
