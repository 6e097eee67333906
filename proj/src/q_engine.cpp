#include "memq/q_engine.hpp"

#include <cmath>
#include <sstream>

namespace memq {

double Schedules::eps(uint64_t t) const {
    return std::max(std::pow(c2, static_cast<double>(t)), c3);
}

double Schedules::u(uint64_t t) const {
    return 1.0 - std::exp(-static_cast<double>(t) / c4);
}

void Schedules::validate() const {
    if (!(c1 > 0.0) || !(c4 > 0.0))
        throw std::invalid_argument("Schedules: c1 and c4 must be > 0");
    if (!(c2 > 0.0 && c2 < 1.0)) throw std::invalid_argument("Schedules: c2 must be in (0,1)");
    if (!(c3 > 0.0 && c3 < 1.0)) throw std::invalid_argument("Schedules: c3 must be in (0,1)");
}

void apply_q_step(QTable& q, const Sample& sample, double alpha, double gamma_eff) {
    double target = sample.cost + gamma_eff * q.min_value(sample.s2);
    double& cell = q.q(sample.s, sample.a);
    cell = (1.0 - alpha) * cell + alpha * target;
}

QTable q_step(const QTable& q, const Sample& sample, double alpha, double gamma_eff) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("q_step: alpha must be in [0,1]");
    if (sample.s < 0 || sample.s >= q.num_states || sample.s2 < 0 ||
        sample.s2 >= q.num_states || sample.a < 0 || sample.a >= q.num_actions)
        throw std::invalid_argument("q_step: sample indices out of range");
    QTable out = q;
    apply_q_step(out, sample, alpha, gamma_eff);
    return out;
}

namespace {

// One learner bound to one environment.
struct Learner {
    const Simulator* sim;
    double gamma_eff;
    int traj_len;
    QTable q;
    Rng rng;
    std::vector<uint32_t> visits;
    int state = 0;
    int episode_pos = 0;
    uint64_t updates = 0;
    double eps_cur = 1.0;

    Learner(const Simulator& s, double floor, int l, uint64_t seed)
        : sim(&s), gamma_eff(s.mdp().gamma), traj_len(l),
          q(s.mdp().num_states, s.mdp().num_actions, floor), rng(seed),
          visits(static_cast<size_t>(s.mdp().num_states) * s.mdp().num_actions, 0) {
        state = rng.index(s.mdp().num_states);
    }

    uint32_t& visit(int s, int a) {
        return visits[static_cast<size_t>(s) * q.num_actions + a];
    }

    // returns the updated pair's visit count after the step
    uint32_t step(const Schedules& sch) {
        if (episode_pos + 1 >= traj_len) {
            state = rng.index(q.num_states);
            episode_pos = 0;
        }
        int a = rng.uniform01() < eps_cur ? rng.index(q.num_actions)
                                          : q.argmin_action(state);
        int s2 = sim->next_state(state, a, rng);
        double cost = sim->sample_cost(state, a, rng);
        uint32_t& k = visit(state, a);
        double alpha = sch.alpha(k);
        apply_q_step(q, {state, a, s2, cost}, alpha, gamma_eff);
        ++k;
        state = s2;
        ++episode_pos;
        ++updates;
        eps_cur = std::max(eps_cur * sch.c2, sch.c3);
        return k;
    }
};

} // namespace

QTable run_single_env(const Simulator& env, const SingleEnvOptions& opts, uint64_t seed) {
    opts.schedules.validate();
    if (opts.min_visits < 1) throw std::invalid_argument("run_single_env: min_visits >= 1");
    if (opts.trajectory_length < 2)
        throw std::invalid_argument("run_single_env: trajectory_length >= 2");
    const int S = env.mdp().num_states, A = env.mdp().num_actions;

    Learner learner(env, opts.q_init_floor, opts.trajectory_length,
                    derive_seed(seed, "single-env"));
    long episode_cap = opts.episode_cap >= 0
                           ? opts.episode_cap
                           : 64L * opts.min_visits * S * A /
                                     std::max(1, opts.trajectory_length - 1) +
                                 1024;
    long pending = static_cast<long>(S) * A;
    long steps_per_episode = opts.trajectory_length - 1;
    for (long ep = 0; ep < episode_cap && pending > 0; ++ep) {
        learner.state = learner.rng.index(S);
        learner.episode_pos = 0;
        for (long k = 0; k < steps_per_episode; ++k)
            if (learner.step(opts.schedules) == static_cast<uint32_t>(opts.min_visits))
                --pending;
    }
    if (pending > 0) {
        std::vector<std::pair<int, int>> uncovered;
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a)
                if (learner.visit(s, a) < static_cast<uint32_t>(opts.min_visits))
                    uncovered.emplace_back(s, a);
        std::ostringstream os;
        os << "run_single_env: " << uncovered.size()
           << " state-action pairs below min_visits";
        throw CoverageFailure(os.str(), std::move(uncovered));
    }
    return learner.q;
}

void ensemble_update(EnsembleState& state, double u) {
    if (state.members.empty()) throw std::invalid_argument("ensemble_update: no members");
    const size_t n = state.ensemble.values.size();
    for (const QTable& m : state.members)
        if (m.values.size() != n)
            throw std::invalid_argument("ensemble_update: member table size mismatch");
    const double k = static_cast<double>(state.members.size());
    for (size_t i = 0; i < n; ++i) {
        double mean = 0.0;
        for (const QTable& m : state.members) mean += m.values[i];
        mean /= k;
        state.ensemble.values[i] = u * state.ensemble.values[i] + (1.0 - u) * mean;
    }
    ++state.t;
}

std::vector<Simulator> build_simulators(const EnvironmentFamily& family, double cost_noise) {
    std::vector<Simulator> sims;
    sims.reserve(family.members.size());
    for (const auto& m : family.members) sims.emplace_back(m.env, cost_noise);
    return sims;
}

namespace {

double ln_linear_occupancy(const QTable& q, int s, int a) {
    double sum = 0.0;
    for (int i = 0; i < q.num_actions; ++i) sum += q.q(s, i);
    return std::log(q.q(s, a)) - std::log(sum);
}

} // namespace

EnsembleResult run_ensemble(const EnvironmentFamily& family,
                            const std::vector<Simulator>& member_sims,
                            const std::vector<int>& orders, const EnsembleOptions& opts,
                            uint64_t seed) {
    opts.schedules.validate();
    if (orders.empty()) throw std::invalid_argument("run_ensemble: no member orders");
    if (member_sims.size() != family.members.size())
        throw std::invalid_argument("run_ensemble: simulator list must match the family");
    const int S = family.base.num_states, A = family.base.num_actions;

    std::vector<Learner> learners;
    learners.reserve(orders.size());
    for (int n : orders) {
        size_t idx = 0;
        for (; idx < family.members.size(); ++idx)
            if (family.members[idx].order == n) break;
        if (idx == family.members.size())
            throw std::invalid_argument("run_ensemble: order " + std::to_string(n) +
                                        " not in the family");
        learners.emplace_back(member_sims[idx], opts.q_init_floor, opts.trajectory_length,
                              derive_seed(seed, "member", static_cast<uint64_t>(n)));
    }

    uint64_t steps = opts.steps_override;
    if (steps == 0)
        steps = static_cast<uint64_t>(
            std::ceil(opts.budget_overshoot * opts.min_visits * static_cast<double>(S) * A));

    EnsembleResult res;
    res.orders = orders;
    res.q_hat = QTable(S, A, opts.q_init_floor);
    res.steps = steps;

    const bool record = opts.record_every > 0;
    int cov_idx = -1;
    if (record && opts.track_member_coverage) {
        for (size_t i = 0; i < orders.size(); ++i)
            if (orders[i] == opts.coverage_member) cov_idx = static_cast<int>(i);
        if (cov_idx < 0)
            throw std::invalid_argument("run_ensemble: coverage_member not among orders");
        res.member_coverage.pairs = opts.tracked_pairs;
        res.member_coverage.ln_c.resize(opts.tracked_pairs.size());
    }
    if (record && opts.track_ensemble_coverage) {
        res.ensemble_coverage.pairs = opts.tracked_pairs;
        res.ensemble_coverage.ln_c.resize(opts.tracked_pairs.size());
    }
    if (record && opts.q_star) res.member_errors.resize(orders.size());

    const double u_decay = std::exp(-1.0 / opts.schedules.c4);
    double u_comp = 1.0; // exp(-t/c4), updated multiplicatively

    for (uint64_t t = 1; t <= steps; ++t) {
        for (size_t i = 0; i < learners.size(); ++i)
            if (t % static_cast<uint64_t>(orders[i]) == 0) learners[i].step(opts.schedules);

        u_comp *= u_decay;
        if (t % static_cast<uint64_t>(opts.sync_every) == 0) {
            double u = opts.u_scheduled ? 1.0 - u_comp : opts.u_fixed;
            const double k = static_cast<double>(learners.size());
            for (size_t i = 0; i < res.q_hat.values.size(); ++i) {
                double mean = 0.0;
                for (const Learner& l : learners) mean += l.q.values[i];
                mean /= k;
                res.q_hat.values[i] = u * res.q_hat.values[i] + (1.0 - u) * mean;
            }
        }

        if (record && t % static_cast<uint64_t>(opts.record_every) == 0) {
            if (opts.q_star) {
                for (size_t i = 0; i < learners.size(); ++i) {
                    ErrorSnapshot snap{t, 0.0, 0.0, 0};
                    const QTable& q = learners[i].q;
                    for (size_t j = 0; j < q.values.size(); ++j) {
                        double e = q.values[j] - opts.q_star->values[j];
                        snap.sum += e;
                        snap.sumsq += e * e;
                        ++snap.n;
                    }
                    res.member_errors[i].push_back(snap);
                }
            }
            if (cov_idx >= 0) {
                res.member_coverage.t.push_back(t);
                for (size_t pidx = 0; pidx < res.member_coverage.pairs.size(); ++pidx) {
                    const TrackedPair& tp = res.member_coverage.pairs[pidx];
                    res.member_coverage.ln_c[pidx].push_back(
                        ln_linear_occupancy(learners[cov_idx].q, tp.s, tp.a) - tp.ln_v);
                }
            }
            if (opts.track_ensemble_coverage) {
                res.ensemble_coverage.t.push_back(t);
                for (size_t pidx = 0; pidx < res.ensemble_coverage.pairs.size(); ++pidx) {
                    const TrackedPair& tp = res.ensemble_coverage.pairs[pidx];
                    res.ensemble_coverage.ln_c[pidx].push_back(
                        ln_linear_occupancy(res.q_hat, tp.s, tp.a) - tp.ln_v);
                }
            }
            if (opts.trace_jsonl) {
                std::ostream& out = *opts.trace_jsonl;
                out << "{\"t\":" << t << ",\"member_bellman_gaps\":[";
                for (size_t i = 0; i < learners.size(); ++i) {
                    if (i) out << ",";
                    if (opts.member_models && opts.member_models->size() == learners.size())
                        out << bellman_residual((*opts.member_models)[i], learners[i].q);
                    else
                        out << "null";
                }
                out << "],\"ensemble_ape\":";
                if (opts.pi_star)
                    out << average_policy_error(*opts.pi_star, policy_from_q(res.q_hat));
                else
                    out << "null";
                out << ",\"u_t\":" << (opts.u_scheduled ? 1.0 - u_comp : opts.u_fixed)
                    << ",\"eps_t\":" << opts.schedules.eps(t)
                    << ",\"alpha_t\":" << opts.schedules.alpha(t) << "}\n";
            }
        }
    }

    res.policy = policy_from_q(res.q_hat);
    res.member_tables.reserve(learners.size());
    for (Learner& l : learners) res.member_tables.push_back(std::move(l.q));
    return res;
}

ErrorStats pooled_error_stats(const std::vector<ErrorSnapshot>& snaps,
                              double window_fraction) {
    ErrorStats st;
    if (snaps.empty()) return st;
    uint64_t t_end = snaps.back().t;
    uint64_t t_from = static_cast<uint64_t>(
        std::floor(static_cast<double>(t_end) * (1.0 - window_fraction)));
    double sum = 0.0, sumsq = 0.0;
    uint64_t n = 0;
    for (const auto& s : snaps) {
        if (s.t < t_from) continue;
        sum += s.sum;
        sumsq += s.sumsq;
        n += s.n;
    }
    if (n == 0) return st;
    st.mean = sum / static_cast<double>(n);
    st.variance = std::max(0.0, sumsq / static_cast<double>(n) - st.mean * st.mean);
    st.lambda = std::sqrt(3.0 * st.variance);
    return st;
}

} // namespace memq
