#include "memq/baselines.hpp"
#include "memq/rng.hpp"

#include <cmath>
#include <sstream>

namespace memq {
namespace {

struct BaselineCore {
    const Simulator* sim;
    int S, A;
    int traj_len;
    long min_visits;
    Rng rng;
    std::vector<uint32_t> visits; // per (s,a), across tables
    long pending;
    double eps_cur = 1.0;

    BaselineCore(const Simulator& env, const SingleEnvOptions& opts, uint64_t seed)
        : sim(&env), S(env.mdp().num_states), A(env.mdp().num_actions),
          traj_len(opts.trajectory_length), min_visits(opts.min_visits), rng(seed),
          visits(static_cast<size_t>(S) * A, 0), pending(static_cast<long>(S) * A) {
        opts.schedules.validate();
        if (opts.min_visits < 1) throw std::invalid_argument("baseline: min_visits >= 1");
        if (opts.trajectory_length < 2)
            throw std::invalid_argument("baseline: trajectory_length >= 2");
    }

    template <typename StepFn>
    void run(const SingleEnvOptions& opts, StepFn&& step_fn) {
        long cap = opts.episode_cap >= 0
                       ? opts.episode_cap
                       : 64L * min_visits * S * A / std::max(1, traj_len - 1) + 1024;
        for (long ep = 0; ep < cap && pending > 0; ++ep) {
            int s = rng.index(S);
            for (int k = 0; k + 1 < traj_len; ++k) s = step_fn(s);
        }
        if (pending > 0) {
            std::vector<std::pair<int, int>> uncovered;
            for (int s = 0; s < S; ++s)
                for (int a = 0; a < A; ++a)
                    if (visits[static_cast<size_t>(s) * A + a] <
                        static_cast<uint32_t>(min_visits))
                        uncovered.emplace_back(s, a);
            std::ostringstream os;
            os << "baseline: " << uncovered.size() << " pairs below min_visits";
            throw CoverageFailure(os.str(), std::move(uncovered));
        }
    }

    uint32_t bump(int s, int a) {
        uint32_t& k = visits[static_cast<size_t>(s) * A + a];
        ++k;
        if (k == static_cast<uint32_t>(min_visits)) --pending;
        return k - 1; // count before this update, for the learning rate
    }

    void decay_eps(const Schedules& sch) { eps_cur = std::max(eps_cur * sch.c2, sch.c3); }
};

int argmin_row(const std::vector<double>& q, int s, int A) {
    int best = 0;
    double bv = q[static_cast<size_t>(s) * A];
    for (int a = 1; a < A; ++a) {
        double v = q[static_cast<size_t>(s) * A + a];
        if (v < bv) {
            bv = v;
            best = a;
        }
    }
    return best;
}

} // namespace

QTable double_q_baseline(const Simulator& env, const SingleEnvOptions& opts, uint64_t seed) {
    BaselineCore core(env, opts, derive_seed(seed, "double-q"));
    const int S = core.S, A = core.A;
    const double gamma = env.mdp().gamma;
    std::vector<double> qa(static_cast<size_t>(S) * A, opts.q_init_floor);
    std::vector<double> qb = qa;
    std::vector<double> mix = qa;

    core.run(opts, [&](int s) {
        int a;
        if (core.rng.uniform01() < core.eps_cur) {
            a = core.rng.index(A);
        } else {
            for (int i = 0; i < A; ++i)
                mix[static_cast<size_t>(s) * A + i] =
                    qa[static_cast<size_t>(s) * A + i] + qb[static_cast<size_t>(s) * A + i];
            a = argmin_row(mix, s, A);
        }
        int s2 = env.next_state(s, a, core.rng);
        double c = env.sample_cost(s, a, core.rng);
        uint32_t k = core.bump(s, a);
        double alpha = opts.schedules.alpha(k);
        size_t cell = static_cast<size_t>(s) * A + a;
        if (core.rng.bernoulli(0.5)) {
            int astar = argmin_row(qa, s2, A);
            double target = c + gamma * qb[static_cast<size_t>(s2) * A + astar];
            qa[cell] = (1.0 - alpha) * qa[cell] + alpha * target;
        } else {
            int astar = argmin_row(qb, s2, A);
            double target = c + gamma * qa[static_cast<size_t>(s2) * A + astar];
            qb[cell] = (1.0 - alpha) * qb[cell] + alpha * target;
        }
        core.decay_eps(opts.schedules);
        return s2;
    });

    QTable out(S, A, opts.q_init_floor);
    for (size_t i = 0; i < out.values.size(); ++i) out.values[i] = 0.5 * (qa[i] + qb[i]);
    return out;
}

QTable maxmin_q_baseline(const Simulator& env, const SingleEnvOptions& opts, uint64_t seed,
                         int n_tables) {
    if (n_tables < 1) throw std::invalid_argument("maxmin_q_baseline: n_tables >= 1");
    BaselineCore core(env, opts, derive_seed(seed, "maxmin-q"));
    const int S = core.S, A = core.A;
    const double gamma = env.mdp().gamma;
    std::vector<std::vector<double>> q(
        n_tables, std::vector<double>(static_cast<size_t>(S) * A, opts.q_init_floor));
    // elementwise max across tables, kept current incrementally
    std::vector<double> qmax(static_cast<size_t>(S) * A, opts.q_init_floor);

    auto refresh_max = [&](size_t cell) {
        double m = q[0][cell];
        for (int j = 1; j < n_tables; ++j) m = std::max(m, q[j][cell]);
        qmax[cell] = m;
    };

    core.run(opts, [&](int s) {
        int a = core.rng.uniform01() < core.eps_cur ? core.rng.index(A)
                                                    : argmin_row(qmax, s, A);
        int s2 = env.next_state(s, a, core.rng);
        double c = env.sample_cost(s, a, core.rng);
        uint32_t k = core.bump(s, a);
        double alpha = opts.schedules.alpha(k);
        int j = core.rng.index(n_tables);
        int abest = argmin_row(qmax, s2, A);
        double target = c + gamma * qmax[static_cast<size_t>(s2) * A + abest];
        size_t cell = static_cast<size_t>(s) * A + a;
        q[j][cell] = (1.0 - alpha) * q[j][cell] + alpha * target;
        refresh_max(cell);
        core.decay_eps(opts.schedules);
        return s2;
    });

    QTable out(S, A, opts.q_init_floor);
    out.values = qmax;
    return out;
}

} // namespace memq
