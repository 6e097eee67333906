#include <doctest.h>

#include "memq/graph_gen.hpp"
#include "memq/q_engine.hpp"
#include "memq/rng.hpp"

#include <cmath>

using namespace memq;

namespace {

GraphSpec ssur_spec(int S, int A, uint64_t seed) {
    GraphSpec spec;
    spec.num_states = S;
    spec.num_actions = A;
    spec.block_count = S % 4 == 0 ? 4 : (S % 5 == 0 ? 5 : 1);
    spec.seed = seed;
    // degree-3 regular rows: pick a sparsity threshold the graph can meet
    spec.sparsity_threshold = std::min(0.8, 1.0 - 3.5 / S);
    return spec;
}

} // namespace

TEST_CASE("schedule invariants") {
    Schedules sch;
    CHECK(sch.alpha(0) == 1.0);
    CHECK(sch.alpha(1000000) > 0.0);
    CHECK(sch.eps(0) == 1.0);
    CHECK(sch.eps(10000000) == doctest::Approx(sch.c3)); // exploration floor
    CHECK(sch.u(0) == 0.0);
    CHECK(sch.u(2000) < 1.0);
    CHECK(sch.u(2000) > sch.u(200));
    CHECK(sch.u(100000000) <= 1.0); // saturates at double precision
    Schedules bad = sch;
    bad.c2 = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = sch;
    bad.c3 = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("q_step: alpha 0 leaves the table unchanged") {
    QTable q(2, 2);
    q.q(0, 0) = 3.0;
    QTable out = q_step(q, {0, 0, 1, 1.0}, 0.0, 0.9);
    CHECK(out.values == q.values);
}

TEST_CASE("q_step: alpha 1 with zero discount writes the cost") {
    QTable q(2, 2);
    QTable out = q_step(q, {1, 0, 0, 0.37}, 1.0, 0.0);
    CHECK(out.q(1, 0) == 0.37);
    CHECK(out.q(0, 0) == q.q(0, 0)); // untouched
}

TEST_CASE("repeated q_step converges to the one-state fixed point") {
    QTable q(1, 1);
    for (int i = 0; i < 2000; ++i) apply_q_step(q, {0, 0, 0, 1.0}, 0.5, 0.9);
    CHECK(q.q(0, 0) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("single-env learner reaches the member optimum on a small desk graph") {
    Mdp truth = generate(ssur_spec(5, 2, 3));
    EnvironmentFamily fam = build_family(truth, 2);
    for (int order : {1, 2}) {
        const Mdp& env = fam.member(order).env;
        Simulator sim(env);
        SingleEnvOptions opts;
        opts.schedules.c1 = 60.0;
        opts.schedules.c2 = 0.99995;
        opts.schedules.c3 = 0.4;
        opts.min_visits = 6000;
        QTable q = run_single_env(sim, opts, 17);
        ValueIterationResult vi = value_iteration(env, 1e-10);
        CHECK(linf_distance(q, vi.q) <= 0.05);
        CHECK(average_policy_error(vi.policy, policy_from_q(q)) == 0.0);
    }
}

TEST_CASE("single-env learner is deterministic per seed") {
    Mdp truth = generate(ssur_spec(6, 2, 4));
    Simulator sim(truth);
    SingleEnvOptions opts;
    opts.min_visits = 50;
    QTable a = run_single_env(sim, opts, 5);
    QTable b = run_single_env(sim, opts, 5);
    CHECK(a.values == b.values);
    QTable c = run_single_env(sim, opts, 6);
    CHECK(a.values != c.values);
}

TEST_CASE("ensemble_update: u=0 copies the member mean") {
    EnsembleState st;
    st.members.assign(2, QTable(1, 2));
    st.members[0].q(0, 0) = 2.0;
    st.members[1].q(0, 0) = 4.0;
    st.members[0].q(0, 1) = 1.0;
    st.members[1].q(0, 1) = 1.0;
    st.ensemble = QTable(1, 2);
    ensemble_update(st, 0.0);
    CHECK(st.ensemble.q(0, 0) == 3.0);
    CHECK(st.ensemble.q(0, 1) == 1.0);
    CHECK(st.t == 1);
}

TEST_CASE("ensemble_update: u near 1 freezes the ensemble") {
    EnsembleState st;
    st.members.assign(1, QTable(1, 1));
    st.members[0].q(0, 0) = 100.0;
    st.ensemble = QTable(1, 1);
    st.ensemble.q(0, 0) = 7.0;
    ensemble_update(st, 0.999999);
    CHECK(st.ensemble.q(0, 0) == doctest::Approx(7.0).epsilon(1e-4));
}

TEST_CASE("ensemble_update rejects mismatched members") {
    EnsembleState st;
    st.members.assign(1, QTable(2, 2));
    st.members.push_back(QTable(3, 2));
    st.ensemble = QTable(2, 2);
    CHECK_THROWS_AS(ensemble_update(st, 0.5), std::invalid_argument);
}

TEST_CASE("EMA steady-state variance matches (1-u)/(1+u) * sigma^2/K") {
    // members are iid gaussian noise around a constant; the ensemble table is
    // a scalar EMA of their mean
    for (double u : {0.5, 0.9}) {
        for (int k : {1, 5}) {
            Rng rng(derive_seed(99, "ema", static_cast<uint64_t>(k * 100 + u * 10)));
            double x = 0.0;
            double sum = 0.0, sumsq = 0.0;
            long n = 0;
            const long total = 300000, burn = 50000;
            for (long t = 0; t < total; ++t) {
                double mean = 0.0;
                for (int i = 0; i < k; ++i) mean += 5.0 + rng.normal();
                mean /= k;
                x = u * x + (1.0 - u) * mean;
                if (t >= burn) {
                    sum += x;
                    sumsq += x * x;
                    ++n;
                }
            }
            double mu = sum / n;
            double var = sumsq / n - mu * mu;
            double expected = (1.0 - u) / (1.0 + u) / k;
            CHECK(std::abs(var - expected) / expected < 0.10);
        }
    }
}

TEST_CASE("scheduled u drives trailing-window variance down") {
    Schedules sch;
    sch.c4 = 2000.0;
    Rng rng(4242);
    double x = 0.0;
    std::vector<double> series;
    for (long t = 1; t <= 20000; ++t) {
        double u = sch.u(t);
        x = u * x + (1.0 - u) * (5.0 + rng.normal());
        series.push_back(x);
    }
    double prev = std::numeric_limits<double>::infinity();
    for (size_t start = 2000; start + 2000 <= series.size(); start += 2000) {
        double s = 0.0, ss = 0.0;
        for (size_t i = start; i < start + 2000; ++i) {
            s += series[i];
            ss += series[i] * series[i];
        }
        double mean = s / 2000.0;
        double var = ss / 2000.0 - mean * mean;
        CHECK(var <= prev * 1.05);
        prev = var;
    }
}

TEST_CASE("lockstep ensemble learns the optimal policy on a desk graph") {
    Mdp truth = generate(ssur_spec(12, 2, 8));
    ValueIterationResult vi = value_iteration(truth);
    EnvironmentFamily fam = build_family(truth, 5); // exact model, no estimation noise
    std::vector<Simulator> sims = build_simulators(fam);
    EnsembleOptions opts;
    opts.min_visits = 400;
    opts.schedules.c1 = 200.0;
    EnsembleResult res = run_ensemble(fam, sims, {1, 2, 3, 4, 5}, opts, 21);
    CHECK(average_policy_error(vi.policy, res.policy) <= 0.25);

    EnsembleResult again = run_ensemble(fam, sims, {1, 2, 3, 4, 5}, opts, 21);
    CHECK(res.q_hat.values == again.q_hat.values); // bit determinism
}

TEST_CASE("member error snapshots feed pooled lambda estimation") {
    std::vector<ErrorSnapshot> snaps;
    // two early snapshots (ignored by the trailing window) and two late ones
    snaps.push_back({10, 100.0, 10000.0, 10});
    snaps.push_back({20, 100.0, 10000.0, 10});
    snaps.push_back({90, 0.0, 30.0, 10});
    snaps.push_back({100, 0.0, 30.0, 10});
    ErrorStats st = pooled_error_stats(snaps, 0.5);
    CHECK(st.mean == doctest::Approx(0.0));
    CHECK(st.variance == doctest::Approx(3.0));
    CHECK(st.lambda == doctest::Approx(3.0)); // sqrt(3*3)
}
