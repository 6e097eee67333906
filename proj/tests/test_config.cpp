#include <doctest.h>

#include "memq/baselines.hpp"
#include "memq/config.hpp"

using namespace memq;

TEST_CASE("config round trip is lossless") {
    RunConfig cfg;
    cfg.graph.num_states = 40;
    cfg.graph.num_actions = 3;
    cfg.graph.block_count = 4;
    cfg.pipeline.k = 3;
    cfg.pipeline.k_total = 7;
    cfg.pipeline.schedules.c1 = 500.0;
    cfg.zeta = "0.5";
    cfg.tracked_pairs = {{0, 0}, {5, 1}};
    cfg.seed = 424242;
    cfg.emit_trace = true;
    std::string text = config_to_json(cfg);
    RunConfig back = config_from_json(text);
    CHECK(config_to_json(back) == text);
    CHECK(back.zeta_mode().uniform == false);
    CHECK(back.zeta_mode().value == 0.5);
}

TEST_CASE("config validation reports field paths") {
    RunConfig cfg;
    cfg.pipeline.k = 9;
    cfg.pipeline.k_total = 3;
    try {
        cfg.validate();
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("pipeline") != std::string::npos);
    }
    RunConfig bad;
    bad.zeta = "1.5";
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    RunConfig sv;
    sv.schema_version = 2;
    CHECK_THROWS_AS(sv.validate(), std::invalid_argument);
}

TEST_CASE("defaults parse from a minimal document") {
    RunConfig cfg = config_from_json("{\"seed\": 7}");
    CHECK(cfg.seed == 7);
    CHECK(cfg.pipeline.k == 5);
    CHECK(cfg.pipeline.k_total == 10);
    CHECK(cfg.zeta == "uniform");
    CHECK(cfg.zeta_mode().uniform);
    CHECK(cfg.scale == "desk");
}

TEST_CASE("baselines converge on a one-state environment") {
    Mdp m(1, 1, 0.9);
    m.prob(0, 0, 0) = 1.0;
    m.cost(0, 0) = 1.0;
    Simulator sim(m);
    SingleEnvOptions opts;
    opts.min_visits = 4000;
    opts.schedules.c1 = 50.0;
    QTable dq = double_q_baseline(sim, opts, 3);
    CHECK(dq.q(0, 0) == doctest::Approx(10.0).epsilon(0.01));
    QTable mm = maxmin_q_baseline(sim, opts, 3);
    CHECK(mm.q(0, 0) == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("baselines are deterministic per seed") {
    Mdp m(3, 2, 0.8);
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a) {
            for (int s2 = 0; s2 < 3; ++s2) m.prob(s, a, s2) = 1.0 / 3.0;
            m.cost(s, a) = 0.5 + 0.1 * (s + a);
        }
    Simulator sim(m);
    SingleEnvOptions opts;
    opts.min_visits = 100;
    CHECK(double_q_baseline(sim, opts, 9).values == double_q_baseline(sim, opts, 9).values);
    CHECK(maxmin_q_baseline(sim, opts, 9).values == maxmin_q_baseline(sim, opts, 9).values);
}

TEST_CASE("baselines learn the optimal policy of a small MDP") {
    // action 1 is optimal in every state by cost structure
    Mdp m(3, 2, 0.8);
    for (int s = 0; s < 3; ++s) {
        for (int s2 = 0; s2 < 3; ++s2) {
            m.prob(s, 0, s2) = 1.0 / 3.0;
            m.prob(s, 1, s2) = 1.0 / 3.0;
        }
        m.cost(s, 0) = 1.0;
        m.cost(s, 1) = 0.5;
    }
    ValueIterationResult vi = value_iteration(m);
    Simulator sim(m);
    SingleEnvOptions opts;
    opts.min_visits = 3000;
    opts.schedules.c1 = 50.0;
    opts.schedules.c2 = 0.9999;
    opts.schedules.c3 = 0.3;
    QTable dq = double_q_baseline(sim, opts, 12);
    CHECK(average_policy_error(vi.policy, policy_from_q(dq)) == 0.0);
    CHECK(linf_distance(dq, vi.q) <= 0.1);
    QTable mm = maxmin_q_baseline(sim, opts, 12);
    CHECK(average_policy_error(vi.policy, policy_from_q(mm)) == 0.0);
    CHECK(linf_distance(mm, vi.q) <= 0.1);
}
