#include <doctest.h>

#include "memq/mdp.hpp"
#include "memq/rng.hpp"

#include <Eigen/Dense>

#include <cmath>

using namespace memq;

namespace {

Mdp single_state_mdp(double cost, double gamma) {
    Mdp m(1, 1, gamma);
    m.prob(0, 0, 0) = 1.0;
    m.cost(0, 0) = cost;
    return m;
}

Mdp random_mdp(int S, int A, double gamma, uint64_t seed) {
    Mdp m(S, A, gamma);
    Rng rng(seed);
    for (int a = 0; a < A; ++a)
        for (int s = 0; s < S; ++s) {
            double sum = 0.0;
            std::span<double> row = m.row_mut(s, a);
            for (int s2 = 0; s2 < S; ++s2) {
                row[s2] = rng.uniform(0.05, 1.0);
                sum += row[s2];
            }
            for (int s2 = 0; s2 < S; ++s2) row[s2] /= sum;
            m.cost(s, a) = rng.uniform(0.5, 1.0);
        }
    return m;
}

// Exhaustive deterministic-policy enumeration; each policy evaluated by a
// direct linear solve. Independent of the value-iteration path.
QTable enumeration_oracle(const Mdp& m) {
    const int S = m.num_states, A = m.num_actions;
    long n_policies = 1;
    for (int s = 0; s < S; ++s) n_policies *= A;
    std::vector<double> best_v(S, std::numeric_limits<double>::infinity());
    for (long code = 0; code < n_policies; ++code) {
        std::vector<int> acts(S);
        long c = code;
        for (int s = 0; s < S; ++s) {
            acts[s] = static_cast<int>(c % A);
            c /= A;
        }
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(S, S);
        Eigen::VectorXd b(S);
        for (int s = 0; s < S; ++s) {
            for (int s2 = 0; s2 < S; ++s2) M(s, s2) -= m.gamma * m.prob(s, acts[s], s2);
            b(s) = m.cost(s, acts[s]);
        }
        Eigen::VectorXd v = M.partialPivLu().solve(b);
        for (int s = 0; s < S; ++s) best_v[s] = std::min(best_v[s], v(s));
    }
    QTable q(S, A);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) {
            double acc = 0.0;
            for (int s2 = 0; s2 < S; ++s2) acc += m.prob(s, a, s2) * best_v[s2];
            q.q(s, a) = m.cost(s, a) + m.gamma * acc;
        }
    return q;
}

} // namespace

TEST_CASE("validate rejects broken tensors") {
    Mdp m(2, 1, 0.9);
    m.prob(0, 0, 0) = 0.6; // row sums to 0.6
    m.prob(1, 0, 1) = 1.0;
    m.cost(0, 0) = m.cost(1, 0) = 1.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m.prob(0, 0, 1) = 0.4;
    CHECK_NOTHROW(m.validate());
    m.gamma = 1.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m.gamma = 0.9;
    m.cost(0, 0) = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("geometric-series fixed point: one state, cost 1, gamma 0.9") {
    ValueIterationResult res = value_iteration(single_state_mdp(1.0, 0.9), 1e-10);
    CHECK(res.q.q(0, 0) == doctest::Approx(10.0).epsilon(1e-8));
    CHECK(res.v[0] == doctest::Approx(10.0).epsilon(1e-8));
    CHECK(res.policy.action(0) == 0);
}

TEST_CASE("optimal policy is invariant under uniform cost scaling") {
    Mdp m = random_mdp(6, 3, 0.9, 17);
    ValueIterationResult base = value_iteration(m);
    Mdp scaled = m;
    for (double& c : scaled.c) c *= 4.5;
    ValueIterationResult res = value_iteration(scaled);
    CHECK(res.policy.actions == base.policy.actions);
    for (size_t i = 0; i < res.q.values.size(); ++i)
        CHECK(res.q.values[i] == doctest::Approx(4.5 * base.q.values[i]).epsilon(1e-6));
}

TEST_CASE("value iteration matches the policy-enumeration oracle") {
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        Mdp m = random_mdp(3, 2, 0.9, seed);
        ValueIterationResult res = value_iteration(m, 1e-12);
        QTable oracle = enumeration_oracle(m);
        CHECK(linf_distance(res.q, oracle) < 1e-6);
    }
}

TEST_CASE("bellman residual obeys the contraction bound") {
    Mdp m = random_mdp(8, 3, 0.95, 5);
    double tol = 1e-8;
    ValueIterationResult res = value_iteration(m, tol);
    CHECK(bellman_residual(m, res.q) <= tol * (1.0 + m.gamma) / (1.0 - m.gamma));
}

TEST_CASE("value iteration is bit-deterministic") {
    Mdp m = random_mdp(5, 2, 0.9, 23);
    ValueIterationResult a = value_iteration(m);
    ValueIterationResult b = value_iteration(m);
    CHECK(a.q.values == b.q.values);
    CHECK(a.policy.actions == b.policy.actions);
}

TEST_CASE("non-convergence raises with the last gap attached") {
    Mdp m = random_mdp(4, 2, 0.99, 9);
    try {
        value_iteration(m, 1e-12, 3);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.last_gap > 1e-12);
    }
}

TEST_CASE("policy_from_q: greedy min with lowest-index tie break") {
    QTable q(2, 2);
    q.q(0, 0) = 2.0;
    q.q(0, 1) = 1.0;
    q.q(1, 0) = 1.0;
    q.q(1, 1) = 1.0;
    Policy p = policy_from_q(q);
    CHECK(p.action(0) == 1);
    CHECK(p.action(1) == 0); // tie: lowest index
}

TEST_CASE("policy_from_q agrees with the value-iteration policy") {
    Mdp m = random_mdp(7, 3, 0.9, 31);
    ValueIterationResult res = value_iteration(m);
    CHECK(policy_from_q(res.q).actions == res.policy.actions);
}

TEST_CASE("average policy error") {
    Policy a = Policy::deterministic({0, 1, 0, 1}, 2);
    Policy b = Policy::deterministic({0, 1, 0, 1}, 2);
    CHECK(average_policy_error(a, b) == 0.0);
    Policy c = Policy::deterministic({1, 0, 1, 0}, 2);
    CHECK(average_policy_error(a, c) == 1.0);
    Policy d = Policy::deterministic({0, 1, 0, 0}, 2);
    CHECK(average_policy_error(a, d) == 0.25);
    CHECK(average_policy_error(d, a) == 0.25); // symmetric
    Policy e = Policy::deterministic({0, 1}, 2);
    CHECK_THROWS_AS(average_policy_error(a, e), std::invalid_argument);
}

TEST_CASE("mdp json round trip preserves the model") {
    Mdp m = random_mdp(4, 2, 0.8, 77);
    Mdp back = mdp_from_json(mdp_to_json(m));
    CHECK(back.num_states == m.num_states);
    CHECK(back.gamma == m.gamma);
    CHECK(back.p == m.p);
    CHECK(back.c == m.c);
}

TEST_CASE("sparse json omits zero transitions") {
    Mdp m(2, 1, 0.9);
    m.prob(0, 0, 1) = 1.0;
    m.prob(1, 0, 0) = 1.0;
    m.cost(0, 0) = m.cost(1, 0) = 0.7;
    std::string text = mdp_to_json(m);
    Mdp back = mdp_from_json(text);
    CHECK(back.prob(0, 0, 0) == 0.0);
    CHECK(back.prob(0, 0, 1) == 1.0);
}

TEST_CASE("stochastic policy rows are validated") {
    CHECK_THROWS_AS(Policy::stochastic({0.5, 0.4}, 1, 2), std::invalid_argument);
    CHECK_NOTHROW(Policy::stochastic({0.5, 0.5}, 1, 2));
}
