#pragma once

// Finite discounted-cost MDPs with dense row-stochastic transition tensors,
// tabular Q-values, policies, and the exact Bellman machinery used as the
// oracle everywhere else (value iteration for Q*, pi*, v*).

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace memq {

constexpr double kRowSumTol = 1e-9;

struct Mdp {
    int num_states = 0;
    int num_actions = 0;
    double gamma = 0.0;
    // transitions: [a][s][s2], flattened; costs: [a][s]
    std::vector<double> p;
    std::vector<double> c;

    Mdp() = default;
    Mdp(int S, int A, double g)
        : num_states(S), num_actions(A), gamma(g),
          p(static_cast<size_t>(S) * S * A, 0.0), c(static_cast<size_t>(S) * A, 0.0) {}

    double& prob(int s, int a, int s2) {
        return p[(static_cast<size_t>(a) * num_states + s) * num_states + s2];
    }
    double prob(int s, int a, int s2) const {
        return p[(static_cast<size_t>(a) * num_states + s) * num_states + s2];
    }
    std::span<const double> row(int s, int a) const {
        return {&p[(static_cast<size_t>(a) * num_states + s) * num_states],
                static_cast<size_t>(num_states)};
    }
    std::span<double> row_mut(int s, int a) {
        return {&p[(static_cast<size_t>(a) * num_states + s) * num_states],
                static_cast<size_t>(num_states)};
    }
    double& cost(int s, int a) { return c[static_cast<size_t>(a) * num_states + s]; }
    double cost(int s, int a) const { return c[static_cast<size_t>(a) * num_states + s]; }

    double cost_min() const;
    double cost_max() const;

    // Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

struct QTable {
    int num_states = 0;
    int num_actions = 0;
    double init_floor = 1e-3;
    std::vector<double> values;

    QTable() = default;
    QTable(int S, int A, double floor = 1e-3)
        : num_states(S), num_actions(A), init_floor(floor),
          values(static_cast<size_t>(S) * A, floor) {
        if (floor <= 0.0) throw std::invalid_argument("QTable: init_floor must be > 0");
    }

    double& q(int s, int a) { return values[static_cast<size_t>(s) * num_actions + a]; }
    double q(int s, int a) const { return values[static_cast<size_t>(s) * num_actions + a]; }

    int argmin_action(int s) const; // lowest index wins ties
    double min_value(int s) const;
};

struct Policy {
    enum class Kind { deterministic, stochastic };
    Kind kind = Kind::deterministic;
    int num_states = 0;
    int num_actions = 0;
    std::vector<int> actions;     // deterministic
    std::vector<double> probs;    // stochastic, [s][a]

    static Policy deterministic(std::vector<int> acts, int num_actions);
    static Policy stochastic(std::vector<double> row_probs, int num_states, int num_actions);

    int action(int s) const {
        if (kind != Kind::deterministic)
            throw std::logic_error("Policy::action on a stochastic policy");
        return actions[s];
    }
    void validate() const;
};

struct ValueIterationResult {
    QTable q;
    Policy policy;
    std::vector<double> v;
    int iterations = 0;
    double final_gap = 0.0;
};

class ConvergenceError : public std::runtime_error {
  public:
    ConvergenceError(const std::string& msg, double gap)
        : std::runtime_error(msg), last_gap(gap) {}
    double last_gap;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Solves the Bellman optimality equation by successive approximation on the
// Q-table until the L-inf gap between iterates is <= tol. Deterministic:
// identical inputs give bit-identical outputs.
ValueIterationResult value_iteration(const Mdp& mdp, double tol = 1e-8, int max_iters = 1000000);

// Evaluate a fixed deterministic policy exactly (direct linear solve).
std::vector<double> policy_value(const Mdp& mdp, const Policy& policy);

// Greedy (min) policy from a Q-table, lowest-index tie-break.
Policy policy_from_q(const QTable& q);

// Fraction of states on which two deterministic policies disagree.
double average_policy_error(const Policy& optimal, const Policy& estimated);

double linf_distance(const QTable& a, const QTable& b);

// L-inf norm of (T q - q) where T is the Bellman optimality operator.
double bellman_residual(const Mdp& mdp, const QTable& q);

// Sparse-triple JSON format:
// {"num_states":N,"num_actions":M,"gamma":g,
//  "transitions":[[s,a,s2,p],...],"costs":[[s,a,c],...]}
std::string mdp_to_json(const Mdp& mdp);
Mdp mdp_from_json(const std::string& text);
void save_mdp(const Mdp& mdp, const std::string& path);
Mdp load_mdp(const std::string& path);

} // namespace memq
