#include "memq/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace memq {

double Mdp::cost_min() const {
    double m = std::numeric_limits<double>::infinity();
    for (double x : c) m = std::min(m, x);
    return m;
}

double Mdp::cost_max() const {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : c) m = std::max(m, x);
    return m;
}

void Mdp::validate() const {
    if (num_states <= 0) throw std::invalid_argument("Mdp: num_states must be positive");
    if (num_actions <= 0) throw std::invalid_argument("Mdp: num_actions must be positive");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("Mdp: gamma must be strictly inside (0,1)");
    if (p.size() != static_cast<size_t>(num_states) * num_states * num_actions)
        throw std::invalid_argument("Mdp: transition tensor has wrong size");
    if (c.size() != static_cast<size_t>(num_states) * num_actions)
        throw std::invalid_argument("Mdp: cost tensor has wrong size");
    for (int a = 0; a < num_actions; ++a) {
        for (int s = 0; s < num_states; ++s) {
            double sum = 0.0;
            for (int s2 = 0; s2 < num_states; ++s2) {
                double x = prob(s, a, s2);
                if (x < 0.0 || x > 1.0) {
                    std::ostringstream os;
                    os << "Mdp: p(" << s << "," << a << "," << s2 << ")=" << x
                       << " outside [0,1]";
                    throw std::invalid_argument(os.str());
                }
                sum += x;
            }
            if (std::abs(sum - 1.0) > kRowSumTol) {
                std::ostringstream os;
                os << "Mdp: row (s=" << s << ",a=" << a << ") sums to " << sum;
                throw std::invalid_argument(os.str());
            }
        }
    }
    for (int a = 0; a < num_actions; ++a)
        for (int s = 0; s < num_states; ++s)
            if (!(cost(s, a) > 0.0) || !std::isfinite(cost(s, a)))
                throw std::invalid_argument("Mdp: costs must be finite and > 0");
}

int QTable::argmin_action(int s) const {
    int best = 0;
    double bv = q(s, 0);
    for (int a = 1; a < num_actions; ++a) {
        if (q(s, a) < bv) {
            bv = q(s, a);
            best = a;
        }
    }
    return best;
}

double QTable::min_value(int s) const { return q(s, argmin_action(s)); }

Policy Policy::deterministic(std::vector<int> acts, int num_actions) {
    Policy p;
    p.kind = Kind::deterministic;
    p.num_states = static_cast<int>(acts.size());
    p.num_actions = num_actions;
    p.actions = std::move(acts);
    p.validate();
    return p;
}

Policy Policy::stochastic(std::vector<double> row_probs, int num_states, int num_actions) {
    Policy p;
    p.kind = Kind::stochastic;
    p.num_states = num_states;
    p.num_actions = num_actions;
    p.probs = std::move(row_probs);
    p.validate();
    return p;
}

void Policy::validate() const {
    if (kind == Kind::deterministic) {
        for (int a : actions)
            if (a < 0 || a >= num_actions)
                throw std::invalid_argument("Policy: action index out of range");
    } else {
        if (probs.size() != static_cast<size_t>(num_states) * num_actions)
            throw std::invalid_argument("Policy: probability table has wrong size");
        for (int s = 0; s < num_states; ++s) {
            double sum = 0.0;
            for (int a = 0; a < num_actions; ++a) sum += probs[static_cast<size_t>(s) * num_actions + a];
            if (std::abs(sum - 1.0) > kRowSumTol)
                throw std::invalid_argument("Policy: stochastic row does not sum to 1");
        }
    }
}

ValueIterationResult value_iteration(const Mdp& mdp, double tol, int max_iters) {
    mdp.validate();
    if (!(tol > 0.0)) throw std::invalid_argument("value_iteration: tol must be > 0");
    const int S = mdp.num_states, A = mdp.num_actions;

    QTable q(S, A, 1e-3);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < A; ++a) q.q(s, a) = mdp.cost(s, a);

    std::vector<double> v(S, 0.0);
    QTable next = q;
    double gap = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < max_iters; ++it) {
        for (int s = 0; s < S; ++s) v[s] = q.min_value(s);
        gap = 0.0;
        for (int a = 0; a < A; ++a) {
            for (int s = 0; s < S; ++s) {
                std::span<const double> row = mdp.row(s, a);
                double acc = 0.0;
                for (int s2 = 0; s2 < S; ++s2) acc += row[s2] * v[s2];
                double nv = mdp.cost(s, a) + mdp.gamma * acc;
                gap = std::max(gap, std::abs(nv - next.q(s, a)));
                next.q(s, a) = nv;
            }
        }
        std::swap(q.values, next.values);
        if (gap <= tol) break;
    }
    if (gap > tol) {
        std::ostringstream os;
        os << "value_iteration: no convergence after " << max_iters
           << " iterations, last gap " << gap;
        throw ConvergenceError(os.str(), gap);
    }

    ValueIterationResult res;
    res.q = q;
    res.policy = policy_from_q(q);
    res.v.resize(S);
    for (int s = 0; s < S; ++s) res.v[s] = q.min_value(s);
    res.iterations = it + 1;
    res.final_gap = gap;
    return res;
}

std::vector<double> policy_value(const Mdp& mdp, const Policy& policy) {
    // Solve v = c_pi + gamma * P_pi v by fixed-point iteration to 1e-13;
    // contraction rate gamma makes this exact enough for oracle use.
    const int S = mdp.num_states;
    std::vector<double> v(S, 0.0), w(S, 0.0);
    for (int it = 0; it < 2000000; ++it) {
        double gap = 0.0;
        for (int s = 0; s < S; ++s) {
            int a = policy.action(s);
            std::span<const double> row = mdp.row(s, a);
            double acc = 0.0;
            for (int s2 = 0; s2 < S; ++s2) acc += row[s2] * v[s2];
            w[s] = mdp.cost(s, a) + mdp.gamma * acc;
            gap = std::max(gap, std::abs(w[s] - v[s]));
        }
        std::swap(v, w);
        if (gap <= 1e-13) break;
    }
    return v;
}

Policy policy_from_q(const QTable& q) {
    std::vector<int> acts(q.num_states);
    for (int s = 0; s < q.num_states; ++s) acts[s] = q.argmin_action(s);
    return Policy::deterministic(std::move(acts), q.num_actions);
}

double average_policy_error(const Policy& optimal, const Policy& estimated) {
    if (optimal.kind != Policy::Kind::deterministic ||
        estimated.kind != Policy::Kind::deterministic)
        throw std::invalid_argument("average_policy_error: both policies must be deterministic");
    if (optimal.actions.size() != estimated.actions.size())
        throw std::invalid_argument("average_policy_error: state count mismatch");
    size_t n = optimal.actions.size();
    size_t diff = 0;
    for (size_t s = 0; s < n; ++s)
        if (optimal.actions[s] != estimated.actions[s]) ++diff;
    return static_cast<double>(diff) / static_cast<double>(n);
}

double bellman_residual(const Mdp& mdp, const QTable& q) {
    const int S = mdp.num_states, A = mdp.num_actions;
    std::vector<double> v(S);
    for (int s = 0; s < S; ++s) v[s] = q.min_value(s);
    double res = 0.0;
    for (int a = 0; a < A; ++a)
        for (int s = 0; s < S; ++s) {
            std::span<const double> row = mdp.row(s, a);
            double acc = 0.0;
            for (int s2 = 0; s2 < S; ++s2) acc += row[s2] * v[s2];
            res = std::max(res, std::abs(mdp.cost(s, a) + mdp.gamma * acc - q.q(s, a)));
        }
    return res;
}

double linf_distance(const QTable& a, const QTable& b) {
    if (a.values.size() != b.values.size())
        throw std::invalid_argument("linf_distance: table size mismatch");
    double m = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i)
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    return m;
}

} // namespace memq
