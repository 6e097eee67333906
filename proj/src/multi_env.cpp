#include "memq/multi_env.hpp"
#include "memq/rng.hpp"

#include <Eigen/Dense>

#include <sstream>

namespace memq {

Mdp EstimatedModel::to_mdp() const {
    Mdp mdp(num_states, num_actions, gamma);
    for (int a = 0; a < num_actions; ++a)
        for (int s = 0; s < num_states; ++s) {
            uint64_t n = visits(s, a);
            if (n == 0) {
                std::ostringstream os;
                os << "EstimatedModel: (s=" << s << ",a=" << a << ") never visited";
                throw std::runtime_error(os.str());
            }
            std::span<double> row = mdp.row_mut(s, a);
            for (int s2 = 0; s2 < num_states; ++s2)
                row[s2] = static_cast<double>(count(s, a, s2)) / static_cast<double>(n);
            mdp.cost(s, a) = cost_sums[static_cast<size_t>(a) * num_states + s] /
                             static_cast<double>(n);
        }
    mdp.validate();
    return mdp;
}

const EnvMember& EnvironmentFamily::member(int order) const {
    for (const auto& m : members)
        if (m.order == order) return m;
    throw std::out_of_range("EnvironmentFamily: no member of order " + std::to_string(order));
}

EstimatedModel sample_and_estimate(const Simulator& sim, int min_visits,
                                   int trajectory_length, uint64_t seed,
                                   long episode_cap) {
    if (min_visits < 1) throw std::invalid_argument("sample_and_estimate: min_visits >= 1");
    if (trajectory_length < 2)
        throw std::invalid_argument("sample_and_estimate: trajectory_length >= 2");
    const Mdp& mdp = sim.mdp();
    const int S = mdp.num_states, A = mdp.num_actions;

    EstimatedModel em;
    em.num_states = S;
    em.num_actions = A;
    em.gamma = mdp.gamma;
    em.min_visits = min_visits;
    em.trajectory_length = trajectory_length;
    em.transition_counts.assign(static_cast<size_t>(S) * S * A, 0);
    em.cost_sums.assign(static_cast<size_t>(S) * A, 0.0);
    em.visit_counts.assign(static_cast<size_t>(S) * A, 0);

    if (episode_cap < 0)
        episode_cap = 64L * min_visits * S * A / std::max(1, trajectory_length - 1) + 1024;

    Rng rng(derive_seed(seed, "estimate"));
    long pending = static_cast<long>(S) * A; // pairs below min_visits
    for (long ep = 0; ep < episode_cap && pending > 0; ++ep) {
        int s = rng.index(S);
        for (int step = 0; step + 1 < trajectory_length; ++step) {
            int a = rng.index(A);
            int s2 = sim.next_state(s, a, rng);
            double c = sim.sample_cost(s, a, rng);
            size_t sa = static_cast<size_t>(a) * S + s;
            em.transition_counts[sa * S + s2] += 1;
            em.cost_sums[sa] += c;
            em.visit_counts[sa] += 1;
            if (em.visit_counts[sa] == static_cast<uint64_t>(min_visits)) --pending;
            s = s2;
        }
    }
    if (pending > 0) {
        std::vector<std::pair<int, int>> uncovered;
        for (int s = 0; s < S; ++s)
            for (int a = 0; a < A; ++a)
                if (em.visits(s, a) < static_cast<uint64_t>(min_visits))
                    uncovered.emplace_back(s, a);
        std::ostringstream os;
        os << "sample_and_estimate: " << uncovered.size()
           << " state-action pairs below min_visits after " << episode_cap << " episodes";
        throw CoverageFailure(os.str(), std::move(uncovered));
    }
    return em;
}

EnvironmentFamily build_family(const Mdp& base, int k_total) {
    if (k_total < 1) throw std::invalid_argument("build_family: k_total >= 1");
    base.validate();
    const int S = base.num_states, A = base.num_actions;

    EnvironmentFamily fam;
    fam.base = base;
    fam.k_total = k_total;
    fam.members.reserve(k_total);

    using Mat = Eigen::MatrixXd;
    std::vector<Mat> power(A), step(A);
    for (int a = 0; a < A; ++a) {
        Mat m(S, S);
        for (int s = 0; s < S; ++s)
            for (int s2 = 0; s2 < S; ++s2) m(s, s2) = base.prob(s, a, s2);
        step[a] = m;
        power[a] = m;
    }

    for (int n = 1; n <= k_total; ++n) {
        EnvMember member;
        member.order = n;
        member.env = Mdp(S, A, std::pow(base.gamma, n));
        member.env.c = base.c;
        if (n == 1) {
            member.env.p = base.p; // order 1 is the base model, bit for bit
            member.env.gamma = base.gamma;
            fam.members.push_back(std::move(member));
            continue;
        }
        for (int a = 0; a < A; ++a) {
            power[a] = power[a] * step[a];
            for (int s = 0; s < S; ++s) {
                std::span<double> row = member.env.row_mut(s, a);
                double sum = 0.0;
                for (int s2 = 0; s2 < S; ++s2) {
                    row[s2] = std::max(0.0, power[a](s, s2));
                    sum += row[s2];
                }
                // renormalize away accumulated round-off so rows stay stochastic
                for (int s2 = 0; s2 < S; ++s2) row[s2] /= sum;
            }
        }
        member.env.validate();
        fam.members.push_back(std::move(member));
    }
    return fam;
}

} // namespace memq
