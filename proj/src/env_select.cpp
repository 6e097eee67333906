#include "memq/env_select.hpp"
#include "memq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <json.hpp>

namespace memq {

double compute_f(double gamma, int n, int m) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("compute_f: gamma must be in (0,1)");
    if (n < 2 || m < 2)
        throw std::domain_error(
            "compute_f: undefined at order 1; environment 1 is ordered first "
            "unconditionally and never enters the pairwise rule");
    double num = (1.0 - std::pow(gamma, n)) * (1.0 - std::pow(gamma, m - 1));
    double den = (1.0 - std::pow(gamma, m)) * (1.0 - std::pow(gamma, n - 1));
    return num / den;
}

PairDecision decide_pair(double gamma, int n, int m, double c_min, double c_max,
                         double zeta) {
    if (!(c_min > 0.0) || !(c_max > c_min) || !std::isfinite(c_max))
        throw std::invalid_argument("decide_pair: need 0 < c_min < c_max < inf");
    if (!(zeta > 0.0 && zeta < 1.0))
        throw std::invalid_argument("decide_pair: zeta must be in (0,1)");
    PairDecision d;
    d.n = n;
    d.m = m;
    d.zeta = zeta;
    d.f = compute_f(gamma, n, m);
    d.threshold = zeta * (c_max / c_min) + (1.0 - zeta) * (c_min / c_max);
    d.n_less = d.f > d.threshold;
    return d;
}

double theoretical_lambda(double gamma, int n, double cost) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("theoretical_lambda: gamma must be in (0,1)");
    if (n < 1) throw std::invalid_argument("theoretical_lambda: n must be >= 1");
    if (!(cost > 0.0)) throw std::invalid_argument("theoretical_lambda: cost must be > 0");
    double coeff = gamma * (1.0 - std::pow(gamma, n - 1)) /
                   ((1.0 - std::pow(gamma, n)) * (1.0 - gamma));
    return std::sqrt(3.0) * cost * coeff;
}

RankResult coverage_order(double gamma, int k_total, double c_min, double c_max,
                          const ZetaMode& zeta, uint64_t seed) {
    if (k_total < 1) throw std::invalid_argument("coverage_order: k_total must be >= 1");
    RankResult res;
    res.ranked.push_back(1);
    if (k_total == 1) return res;

    Rng zrng(derive_seed(seed, "zeta"));
    std::map<std::pair<int, int>, PairDecision> memo; // key: unordered {lo,hi}
    auto verdict = [&](int challenger, int incumbent) -> const PairDecision& {
        auto key = std::minmax(challenger, incumbent);
        auto it = memo.find(key);
        if (it == memo.end()) {
            double z = zeta.uniform ? zrng.uniform01() : zeta.value;
            if (zeta.uniform && (z <= 0.0 || z >= 1.0)) z = 0.5;
            PairDecision d = decide_pair(gamma, challenger, incumbent, c_min, c_max, z);
            it = memo.emplace(key, d).first;
            ++res.comparisons;
        }
        return it->second;
    };

    std::vector<int> remaining;
    for (int n = 2; n <= k_total; ++n) remaining.push_back(n);
    while (!remaining.empty()) {
        size_t best = 0;
        for (size_t j = 1; j < remaining.size(); ++j) {
            // the remaining list stays ascending, so the challenger is always
            // the higher order and the incumbent the lower one
            const PairDecision& d = verdict(remaining[j], remaining[best]);
            bool challenger_wins =
                d.n == remaining[j] ? d.n_less : !d.n_less;
            if (challenger_wins) best = j;
        }
        res.ranked.push_back(remaining[best]);
        remaining.erase(remaining.begin() + static_cast<long>(best));
    }

    // audit the ranking against every evaluated verdict
    std::vector<int> pos(static_cast<size_t>(k_total) + 1, 0);
    for (size_t i = 0; i < res.ranked.size(); ++i) pos[res.ranked[i]] = static_cast<int>(i);
    for (const auto& [key, d] : memo) {
        int first = d.n_less ? d.n : d.m;
        int second = d.n_less ? d.m : d.n;
        if (pos[first] > pos[second]) {
            res.intransitive = true;
            break;
        }
    }
    if (res.intransitive) {
        // Borda count over all pairwise verdicts (missing pairs evaluated now)
        std::vector<int> wins(static_cast<size_t>(k_total) + 1, 0);
        for (int n = 2; n <= k_total; ++n)
            for (int m = n + 1; m <= k_total; ++m) {
                const PairDecision& d = verdict(m, n);
                int smaller = d.n_less ? d.n : d.m;
                ++wins[smaller];
            }
        std::vector<int> orders;
        for (int n = 2; n <= k_total; ++n) orders.push_back(n);
        std::stable_sort(orders.begin(), orders.end(), [&](int a, int b) {
            if (wins[a] != wins[b]) return wins[a] > wins[b];
            return a < b;
        });
        res.ranked.assign(1, 1);
        res.ranked.insert(res.ranked.end(), orders.begin(), orders.end());
    }
    res.decisions.reserve(memo.size());
    for (const auto& [key, d] : memo) res.decisions.push_back(d);
    return res;
}

SelectionResult partial_order_select(int k, int k_total) {
    if (k < 1 || k > k_total)
        throw std::invalid_argument("partial_order_select: need 1 <= k <= k_total");
    SelectionResult sel;
    sel.method = "partial";
    std::vector<bool> used(static_cast<size_t>(k_total) + 1, false);
    auto take = [&](int n) {
        if (static_cast<int>(sel.chosen.size()) < k && n <= k_total && !used[n]) {
            sel.chosen.push_back(n);
            used[n] = true;
        }
    };
    take(1);
    take(2);
    take(3);
    for (int odd = 5; odd <= k_total; odd += 2) take(odd);
    for (int n = 1; n <= k_total && static_cast<int>(sel.chosen.size()) < k; ++n) take(n);
    std::sort(sel.chosen.begin(), sel.chosen.end());
    return sel;
}

namespace {

void enumerate_subsets(int k, int k_total,
                       const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> subset(k);
    for (int i = 0; i < k; ++i) subset[i] = i + 1;
    while (true) {
        fn(subset);
        int i = k - 1;
        while (i >= 0 && subset[i] == k_total - (k - 1 - i)) --i;
        if (i < 0) break;
        ++subset[i];
        for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
}

long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

SelectionResult exhaustive_select(
    int k, int k_total, const std::function<double(const std::vector<int>&, int)>& runner,
    int repeats, long invocation_budget) {
    if (k < 1 || k > k_total)
        throw std::invalid_argument("exhaustive_select: need 1 <= k <= k_total");
    if (repeats < 1) throw std::invalid_argument("exhaustive_select: repeats must be >= 1");
    long required = binomial(k_total, k) * repeats;
    if (required > invocation_budget) {
        std::ostringstream os;
        os << "exhaustive_select: requires " << required
           << " learner invocations, budget is " << invocation_budget;
        throw BudgetError(os.str(), required);
    }
    SelectionResult sel;
    sel.method = "exhaustive";
    double best_ape = std::numeric_limits<double>::infinity();
    enumerate_subsets(k, k_total, [&](const std::vector<int>& subset) {
        double sum = 0.0;
        for (int r = 0; r < repeats; ++r) {
            sum += runner(subset, r);
            ++sel.neql_invocations;
        }
        double mean = sum / repeats;
        sel.evaluations.emplace_back(subset, mean);
        if (mean < best_ape) {
            best_ape = mean;
            sel.chosen = subset;
        }
    });
    std::sort(sel.chosen.begin(), sel.chosen.end());
    return sel;
}

SelectionResult coverage_select(int k, int k_total, double gamma, double c_min,
                                double c_max, const ZetaMode& zeta, uint64_t seed) {
    if (k < 1 || k > k_total)
        throw std::invalid_argument("coverage_select: need 1 <= k <= k_total");
    RankResult rank = coverage_order(gamma, k_total, c_min, c_max, zeta, seed);
    SelectionResult sel;
    sel.method = "coverage";
    sel.chosen.assign(rank.ranked.begin(), rank.ranked.begin() + k);
    std::sort(sel.chosen.begin(), sel.chosen.end());
    sel.comparisons_made = rank.comparisons;
    sel.intransitive = rank.intransitive;
    sel.decisions = rank.decisions;
    return sel;
}

CcqResult ccq(const EnvironmentFamily& family, const std::vector<Simulator>& sims,
              const CcqOptions& opts, uint64_t seed) {
    if (opts.k < 1 || opts.k > opts.k_total || opts.k_total > family.k_total)
        throw std::invalid_argument("ccq: need 1 <= k <= k_total <= family size");
    double c_min = family.base.cost_min();
    double c_max = family.base.cost_max();
    if (!(c_min < c_max)) c_max = c_min + 1e-12; // flat estimated costs
    CcqResult res;
    res.selection = coverage_select(opts.k, opts.k_total, family.base.gamma, c_min, c_max,
                                    opts.zeta, derive_seed(seed, "ccq-select"));
    res.run = run_ensemble(family, sims, res.selection.chosen, opts.ensemble,
                           derive_seed(seed, "ccq-learn"));
    res.q_hat = res.run.q_hat;
    res.policy = res.run.policy;
    return res;
}

std::string selection_to_json(const SelectionResult& sel) {
    nlohmann::json j;
    j["method"] = sel.method;
    j["chosen"] = sel.chosen;
    j["comparisons_made"] = sel.comparisons_made;
    j["nEQL_invocations"] = sel.neql_invocations;
    j["intransitive"] = sel.intransitive;
    nlohmann::json dec = nlohmann::json::array();
    for (const auto& d : sel.decisions)
        dec.push_back({{"n", d.n},
                       {"m", d.m},
                       {"f", d.f},
                       {"zeta", d.zeta},
                       {"threshold", d.threshold},
                       {"n_less", d.n_less}});
    j["decisions"] = std::move(dec);
    if (!sel.evaluations.empty()) {
        nlohmann::json ev = nlohmann::json::array();
        for (const auto& [subset, ape] : sel.evaluations)
            ev.push_back({{"subset", subset}, {"mean_ape", ape}});
        j["evaluations"] = std::move(ev);
    }
    return j.dump(2);
}

} // namespace memq
