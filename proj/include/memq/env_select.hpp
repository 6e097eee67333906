#pragma once

// Environment-utility ordering and selection: the closed-form pairwise
// decision rule on estimation-error variances, the coverage-based complete
// ordering built from it, the frozen partial-ordering heuristic, exhaustive
// subset search, and the end-to-end coverage-based ensemble learner.

#include "memq/multi_env.hpp"
#include "memq/q_engine.hpp"

#include <functional>
#include <string>
#include <vector>

namespace memq {

// f(gamma,n,m) = (1-gamma^n)(1-gamma^(m-1)) / ((1-gamma^m)(1-gamma^(n-1))).
// Undefined at order 1 (environment 1 is ordered first unconditionally).
double compute_f(double gamma, int n, int m);

struct PairDecision {
    int n = 0;
    int m = 0;
    double f = 0.0;
    double zeta = 0.5;
    double threshold = 0.0;
    bool n_less = false; // true: lambda_n < lambda_m
};

// lambda_n < lambda_m iff f(gamma,n,m) > zeta*cmax/cmin + (1-zeta)*cmin/cmax.
PairDecision decide_pair(double gamma, int n, int m, double c_min, double c_max,
                         double zeta);

struct ZetaMode {
    bool uniform = true; // redraw zeta per comparison
    double value = 0.5;  // used when uniform == false

    static ZetaMode fixed(double v) { return {false, v}; }
    static ZetaMode random() { return {true, 0.5}; }
};

struct RankResult {
    std::vector<int> ranked; // all orders, environment 1 first
    long comparisons = 0;    // unique decide_pair evaluations
    bool intransitive = false;
    std::vector<PairDecision> decisions;
};

// Complete ordering of orders 1..k_total: environment 1 first, the rest by a
// best-of-remaining comparison sort over decide_pair verdicts (the incumbent
// is always the lower order). Verdicts are memoized per pair; if the final
// ranking contradicts any evaluated verdict the ordering falls back to a
// Borda count over all pairwise verdicts and is flagged intransitive.
RankResult coverage_order(double gamma, int k_total, double c_min, double c_max,
                          const ZetaMode& zeta, uint64_t seed = 0);

// sqrt(3) * cost * gamma (1-gamma^(n-1)) / ((1-gamma^n)(1-gamma)); 0 at n=1.
double theoretical_lambda(double gamma, int n, double cost);

struct SelectionResult {
    std::string method;
    std::vector<int> chosen; // sorted ascending
    long comparisons_made = 0;
    long neql_invocations = 0;
    bool intransitive = false;
    std::vector<PairDecision> decisions;
    std::vector<std::pair<std::vector<int>, double>> evaluations; // exhaustive log
};

// Frozen heuristic reproducing the published selections: orders 1,2,3, then
// odd orders 5,7,9,... ascending; when the odd orders run out, the smallest
// unused orders fill the remainder.
SelectionResult partial_order_select(int k, int k_total);

class BudgetError : public std::runtime_error {
  public:
    BudgetError(const std::string& msg, long required)
        : std::runtime_error(msg), required_invocations(required) {}
    long required_invocations;
};

// Evaluates every K-subset of {1..k_total} with the supplied runner (subset,
// repeat index) -> APE and returns the subset with the smallest mean APE
// (ties: first in lexicographic order).
SelectionResult exhaustive_select(
    int k, int k_total, const std::function<double(const std::vector<int>&, int)>& runner,
    int repeats = 5, long invocation_budget = 1000000);

SelectionResult coverage_select(int k, int k_total, double gamma, double c_min,
                                double c_max, const ZetaMode& zeta, uint64_t seed = 0);

struct CcqOptions {
    int k = 5;
    int k_total = 10;
    ZetaMode zeta = ZetaMode::random();
    EnsembleOptions ensemble;
};

struct CcqResult {
    QTable q_hat;
    Policy policy;
    SelectionResult selection;
    EnsembleResult run;
};

// Algorithm: read cost bounds off the estimated model, rank environments with
// the coverage ordering, run the ensemble learner on the first K, emit the
// ensemble table and its greedy policy.
CcqResult ccq(const EnvironmentFamily& family, const std::vector<Simulator>& sims,
              const CcqOptions& opts, uint64_t seed);

std::string selection_to_json(const SelectionResult& sel);

} // namespace memq
