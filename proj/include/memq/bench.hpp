#pragma once

// Experiment protocols: the network-model sweep, the selection-method
// comparison, the algorithm comparison across state-action sizes, the
// coverage-bound validation runs, and the per-order lambda estimation.
// Every reported number is regenerable from (config snapshot, seed list);
// wall-clock timings are reported separately from the deterministic fields.

#include "memq/baselines.hpp"
#include "memq/coverage.hpp"
#include "memq/env_select.hpp"
#include "memq/graph_gen.hpp"

#include <optional>
#include <string>
#include <vector>

namespace memq {

struct PipelineOptions {
    int min_visits_estimate = 40;
    int trajectory_length = 10;
    int k = 5;
    int k_total = 10;
    ZetaMode zeta = ZetaMode::fixed(0.5);
    Schedules schedules;
    bool u_scheduled = true;
    double u_fixed = 0.5;
    int learn_min_visits = 60;
    double budget_overshoot = 2.2;
    int sync_every = 4;
    int threads = 1;
};

struct TrialArtifacts {
    Mdp truth;
    ValueIterationResult oracle;
    EnvironmentFamily family;
    std::vector<Simulator> sims;
};

TrialArtifacts prepare_trial(const GraphSpec& spec, const PipelineOptions& opts,
                             uint64_t seed);

EnsembleOptions make_ensemble_options(const PipelineOptions& opts);

// One CCQ run on prepared artifacts; APE against the value-iteration policy.
double ccq_ape(const TrialArtifacts& art, const PipelineOptions& opts, uint64_t seed);

// ---- Table I analogue ------------------------------------------------------

struct SweepRow {
    std::string label;
    GraphSpec spec;
    double ape_mean = 0.0;
    double ape_std = 0.0;
    double runtime_s = 0.0;
    double sensitivity = 0.0;
    int repeats = 0;
};

// Flips one knob at a time off the base spec; each variant is evaluated over
// `repeats` seeds. Sensitivity reruns each variant under the perturbation
// protocol (three deltas) and reports mean |dAPE| / max(APE, 1/S).
std::vector<SweepRow> run_model_sweep(const GraphSpec& base, const PipelineOptions& opts,
                                      int repeats, bool with_sensitivity, uint64_t seed);

std::vector<KnobDeltas> sensitivity_protocol(const GraphSpec& spec);

// ---- Table II / Fig 1a analogue -------------------------------------------

struct MethodRow {
    std::string method;
    double ape_mean = 0.0;
    double ape_std = 0.0;
    double runtime_s = 0.0;
    long comparisons = 0;
    long invocations = 0;
    double correct_detection = 0.0;
    int repeats = 0;
};

struct MethodComparisonResult {
    std::vector<MethodRow> rows; // exhaustive, partial, coverage
    int eval_repeats = 0;
};

MethodComparisonResult run_method_comparison(const GraphSpec& spec,
                                             const PipelineOptions& opts, int repeats,
                                             int eval_repeats, uint64_t seed);

// ---- Fig 1b analogue -------------------------------------------------------

struct AlgoRow {
    std::string algorithm;
    int num_states = 0;
    int num_actions = 0;
    double ape_mean = 0.0;
    double ape_std = 0.0;
    int repeats = 0;
};

std::vector<AlgoRow> run_algorithm_comparison(const std::vector<std::pair<int, int>>& sizes,
                                              const GraphSpec& knobs,
                                              const PipelineOptions& opts, int repeats,
                                              uint64_t seed);

// ---- Figs 2a-2e analogue ---------------------------------------------------

struct BoundValidationOptions {
    GraphSpec spec;
    int prop = 1;
    int member = 1; // traced environment order for props 1 and 4
    PipelineOptions pipeline;
    double u_fixed = 0.5;
    int record_every = 0; // 0: derived from the budget
    std::vector<std::pair<int, int>> tracked; // empty: 10 evenly spaced pairs
    int v_seeds = 3;
};

struct PairValidation {
    int s = 0;
    int a = 0;
    double ln_v = 0.0;
    BoundSet bounds;
    double post_mean = 0.0;
    double post_var = 0.0;
    bool contained = false; // post_mean within the 5%-widened expectation interval
};

struct BoundValidationResult {
    int prop = 0;
    double theta = 0.0;
    std::vector<int> orders;
    std::vector<double> lambdas; // aligned with orders
    std::vector<double> mus;
    std::vector<PairValidation> pairs;
    CoverageSeries series;
};

BoundValidationResult run_bound_validation(const BoundValidationOptions& opts,
                                           uint64_t seed);

// Per-order error statistics from one ensemble run over all k_total orders.
struct LambdaEstimate {
    std::vector<int> orders;
    std::vector<double> lambdas;
    std::vector<double> mus;
};

LambdaEstimate estimate_lambdas(const TrialArtifacts& art, const PipelineOptions& opts,
                                uint64_t seed);

std::vector<std::pair<int, int>> default_tracked_pairs(int S, int A, int count = 10);

// CSV writers (header row + one line per record).
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string method_csv(const std::vector<MethodRow>& rows);
std::string algo_csv(const std::vector<AlgoRow>& rows);
std::string bound_trace_csv(const BoundValidationResult& res, size_t pair_idx);

} // namespace memq
