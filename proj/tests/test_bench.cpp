#include <doctest.h>

#include "memq/bench.hpp"
#include "memq/rng.hpp"

#include <algorithm>

using namespace memq;

namespace {

GraphSpec tiny_ssur() {
    GraphSpec spec;
    spec.num_states = 12;
    spec.num_actions = 2;
    spec.block_count = 4;
    spec.sparsity_threshold = 0.6;
    return spec;
}

PipelineOptions tiny_pipeline() {
    PipelineOptions p;
    p.min_visits_estimate = 25;
    p.learn_min_visits = 40;
    p.k = 2;
    p.k_total = 4;
    p.sync_every = 4;
    return p;
}

} // namespace

TEST_CASE("prepare_trial produces a consistent bundle") {
    TrialArtifacts art = prepare_trial(tiny_ssur(), tiny_pipeline(), 3);
    CHECK(art.family.k_total == 4);
    CHECK(art.sims.size() == 4);
    CHECK(art.oracle.policy.actions.size() == 12);
    double ape = ccq_ape(art, tiny_pipeline(), 5);
    CHECK(ape >= 0.0);
    CHECK(ape <= 1.0);
}

TEST_CASE("default tracked pairs are deterministic, in range, and deduplicated") {
    auto pairs = default_tracked_pairs(20, 2);
    CHECK(pairs.size() == 10);
    for (auto [s, a] : pairs) {
        CHECK(s >= 0);
        CHECK(s < 20);
        CHECK(a >= 0);
        CHECK(a < 2);
    }
    CHECK(std::is_sorted(pairs.begin(), pairs.end()));
    CHECK(default_tracked_pairs(20, 2) == pairs);
}

TEST_CASE("method comparison: exhaustive is a lower envelope and counters check out") {
    PipelineOptions opts = tiny_pipeline();
    MethodComparisonResult res = run_method_comparison(tiny_ssur(), opts, 2, 2, 7);
    REQUIRE(res.rows.size() == 3);
    const MethodRow& ex = res.rows[0];
    const MethodRow& pt = res.rows[1];
    const MethodRow& cv = res.rows[2];
    CHECK(ex.method == "exhaustive");
    CHECK(ex.ape_mean <= pt.ape_mean + 1e-12);
    CHECK(ex.ape_mean <= cv.ape_mean + 1e-12);
    CHECK(ex.invocations == 2 * 6 * 2); // trials * C(4,2) * eval repeats
    CHECK(cv.comparisons == 2 * 3);     // trials * C(3,2) unique verdicts
    CHECK(cv.correct_detection >= 0.0);
    CHECK(cv.correct_detection <= 1.0);
    for (const auto& row : res.rows) {
        CHECK(row.ape_mean >= 0.0);
        CHECK(row.ape_mean <= 1.0);
        CHECK(row.repeats == 2);
    }
}

TEST_CASE("correct detection is exactly 1 when K equals K_total") {
    PipelineOptions opts = tiny_pipeline();
    opts.k = 4;
    opts.k_total = 4;
    MethodComparisonResult res = run_method_comparison(tiny_ssur(), opts, 1, 1, 11);
    CHECK(res.rows[2].correct_detection == doctest::Approx(1.0));
}

TEST_CASE("model sweep emits one row per knob flip with sane fields") {
    PipelineOptions opts = tiny_pipeline();
    std::vector<SweepRow> rows = run_model_sweep(tiny_ssur(), opts, 2, false, 13);
    REQUIRE(rows.size() == 8);
    CHECK(rows[0].label == "structured");
    CHECK(rows[1].label == "unstructured");
    for (const auto& r : rows) {
        CHECK(r.ape_mean >= 0.0);
        CHECK(r.ape_mean <= 1.0);
        CHECK(r.runtime_s >= 0.0);
        CHECK(r.sensitivity == 0.0); // sensitivity pass disabled
        CHECK(r.repeats == 2);
    }
    // base rows share one evaluation
    CHECK(rows[0].ape_mean == rows[2].ape_mean);
    CHECK(rows[0].ape_mean == rows[4].ape_mean);
    CHECK(rows[0].ape_mean == rows[6].ape_mean);
    std::string csv = sweep_csv(rows);
    CHECK(csv.find("label,ape_mean") == 0);
}

TEST_CASE("lambda estimation: order 1 has the smallest pooled error spread") {
    GraphSpec spec = tiny_ssur();
    PipelineOptions opts = tiny_pipeline();
    opts.k_total = 10;
    opts.min_visits_estimate = 40;
    opts.learn_min_visits = 300;
    opts.schedules.c1 = 100.0; // decay alpha fast enough for a quiet member 1
    TrialArtifacts art = prepare_trial(spec, opts, 19);
    LambdaEstimate est = estimate_lambdas(art, opts, 23);
    REQUIRE(est.lambdas.size() == 10);
    for (size_t i = 1; i < est.lambdas.size(); ++i)
        CHECK(est.lambdas[0] < est.lambdas[i]);
}

TEST_CASE("bound validation on a small graph: traces, bounds, csv") {
    BoundValidationOptions opts;
    opts.spec = tiny_ssur();
    opts.spec.num_states = 16;
    opts.prop = 1;
    opts.pipeline = tiny_pipeline();
    opts.pipeline.k_total = 3;
    opts.pipeline.k = 3;
    opts.pipeline.learn_min_visits = 150;
    opts.pipeline.sync_every = 1;
    BoundValidationResult res = run_bound_validation(opts, 29);
    CHECK(res.theta > 1.0);
    REQUIRE(!res.pairs.empty());
    for (const auto& pv : res.pairs) {
        CHECK(pv.bounds.exp_lb <= pv.bounds.exp_ub);
        CHECK(pv.bounds.var_lb <= pv.bounds.var_ub);
        CHECK(std::isfinite(pv.post_mean));
    }
    std::string csv = bound_trace_csv(res, 0);
    CHECK(csv.find("t,s,a,ln_c,exp_lb,exp_ub,var_lb,var_ub,prop_id") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') ==
          static_cast<long>(res.series.t.size()) + 1);
}

TEST_CASE("zero perturbation gives exactly zero sensitivity") {
    GraphSpec spec = tiny_ssur();
    PipelineOptions opts = tiny_pipeline();
    // identical runs: the sensitivity protocol applied with no deltas
    double base = 0.0, same = 0.0;
    {
        std::vector<double> apes;
        TrialArtifacts art = prepare_trial(spec, opts, 31);
        base = ccq_ape(art, opts, 33);
        TrialArtifacts art2 = prepare_trial(spec, opts, 31);
        same = ccq_ape(art2, opts, 33);
        (void)apes;
    }
    CHECK(base == same);
    KnobDeltas zero;
    GraphSpec p = perturb(spec, zero);
    CHECK(spec_to_json(p) == spec_to_json(spec));
}

TEST_CASE("algorithm comparison smoke: all four algorithms report APE in range") {
    PipelineOptions opts = tiny_pipeline();
    std::vector<AlgoRow> rows =
        run_algorithm_comparison({{12, 2}}, tiny_ssur(), opts, 1, 41);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        CHECK(r.ape_mean >= 0.0);
        CHECK(r.ape_mean <= 1.0);
    }
    std::string csv = algo_csv(rows);
    CHECK(csv.find("algorithm,") == 0);
}
