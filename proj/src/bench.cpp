#include "memq/bench.hpp"
#include "memq/parallel.hpp"
#include "memq/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

namespace memq {
namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    double sum = 0.0;
    for (double x : xs) sum += x;
    double mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    double std_dev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return {mean, std_dev};
}

} // namespace

TrialArtifacts prepare_trial(const GraphSpec& spec, const PipelineOptions& opts,
                             uint64_t seed) {
    TrialArtifacts art;
    GraphSpec gspec = spec;
    gspec.seed = derive_seed(seed, "trial-graph");
    art.truth = generate(gspec);
    art.oracle = value_iteration(art.truth);
    Simulator truth_sim(art.truth);
    EstimatedModel est =
        sample_and_estimate(truth_sim, opts.min_visits_estimate, opts.trajectory_length,
                            derive_seed(seed, "trial-estimate"));
    art.family = build_family(est.to_mdp(), opts.k_total);
    art.sims = build_simulators(art.family);
    return art;
}

EnsembleOptions make_ensemble_options(const PipelineOptions& opts) {
    EnsembleOptions e;
    e.schedules = opts.schedules;
    e.u_scheduled = opts.u_scheduled;
    e.u_fixed = opts.u_fixed;
    e.min_visits = opts.learn_min_visits;
    e.trajectory_length = opts.trajectory_length;
    e.budget_overshoot = opts.budget_overshoot;
    e.sync_every = opts.sync_every;
    return e;
}

double ccq_ape(const TrialArtifacts& art, const PipelineOptions& opts, uint64_t seed) {
    CcqOptions copts;
    copts.k = opts.k;
    copts.k_total = opts.k_total;
    copts.zeta = opts.zeta;
    copts.ensemble = make_ensemble_options(opts);
    CcqResult res = ccq(art.family, art.sims, copts, seed);
    return average_policy_error(art.oracle.policy, res.policy);
}

// ---- model sweep -----------------------------------------------------------

std::vector<KnobDeltas> sensitivity_protocol(const GraphSpec& spec) {
    std::vector<KnobDeltas> deltas;
    KnobDeltas d1;
    d1.sparsity_threshold = -0.1;
    deltas.push_back(d1);
    KnobDeltas d2;
    d2.sparsity_threshold = -0.2;
    deltas.push_back(d2);
    KnobDeltas d3;
    if (spec.regularity == Regularity::irregular && spec.degree_hi - 2 > spec.degree_lo)
        d3.degree_hi = -2;
    else
        d3.cost_high = 0.25;
    deltas.push_back(d3);
    return deltas;
}

namespace {

double sweep_ape_mean(const GraphSpec& spec, const PipelineOptions& opts, int repeats,
                      uint64_t seed, std::vector<double>* out_apes = nullptr) {
    std::vector<double> apes(repeats);
    parallel_for(repeats, opts.threads, [&](int r) {
        TrialArtifacts art = prepare_trial(spec, opts, derive_seed(seed, "sweep-trial", r));
        apes[r] = ccq_ape(art, opts, derive_seed(seed, "sweep-learn", r));
    });
    auto [mean, sd] = mean_std(apes);
    if (out_apes) *out_apes = std::move(apes);
    (void)sd;
    return mean;
}

} // namespace

std::vector<SweepRow> run_model_sweep(const GraphSpec& base, const PipelineOptions& opts,
                                      int repeats, bool with_sensitivity, uint64_t seed) {
    struct Variant {
        std::string label;
        GraphSpec spec;
    };
    std::vector<Variant> variants;
    variants.push_back({"structured", base});
    {
        GraphSpec v = base;
        v.structure = Structure::unstructured;
        variants.push_back({"unstructured", v});
    }
    variants.push_back({"sparse", base});
    {
        GraphSpec v = base;
        v.sparsity = Sparsity::dense;
        variants.push_back({"dense", v});
    }
    variants.push_back({"undirected", base});
    {
        GraphSpec v = base;
        v.direction = Direction::directed;
        variants.push_back({"directed", v});
    }
    variants.push_back({"regular", base});
    {
        GraphSpec v = base;
        v.regularity = Regularity::irregular;
        variants.push_back({"irregular", v});
    }

    std::map<std::string, SweepRow> cache; // identical specs share one evaluation
    std::vector<SweepRow> rows;
    for (const auto& var : variants) {
        std::string key = spec_to_json(var.spec);
        auto it = cache.find(key);
        if (it != cache.end()) {
            SweepRow row = it->second;
            row.label = var.label;
            rows.push_back(row);
            continue;
        }
        SweepRow row;
        row.label = var.label;
        row.spec = var.spec;
        row.repeats = repeats;
        double t0 = now_seconds();
        std::vector<double> apes;
        row.ape_mean = sweep_ape_mean(var.spec, opts, repeats, seed, &apes);
        row.ape_std = mean_std(apes).second;
        row.runtime_s = now_seconds() - t0;
        if (with_sensitivity) {
            double floor_ape = std::max(row.ape_mean, 1.0 / var.spec.num_states);
            std::vector<double> rel;
            for (const KnobDeltas& d : sensitivity_protocol(var.spec)) {
                GraphSpec pspec = perturb(var.spec, d);
                double pape = sweep_ape_mean(pspec, opts, repeats, seed);
                rel.push_back(std::abs(pape - row.ape_mean) / floor_ape);
            }
            row.sensitivity = mean_std(rel).first;
        }
        cache.emplace(std::move(key), row);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ---- method comparison -----------------------------------------------------

MethodComparisonResult run_method_comparison(const GraphSpec& spec,
                                             const PipelineOptions& opts, int repeats,
                                             int eval_repeats, uint64_t seed) {
    MethodComparisonResult out;
    out.eval_repeats = eval_repeats;

    struct Trial {
        double ape_ex = 0.0, ape_pt = 0.0, ape_cv = 0.0, detect = 0.0;
        double rt_ex = 0.0, rt_pt = 0.0, rt_cv = 0.0;
        long comparisons = 0, invocations = 0;
    };
    std::vector<Trial> trials(repeats);

    EnsembleOptions eopts = make_ensemble_options(opts);
    parallel_for(repeats, opts.threads, [&](int t) {
        Trial& tr = trials[t];
        TrialArtifacts art = prepare_trial(spec, opts, derive_seed(seed, "mc-trial", t));
        std::vector<uint64_t> eval_seeds(eval_repeats);
        for (int r = 0; r < eval_repeats; ++r)
            eval_seeds[r] = derive_seed(seed, "mc-eval", static_cast<uint64_t>(t) * 1024 + r);

        // every subset is scored under the same eval seed list, so the
        // exhaustive winner is a lower envelope of the other methods
        std::map<std::vector<int>, double> memo;
        auto eval_subset = [&](const std::vector<int>& subset) {
            auto it = memo.find(subset);
            if (it != memo.end()) return it->second;
            double sum = 0.0;
            for (int r = 0; r < eval_repeats; ++r) {
                EnsembleResult res =
                    run_ensemble(art.family, art.sims, subset, eopts, eval_seeds[r]);
                sum += average_policy_error(art.oracle.policy, res.policy);
            }
            double ape = sum / eval_repeats;
            memo.emplace(subset, ape);
            return ape;
        };

        double t0 = now_seconds();
        SelectionResult ex = exhaustive_select(
            opts.k, opts.k_total,
            [&](const std::vector<int>& subset, int r) {
                EnsembleResult res =
                    run_ensemble(art.family, art.sims, subset, eopts, eval_seeds[r]);
                return average_policy_error(art.oracle.policy, res.policy);
            },
            eval_repeats);
        tr.rt_ex = now_seconds() - t0;
        tr.invocations = ex.neql_invocations;
        for (const auto& [subset, ape] : ex.evaluations) memo[subset] = ape;
        tr.ape_ex = memo.at(ex.chosen);

        t0 = now_seconds();
        SelectionResult pt = partial_order_select(opts.k, opts.k_total);
        tr.ape_pt = eval_subset(pt.chosen);
        tr.rt_pt = now_seconds() - t0;

        t0 = now_seconds();
        SelectionResult cv =
            coverage_select(opts.k, opts.k_total, art.family.base.gamma,
                            art.family.base.cost_min(), art.family.base.cost_max(),
                            opts.zeta, derive_seed(seed, "mc-zeta", t));
        tr.ape_cv = eval_subset(cv.chosen);
        tr.rt_cv = now_seconds() - t0;
        tr.comparisons = cv.comparisons_made;

        std::vector<int> inter;
        std::set_intersection(cv.chosen.begin(), cv.chosen.end(), ex.chosen.begin(),
                              ex.chosen.end(), std::back_inserter(inter));
        tr.detect = static_cast<double>(inter.size()) / opts.k;
    });

    std::vector<double> ape_ex, ape_pt, ape_cv, detect;
    double rt_ex = 0.0, rt_pt = 0.0, rt_cv = 0.0;
    long comparisons = 0, invocations = 0;
    for (const Trial& tr : trials) {
        ape_ex.push_back(tr.ape_ex);
        ape_pt.push_back(tr.ape_pt);
        ape_cv.push_back(tr.ape_cv);
        detect.push_back(tr.detect);
        rt_ex += tr.rt_ex;
        rt_pt += tr.rt_pt;
        rt_cv += tr.rt_cv;
        comparisons += tr.comparisons;
        invocations += tr.invocations;
    }

    auto push_row = [&](const std::string& method, const std::vector<double>& apes,
                        double rt, long comp, long inv, double det) {
        MethodRow row;
        row.method = method;
        auto [mean, sd] = mean_std(apes);
        row.ape_mean = mean;
        row.ape_std = sd;
        row.runtime_s = rt;
        row.comparisons = comp;
        row.invocations = inv;
        row.correct_detection = det;
        row.repeats = repeats;
        out.rows.push_back(row);
    };
    push_row("exhaustive", ape_ex, rt_ex, 0, invocations, 1.0);
    push_row("partial", ape_pt, rt_pt, 0, 0, 0.0);
    push_row("coverage", ape_cv, rt_cv, comparisons, 0, mean_std(detect).first);
    return out;
}

// ---- algorithm comparison --------------------------------------------------

std::vector<AlgoRow> run_algorithm_comparison(const std::vector<std::pair<int, int>>& sizes,
                                              const GraphSpec& knobs,
                                              const PipelineOptions& opts, int repeats,
                                              uint64_t seed) {
    std::vector<AlgoRow> rows;
    for (auto [S, A] : sizes) {
        GraphSpec spec = knobs;
        spec.num_states = S;
        spec.num_actions = A;
        if (spec.structure == Structure::structured)
            while (S % spec.block_count != 0) --spec.block_count;

        std::map<std::string, std::vector<double>> apes;
        for (int t = 0; t < repeats; ++t) {
            uint64_t trial_seed = derive_seed(seed, "algo-trial",
                                              static_cast<uint64_t>(S) * 131 + t);
            TrialArtifacts art = prepare_trial(spec, opts, trial_seed);

            PipelineOptions ccq_opts = opts;
            apes["ccq"].push_back(
                ccq_ape(art, ccq_opts, derive_seed(trial_seed, "algo-ccq")));

            // naive nEQL: first K orders, no coverage ordering
            std::vector<int> naive(opts.k);
            for (int i = 0; i < opts.k; ++i) naive[i] = i + 1;
            EnsembleResult neql = run_ensemble(art.family, art.sims, naive,
                                               make_ensemble_options(opts),
                                               derive_seed(trial_seed, "algo-neql"));
            apes["neql"].push_back(average_policy_error(art.oracle.policy, neql.policy));

            // single-environment baselines interact with the true system and
            // get the pipeline's total per-pair sample allowance
            Simulator truth_sim(art.truth);
            SingleEnvOptions sopts;
            sopts.schedules = opts.schedules;
            sopts.min_visits = opts.min_visits_estimate + opts.learn_min_visits;
            sopts.trajectory_length = opts.trajectory_length;
            QTable dq = double_q_baseline(truth_sim, sopts, derive_seed(trial_seed, "algo-dq"));
            apes["double_q"].push_back(
                average_policy_error(art.oracle.policy, policy_from_q(dq)));
            QTable mm =
                maxmin_q_baseline(truth_sim, sopts, derive_seed(trial_seed, "algo-mmq"));
            apes["maxmin_q"].push_back(
                average_policy_error(art.oracle.policy, policy_from_q(mm)));
        }
        for (const char* alg : {"ccq", "neql", "double_q", "maxmin_q"}) {
            AlgoRow row;
            row.algorithm = alg;
            row.num_states = S;
            row.num_actions = A;
            auto [mean, sd] = mean_std(apes[alg]);
            row.ape_mean = mean;
            row.ape_std = sd;
            row.repeats = repeats;
            rows.push_back(row);
        }
    }
    return rows;
}

// ---- bound validation ------------------------------------------------------

std::vector<std::pair<int, int>> default_tracked_pairs(int S, int A, int count) {
    std::vector<std::pair<int, int>> pairs;
    count = std::min(count, S * A);
    for (int i = 0; i < count; ++i)
        pairs.emplace_back((i * S) / count, i % A);
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
}

LambdaEstimate estimate_lambdas(const TrialArtifacts& art, const PipelineOptions& opts,
                                uint64_t seed) {
    std::vector<int> orders(opts.k_total);
    for (int i = 0; i < opts.k_total; ++i) orders[i] = i + 1;
    EnsembleOptions eopts = make_ensemble_options(opts);
    eopts.q_star = &art.oracle.q;
    uint64_t steps = static_cast<uint64_t>(std::ceil(
        eopts.budget_overshoot * eopts.min_visits * art.truth.num_states *
        static_cast<double>(art.truth.num_actions)));
    eopts.record_every = std::max<uint64_t>(1, steps / 400);
    EnsembleResult res = run_ensemble(art.family, art.sims, orders, eopts, seed);
    LambdaEstimate est;
    est.orders = orders;
    for (size_t i = 0; i < orders.size(); ++i) {
        ErrorStats st = pooled_error_stats(res.member_errors[i]);
        est.lambdas.push_back(st.lambda);
        est.mus.push_back(st.mean);
    }
    return est;
}

BoundValidationResult run_bound_validation(const BoundValidationOptions& opts,
                                           uint64_t seed) {
    if (opts.prop < 1 || opts.prop > 4)
        throw std::invalid_argument("run_bound_validation: prop must be 1..4");
    const PipelineOptions& pl = opts.pipeline;
    TrialArtifacts art = prepare_trial(opts.spec, pl, derive_seed(seed, "bv-trial"));
    const int S = art.truth.num_states, A = art.truth.num_actions;

    BoundValidationResult out;
    out.prop = opts.prop;
    out.theta = estimate_theta(art.oracle.q);

    std::vector<std::pair<int, int>> tracked =
        opts.tracked.empty() ? default_tracked_pairs(S, A) : opts.tracked;

    // exploration distribution
    ExplorationDistribution v;
    if (opts.prop == 2 || opts.prop == 3) {
        // policy-consistent: the occupancy of an independently trained
        // ensemble table on the same estimated model
        CcqOptions copts;
        copts.k = pl.k;
        copts.k_total = pl.k_total;
        copts.zeta = ZetaMode::fixed(0.5);
        copts.ensemble = make_ensemble_options(pl);
        copts.ensemble.u_scheduled = false;
        copts.ensemble.u_fixed = opts.u_fixed;
        CcqResult indep = ccq(art.family, art.sims, copts, derive_seed(seed, "bv-vrun"));
        v = ExplorationDistribution::from_occupancies(
            {occupancy(indep.q_hat, ActionSelection::linear)}, 1e-6 / (S * A),
            VNormalization::per_state);
    } else {
        SingleEnvOptions sopts;
        sopts.schedules = pl.schedules;
        sopts.min_visits = pl.learn_min_visits;
        sopts.trajectory_length = pl.trajectory_length;
        std::vector<uint64_t> vseeds(static_cast<size_t>(opts.v_seeds));
        for (int i = 0; i < opts.v_seeds; ++i) vseeds[i] = derive_seed(seed, "bv-vseed", i);
        v = build_exploration_dist(art.sims[0], vseeds, sopts, VNormalization::per_state);
    }

    // main tracked run
    std::vector<int> chosen;
    if (opts.prop == 1 || opts.prop == 4) {
        chosen.resize(pl.k_total);
        for (int i = 0; i < pl.k_total; ++i) chosen[i] = i + 1;
    } else {
        SelectionResult sel = coverage_select(pl.k, pl.k_total, art.family.base.gamma,
                                              art.family.base.cost_min(),
                                              art.family.base.cost_max(),
                                              ZetaMode::fixed(0.5));
        chosen = sel.chosen;
    }
    EnsembleOptions eopts = make_ensemble_options(pl);
    eopts.u_scheduled = false;
    eopts.u_fixed = opts.u_fixed;
    eopts.q_star = &art.oracle.q;
    uint64_t steps = static_cast<uint64_t>(
        std::ceil(eopts.budget_overshoot * eopts.min_visits * static_cast<double>(S) * A));
    eopts.record_every =
        opts.record_every > 0 ? opts.record_every : std::max<uint64_t>(1, steps / 500);
    eopts.tracked_pairs.reserve(tracked.size());
    for (auto [s, a] : tracked) eopts.tracked_pairs.push_back({s, a, v.ln_at(s, a)});
    if (opts.prop == 1 || opts.prop == 4) {
        eopts.track_member_coverage = true;
        eopts.coverage_member = opts.member;
    } else {
        eopts.track_ensemble_coverage = true;
    }
    EnsembleResult run = run_ensemble(art.family, art.sims, chosen, eopts,
                                      derive_seed(seed, "bv-run"));

    out.orders = chosen;
    for (size_t i = 0; i < chosen.size(); ++i) {
        ErrorStats st = pooled_error_stats(run.member_errors[i]);
        out.lambdas.push_back(st.lambda);
        out.mus.push_back(st.mean);
    }
    double lambda_member = out.lambdas.empty() ? 0.0 : out.lambdas[0];
    for (size_t i = 0; i < chosen.size(); ++i)
        if (chosen[i] == opts.member) lambda_member = out.lambdas[i];
    double lambda_max = 0.0;
    for (double l : out.lambdas) lambda_max = std::max(lambda_max, l);

    out.series = (opts.prop == 1 || opts.prop == 4) ? run.member_coverage
                                                    : run.ensemble_coverage;

    for (size_t i = 0; i < tracked.size(); ++i) {
        auto [s, a] = tracked[i];
        PairValidation pv;
        pv.s = s;
        pv.a = a;
        pv.ln_v = v.ln_at(s, a);
        VMoments vm{pv.ln_v, 0.0}; // per-pair moments: v is deterministic per pair
        double qstar = art.oracle.q.q(s, a);
        switch (opts.prop) {
            case 1: pv.bounds = prop1_bounds(qstar, out.theta, lambda_member, vm); break;
            case 2: pv.bounds = prop2_bounds(qstar, out.theta, lambda_max, opts.u_fixed, vm); break;
            case 3:
                pv.bounds = prop3_bounds(qstar, out.theta, lambda_max, opts.u_fixed,
                                         static_cast<int>(chosen.size()), vm);
                break;
            case 4: pv.bounds = prop4_bounds(qstar, out.theta, lambda_member, A, vm); break;
        }
        // post-burn-in statistics over the trailing half of the trace
        const std::vector<double>& series = out.series.ln_c[i];
        size_t from = series.size() / 2;
        double sum = 0.0, sumsq = 0.0;
        size_t n = 0;
        for (size_t j = from; j < series.size(); ++j) {
            sum += series[j];
            sumsq += series[j] * series[j];
            ++n;
        }
        pv.post_mean = n ? sum / static_cast<double>(n) : 0.0;
        pv.post_var = n ? std::max(0.0, sumsq / static_cast<double>(n) -
                                            pv.post_mean * pv.post_mean)
                        : 0.0;
        double width = pv.bounds.exp_ub - pv.bounds.exp_lb;
        pv.contained = pv.post_mean >= pv.bounds.exp_lb - 0.05 * width &&
                       pv.post_mean <= pv.bounds.exp_ub + 0.05 * width;
        out.pairs.push_back(pv);
    }
    return out;
}

// ---- CSV -------------------------------------------------------------------

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "label,ape_mean,ape_std,runtime_s,sensitivity,repeats\n";
    for (const auto& r : rows)
        os << r.label << "," << r.ape_mean << "," << r.ape_std << "," << r.runtime_s << ","
           << r.sensitivity << "," << r.repeats << "\n";
    return os.str();
}

std::string method_csv(const std::vector<MethodRow>& rows) {
    std::ostringstream os;
    os << "method,ape_mean,ape_std,runtime_s,comparisons,invocations,correct_detection,"
          "repeats\n";
    for (const auto& r : rows)
        os << r.method << "," << r.ape_mean << "," << r.ape_std << "," << r.runtime_s << ","
           << r.comparisons << "," << r.invocations << "," << r.correct_detection << ","
           << r.repeats << "\n";
    return os.str();
}

std::string algo_csv(const std::vector<AlgoRow>& rows) {
    std::ostringstream os;
    os << "algorithm,num_states,num_actions,ape_mean,ape_std,repeats\n";
    for (const auto& r : rows)
        os << r.algorithm << "," << r.num_states << "," << r.num_actions << ","
           << r.ape_mean << "," << r.ape_std << "," << r.repeats << "\n";
    return os.str();
}

std::string bound_trace_csv(const BoundValidationResult& res, size_t pair_idx) {
    const PairValidation& pv = res.pairs.at(pair_idx);
    std::ostringstream os;
    os << "t,s,a,ln_c,exp_lb,exp_ub,var_lb,var_ub,prop_id\n";
    for (size_t j = 0; j < res.series.t.size(); ++j)
        os << res.series.t[j] << "," << pv.s << "," << pv.a << ","
           << res.series.ln_c[pair_idx][j] << "," << pv.bounds.exp_lb << ","
           << pv.bounds.exp_ub << "," << pv.bounds.var_lb << "," << pv.bounds.var_ub << ","
           << res.prop << "\n";
    return os.str();
}

} // namespace memq
