// memq: multi-environment Q-learning laboratory CLI.
//
// Subcommands: graph gen, run ccq, select, validate bounds, bench.
// All randomness flows from the --seed / config seed through named streams;
// reruns with the same config and seed reproduce every deterministic output
// byte for byte (timestamps and wall-clock live in meta.json).

#include "memq/bench.hpp"
#include "memq/config.hpp"
#include "memq/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace memq;

namespace {

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << text;
}

std::string timestamp_utc() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::vector<std::pair<int, int>> parse_pairs(const std::string& text) {
    std::vector<std::pair<int, int>> pairs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("--pairs expects \"s:a,s:a,...\"");
        pairs.emplace_back(std::stoi(item.substr(0, colon)),
                           std::stoi(item.substr(colon + 1)));
    }
    return pairs;
}

GraphSpec spec_from_cli(int states, int actions, const std::string& structure,
                        const std::string& sparsity, const std::string& direction,
                        const std::string& regularity, uint64_t seed, int blocks,
                        double gamma) {
    json j;
    j["num_states"] = states;
    j["num_actions"] = actions;
    j["structure"] = structure;
    j["sparsity"] = sparsity;
    j["direction"] = direction;
    j["regularity"] = regularity;
    j["seed"] = seed;
    j["block_count"] = blocks;
    j["gamma"] = gamma;
    return spec_from_json(j.dump());
}

int cmd_graph_gen(int states, int actions, const std::string& structure,
                  const std::string& sparsity, const std::string& direction,
                  const std::string& regularity, uint64_t seed, int blocks, double gamma,
                  const std::string& out) {
    GraphSpec spec =
        spec_from_cli(states, actions, structure, sparsity, direction, regularity, seed,
                      blocks, gamma);
    Mdp mdp = generate(spec);
    save_mdp(mdp, out);
    GraphStats st = measure_stats(mdp);
    json meta;
    meta["spec"] = json::parse(spec_to_json(spec));
    meta["realized"] = {{"zero_fraction", st.zero_fraction},
                        {"nonzero_fraction", st.nonzero_fraction},
                        {"one_directional_fraction", st.one_directional_fraction},
                        {"symmetric_adjacency", st.symmetric_adjacency},
                        {"min_out_degree", st.min_out_degree},
                        {"max_out_degree", st.max_out_degree}};
    write_file(out + ".meta.json", meta.dump(2) + "\n");
    std::cout << "wrote " << out << " (" << states << " states, " << actions
              << " actions)\n";
    return 0;
}

int cmd_run_ccq(const std::string& config_path, const std::string& out_dir) {
    double t0 = std::chrono::duration<double>(
                    std::chrono::steady_clock::now().time_since_epoch())
                    .count();
    RunConfig cfg = load_config(config_path);
    fs::create_directories(out_dir);

    Mdp truth;
    if (!cfg.graph_path.empty()) {
        truth = load_mdp(cfg.graph_path);
    } else {
        GraphSpec gspec = cfg.graph;
        gspec.seed = derive_seed(cfg.seed, "graph");
        truth = generate(gspec);
    }
    ValueIterationResult oracle = value_iteration(truth);

    Simulator truth_sim(truth);
    EstimatedModel est = sample_and_estimate(truth_sim, cfg.pipeline.min_visits_estimate,
                                             cfg.pipeline.trajectory_length,
                                             derive_seed(cfg.seed, "estimate"),
                                             cfg.episode_cap);
    EnvironmentFamily family = build_family(est.to_mdp(), cfg.pipeline.k_total);
    std::vector<Simulator> sims = build_simulators(family);

    CcqOptions copts;
    copts.k = cfg.pipeline.k;
    copts.k_total = cfg.pipeline.k_total;
    copts.zeta = cfg.zeta_mode();
    copts.ensemble = make_ensemble_options(cfg.pipeline);
    copts.ensemble.pi_star = &oracle.policy;
    std::ofstream trace;
    std::vector<Mdp> member_models;
    if (cfg.emit_trace) {
        trace.open(fs::path(out_dir) / "trace.jsonl");
        copts.ensemble.trace_jsonl = &trace;
        uint64_t steps = static_cast<uint64_t>(
            std::ceil(copts.ensemble.budget_overshoot * copts.ensemble.min_visits *
                      static_cast<double>(truth.num_states) * truth.num_actions));
        copts.ensemble.record_every = std::max<uint64_t>(1, steps / 200);
    }
    CcqResult res = ccq(family, sims, copts, derive_seed(cfg.seed, "ccq"));
    if (cfg.emit_trace) {
        member_models.clear();
        trace.close();
    }
    double ape = average_policy_error(oracle.policy, res.policy);

    write_file(fs::path(out_dir) / "config_resolved.json", config_to_json(cfg) + "\n");
    write_file(fs::path(out_dir) / "selection.json", selection_to_json(res.selection) + "\n");
    json report;
    report["schema_version"] = 1;
    report["seed"] = cfg.seed;
    report["ape"] = ape;
    report["chosen_orders"] = res.selection.chosen;
    report["comparisons_made"] = res.selection.comparisons_made;
    report["intransitive"] = res.selection.intransitive;
    report["global_steps"] = res.run.steps;
    report["config"] = json::parse(config_to_json(cfg));
    write_file(fs::path(out_dir) / "report.json", report.dump(2) + "\n");

    double t1 = std::chrono::duration<double>(
                    std::chrono::steady_clock::now().time_since_epoch())
                    .count();
    json meta;
    meta["timestamp_utc"] = timestamp_utc();
    meta["wall_clock_s"] = t1 - t0;
    write_file(fs::path(out_dir) / "meta.json", meta.dump(2) + "\n");
    std::cout << "APE " << ape << ", chosen orders [";
    for (size_t i = 0; i < res.selection.chosen.size(); ++i)
        std::cout << (i ? "," : "") << res.selection.chosen[i];
    std::cout << "], report in " << out_dir << "\n";
    return 0;
}

int cmd_select(const std::string& method, int k, int k_total, double gamma,
               const std::string& zeta, const std::string& graph_path, double cmin,
               double cmax, uint64_t seed, const std::string& out) {
    ZetaMode zmode = zeta == "uniform" ? ZetaMode::random() : ZetaMode::fixed(std::stod(zeta));
    SelectionResult sel;
    if (method == "partial") {
        sel = partial_order_select(k, k_total);
    } else if (method == "coverage") {
        if (!graph_path.empty()) {
            Mdp mdp = load_mdp(graph_path);
            gamma = mdp.gamma;
            cmin = mdp.cost_min();
            cmax = mdp.cost_max();
        }
        sel = coverage_select(k, k_total, gamma, cmin, cmax, zmode, seed);
    } else if (method == "exhaustive") {
        if (graph_path.empty())
            throw std::invalid_argument("select --method exhaustive requires --graph");
        Mdp truth = load_mdp(graph_path);
        ValueIterationResult oracle = value_iteration(truth);
        PipelineOptions pl;
        pl.k = k;
        pl.k_total = k_total;
        Simulator truth_sim(truth);
        EstimatedModel est = sample_and_estimate(truth_sim, pl.min_visits_estimate,
                                                 pl.trajectory_length,
                                                 derive_seed(seed, "estimate"));
        EnvironmentFamily family = build_family(est.to_mdp(), k_total);
        std::vector<Simulator> sims = build_simulators(family);
        EnsembleOptions eopts = make_ensemble_options(pl);
        sel = exhaustive_select(
            k, k_total,
            [&](const std::vector<int>& subset, int r) {
                EnsembleResult res = run_ensemble(family, sims, subset, eopts,
                                                  derive_seed(seed, "eval", r));
                return average_policy_error(oracle.policy, res.policy);
            },
            5);
    } else {
        throw std::invalid_argument("unknown --method: " + method);
    }
    write_file(out, selection_to_json(sel) + "\n");
    std::cout << "method " << sel.method << ", chosen [";
    for (size_t i = 0; i < sel.chosen.size(); ++i)
        std::cout << (i ? "," : "") << sel.chosen[i];
    std::cout << "] written to " << out << "\n";
    return 0;
}

int cmd_validate_bounds(int prop, int member, const std::string& pairs_text, int states,
                        int actions, uint64_t seed, const std::string& out_dir) {
    BoundValidationOptions opts;
    opts.prop = prop;
    opts.member = member;
    opts.spec.num_states = states;
    opts.spec.num_actions = actions;
    while (states % opts.spec.block_count != 0) --opts.spec.block_count;
    opts.pipeline.learn_min_visits = 150;
    opts.pipeline.sync_every = 1;
    if (!pairs_text.empty()) opts.tracked = parse_pairs(pairs_text);
    BoundValidationResult res = run_bound_validation(opts, seed);

    fs::create_directories(out_dir);
    json summary;
    summary["prop"] = res.prop;
    summary["theta"] = res.theta;
    summary["orders"] = res.orders;
    summary["lambdas"] = res.lambdas;
    summary["mus"] = res.mus;
    json pj = json::array();
    int contained = 0;
    for (size_t i = 0; i < res.pairs.size(); ++i) {
        const PairValidation& pv = res.pairs[i];
        pj.push_back({{"s", pv.s},
                      {"a", pv.a},
                      {"ln_v", pv.ln_v},
                      {"exp_lb", pv.bounds.exp_lb},
                      {"exp_ub", pv.bounds.exp_ub},
                      {"var_lb", pv.bounds.var_lb},
                      {"var_ub", pv.bounds.var_ub},
                      {"post_mean", pv.post_mean},
                      {"post_var", pv.post_var},
                      {"contained", pv.contained}});
        contained += pv.contained ? 1 : 0;
        std::ostringstream name;
        name << "bounds_prop" << prop << "_pair_" << pv.s << "_" << pv.a << ".csv";
        write_file(fs::path(out_dir) / name.str(), bound_trace_csv(res, i));
    }
    summary["pairs"] = std::move(pj);
    summary["contained_fraction"] =
        res.pairs.empty() ? 0.0 : static_cast<double>(contained) / res.pairs.size();
    write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
    std::cout << "prop " << prop << ": " << contained << "/" << res.pairs.size()
              << " tracked pairs inside the widened expectation interval; output in "
              << out_dir << "\n";
    return 0;
}

GraphSpec desk_ssur(int states, int actions) {
    GraphSpec spec;
    spec.num_states = states;
    spec.num_actions = actions;
    while (states % spec.block_count != 0) --spec.block_count;
    return spec;
}

int cmd_bench(const std::string& table, const std::string& figure, const std::string& scale,
              int repeats, uint64_t seed, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const bool paper = scale == "paper";
    json summary;
    summary["scale"] = scale;
    summary["seed"] = seed;
    summary["repeats"] = repeats;
    double t0 = std::chrono::duration<double>(
                    std::chrono::steady_clock::now().time_since_epoch())
                    .count();

    if (table == "1") {
        GraphSpec base = desk_ssur(paper ? 10000 : 200, 4);
        PipelineOptions opts;
        opts.threads = worker_limit();
        std::vector<SweepRow> rows = run_model_sweep(base, opts, repeats, true, seed);
        write_file(fs::path(out_dir) / "table1.csv", sweep_csv(rows));
        for (const auto& r : rows)
            summary["rows"].push_back({{"label", r.label},
                                       {"ape_mean", r.ape_mean},
                                       {"sensitivity", r.sensitivity}});
    } else if (table == "2") {
        GraphSpec spec = desk_ssur(paper ? 10000 : 30, 2);
        PipelineOptions opts;
        opts.k = 5;
        opts.k_total = 10;
        opts.threads = worker_limit();
        MethodComparisonResult res = run_method_comparison(spec, opts, repeats, 5, seed);
        write_file(fs::path(out_dir) / "table2.csv", method_csv(res.rows));
        for (const auto& r : res.rows)
            summary["rows"].push_back({{"method", r.method},
                                       {"ape_mean", r.ape_mean},
                                       {"runtime_s", r.runtime_s},
                                       {"comparisons", r.comparisons},
                                       {"invocations", r.invocations}});
    } else if (table == "3") {
        const int k_total = 15;
        std::ostringstream csv;
        csv << "k,partial,coverage_zeta05,coverage_uniform\n";
        for (int k = 2; k <= 9; ++k) {
            auto fmt = [](const std::vector<int>& v) {
                std::ostringstream os;
                for (size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
                return os.str();
            };
            SelectionResult pt = partial_order_select(k, k_total);
            SelectionResult cz =
                coverage_select(k, k_total, 0.9, 0.5, 1.0, ZetaMode::fixed(0.5));
            SelectionResult cu = coverage_select(k, k_total, 0.9, 0.5, 1.0,
                                                 ZetaMode::random(),
                                                 derive_seed(seed, "t3", k));
            csv << k << "," << fmt(pt.chosen) << "," << fmt(cz.chosen) << ","
                << fmt(cu.chosen) << "\n";
        }
        write_file(fs::path(out_dir) / "table3.csv", csv.str());
        summary["k_total"] = k_total;
    } else if (figure == "1a") {
        GraphSpec spec = desk_ssur(paper ? 10000 : 30, 2);
        PipelineOptions opts;
        opts.k_total = 10;
        opts.threads = worker_limit();
        std::ostringstream csv;
        csv << "k,correct_detection,ape_exhaustive,ape_partial,ape_coverage\n";
        for (int k = 2; k <= 6; ++k) {
            opts.k = k;
            MethodComparisonResult res = run_method_comparison(spec, opts, repeats, 5,
                                                               derive_seed(seed, "f1a", k));
            csv << k << "," << res.rows[2].correct_detection << "," << res.rows[0].ape_mean
                << "," << res.rows[1].ape_mean << "," << res.rows[2].ape_mean << "\n";
        }
        write_file(fs::path(out_dir) / "fig1a.csv", csv.str());
    } else if (figure == "1b") {
        std::vector<std::pair<int, int>> sizes =
            paper ? std::vector<std::pair<int, int>>{{1000, 2}, {2000, 3}, {4000, 4}}
                  : std::vector<std::pair<int, int>>{{60, 2}, {120, 3}, {200, 4}};
        GraphSpec knobs = desk_ssur(sizes[0].first, sizes[0].second);
        PipelineOptions opts;
        opts.threads = worker_limit();
        std::vector<AlgoRow> rows =
            run_algorithm_comparison(sizes, knobs, opts, repeats, seed);
        write_file(fs::path(out_dir) / "fig1b.csv", algo_csv(rows));
        for (const auto& r : rows)
            summary["rows"].push_back({{"algorithm", r.algorithm},
                                       {"num_states", r.num_states},
                                       {"ape_mean", r.ape_mean}});
    } else if (figure == "2a" || figure == "2b" || figure == "2c" || figure == "2d") {
        BoundValidationOptions opts;
        opts.spec = desk_ssur(paper ? 10000 : 200, 2);
        opts.pipeline.learn_min_visits = 150;
        opts.pipeline.sync_every = 1;
        if (figure == "2a") opts.prop = 1, opts.member = 1;
        if (figure == "2b") opts.prop = 1, opts.member = 2;
        if (figure == "2c") opts.prop = 2;
        if (figure == "2d") opts.prop = 3;
        BoundValidationResult res = run_bound_validation(opts, seed);
        for (size_t i = 0; i < res.pairs.size(); ++i) {
            std::ostringstream name;
            name << "fig" << figure << "_pair_" << res.pairs[i].s << "_" << res.pairs[i].a
                 << ".csv";
            write_file(fs::path(out_dir) / name.str(), bound_trace_csv(res, i));
        }
        summary["theta"] = res.theta;
        summary["lambdas"] = res.lambdas;
    } else if (figure == "2e") {
        // upper bounds on the expectation across action-space sizes at the
        // reference parameters, plus a simulated |A|=2 trace
        const double theta = 12.0, lambda1 = 0.24, q_star = 1.0;
        VMoments vm{std::log(0.5), 0.0};
        std::ostringstream csv;
        csv << "num_actions,exp_ub\n";
        for (int a : {2, 4, 8}) {
            BoundSet b = prop4_bounds(q_star, theta, lambda1, a, vm);
            csv << a << "," << b.exp_ub << "\n";
        }
        write_file(fs::path(out_dir) / "fig2e_bounds.csv", csv.str());
        BoundValidationOptions opts;
        opts.spec = desk_ssur(paper ? 10000 : 200, 2);
        opts.prop = 4;
        opts.pipeline.learn_min_visits = 150;
        opts.pipeline.sync_every = 1;
        BoundValidationResult res = run_bound_validation(opts, seed);
        for (size_t i = 0; i < res.pairs.size(); ++i) {
            std::ostringstream name;
            name << "fig2e_pair_" << res.pairs[i].s << "_" << res.pairs[i].a << ".csv";
            write_file(fs::path(out_dir) / name.str(), bound_trace_csv(res, i));
        }
        summary["theta"] = res.theta;
    } else {
        throw std::invalid_argument("bench: pass --table {1|2|3} or --figure {1a|1b|2a..2e}");
    }

    double t1 = std::chrono::duration<double>(
                    std::chrono::steady_clock::now().time_since_epoch())
                    .count();
    json meta;
    meta["timestamp_utc"] = timestamp_utc();
    meta["wall_clock_s"] = t1 - t0;
    write_file(fs::path(out_dir) / "meta.json", meta.dump(2) + "\n");
    write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
    std::cout << "bench output in " << out_dir << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"memq: multi-environment Q-learning laboratory"};
    app.require_subcommand(1);

    // graph gen
    auto* graph = app.add_subcommand("graph", "graph model tools");
    auto* gen = graph->add_subcommand("gen", "generate a random network-graph MDP");
    int states = 100, actions = 4, blocks = 4;
    double gamma = 0.9;
    std::string structure = "structured", sparsity = "sparse", direction = "undirected",
                regularity = "regular", out = "graph.json";
    uint64_t seed = 0;
    gen->add_option("--states", states);
    gen->add_option("--actions", actions);
    gen->add_option("--structure", structure)->check(CLI::IsMember({"structured", "unstructured"}));
    gen->add_option("--sparsity", sparsity)->check(CLI::IsMember({"sparse", "dense"}));
    gen->add_option("--direction", direction)->check(CLI::IsMember({"directed", "undirected"}));
    gen->add_option("--regularity", regularity)->check(CLI::IsMember({"regular", "irregular"}));
    gen->add_option("--blocks", blocks);
    gen->add_option("--gamma", gamma);
    gen->add_option("--seed", seed);
    gen->add_option("-o,--out", out);

    // run ccq
    auto* run = app.add_subcommand("run", "end-to-end runs");
    auto* ccq_cmd = run->add_subcommand("ccq", "coverage-based ensemble Q-learning");
    std::string config_path, run_out = "out";
    ccq_cmd->add_option("--config", config_path)->required();
    ccq_cmd->add_option("-o,--out", run_out);

    // select
    auto* select = app.add_subcommand("select", "environment selection");
    std::string method = "coverage", zeta = "uniform", graph_path, select_out = "selection.json";
    int k = 5, k_total = 10;
    double sel_gamma = 0.9, cmin = 0.5, cmax = 1.0;
    uint64_t sel_seed = 0;
    select->add_option("--method", method)
        ->check(CLI::IsMember({"exhaustive", "partial", "coverage"}));
    select->add_option("--k", k);
    select->add_option("--ktotal", k_total);
    select->add_option("--gamma", sel_gamma);
    select->add_option("--zeta", zeta);
    select->add_option("--graph", graph_path);
    select->add_option("--cmin", cmin);
    select->add_option("--cmax", cmax);
    select->add_option("--seed", sel_seed);
    select->add_option("-o,--out", select_out);

    // validate bounds
    auto* validate = app.add_subcommand("validate", "theory validation");
    auto* bounds = validate->add_subcommand("bounds", "coverage-coefficient bounds");
    int prop = 1, member = 1, vstates = 200, vactions = 2;
    std::string pairs_text, validate_out = "bounds_out";
    uint64_t vseed = 0;
    bounds->add_option("--prop", prop)->check(CLI::Range(1, 4));
    bounds->add_option("--member", member);
    bounds->add_option("--pairs", pairs_text);
    bounds->add_option("--states", vstates);
    bounds->add_option("--actions", vactions);
    bounds->add_option("--seed", vseed);
    bounds->add_option("-o,--out", validate_out);

    // bench
    auto* bench = app.add_subcommand("bench", "experiment reproduction");
    std::string table, figure, scale = "desk", bench_out = "bench_out";
    int repeats = 5;
    uint64_t bseed = 0;
    bench->add_option("--table", table)->check(CLI::IsMember({"1", "2", "3"}));
    bench->add_option("--figure", figure)
        ->check(CLI::IsMember({"1a", "1b", "2a", "2b", "2c", "2d", "2e"}));
    bench->add_option("--scale", scale)->check(CLI::IsMember({"desk", "paper"}));
    bench->add_option("--repeats", repeats);
    bench->add_option("--seed", bseed);
    bench->add_option("-o,--out", bench_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_graph_gen(states, actions, structure, sparsity, direction,
                                 regularity, seed, blocks, gamma, out);
        if (ccq_cmd->parsed()) return cmd_run_ccq(config_path, run_out);
        if (select->parsed())
            return cmd_select(method, k, k_total, sel_gamma, zeta, graph_path, cmin, cmax,
                              sel_seed, select_out);
        if (bounds->parsed())
            return cmd_validate_bounds(prop, member, pairs_text, vstates, vactions, vseed,
                                       validate_out);
        if (bench->parsed())
            return cmd_bench(table, figure, scale, repeats, bseed, bench_out);
        std::cerr << "no subcommand\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 4;
    } catch (const CoverageFailure& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 4;
    } catch (const BudgetError& e) {
        std::cerr << "runtime failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
