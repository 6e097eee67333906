// Python bindings for the main operations: MDP construction and solving,
// graph generation, model estimation, the n-hop family, the ensemble learner,
// the bound evaluators, and environment selection.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "memq/bench.hpp"
#include "memq/config.hpp"

namespace py = pybind11;
using namespace memq;

namespace {

Mdp mdp_from_dense(int num_states, int num_actions, double gamma,
                   const std::vector<std::vector<std::vector<double>>>& transitions,
                   const std::vector<std::vector<double>>& costs) {
    Mdp m(num_states, num_actions, gamma);
    for (int a = 0; a < num_actions; ++a)
        for (int s = 0; s < num_states; ++s) {
            for (int s2 = 0; s2 < num_states; ++s2)
                m.prob(s, a, s2) = transitions.at(a).at(s).at(s2);
            m.cost(s, a) = costs.at(a).at(s);
        }
    m.validate();
    return m;
}

std::vector<std::vector<double>> qtable_rows(const QTable& q) {
    std::vector<std::vector<double>> rows(q.num_states,
                                          std::vector<double>(q.num_actions));
    for (int s = 0; s < q.num_states; ++s)
        for (int a = 0; a < q.num_actions; ++a) rows[s][a] = q.q(s, a);
    return rows;
}

py::dict bound_dict(const BoundSet& b) {
    py::dict d;
    d["exp_lb"] = b.exp_lb;
    d["exp_ub"] = b.exp_ub;
    d["var_lb"] = b.var_lb;
    d["var_ub"] = b.var_ub;
    d["prop_id"] = b.prop_id;
    return d;
}

} // namespace

PYBIND11_MODULE(memq, m) {
    m.doc() = "multi-environment Q-learning laboratory";

    py::class_<Mdp>(m, "Mdp")
        .def(py::init(&mdp_from_dense), py::arg("num_states"), py::arg("num_actions"),
             py::arg("gamma"), py::arg("transitions"), py::arg("costs"))
        .def_readonly("num_states", &Mdp::num_states)
        .def_readonly("num_actions", &Mdp::num_actions)
        .def_readonly("gamma", &Mdp::gamma)
        .def("prob", py::overload_cast<int, int, int>(&Mdp::prob, py::const_))
        .def("cost", py::overload_cast<int, int>(&Mdp::cost, py::const_))
        .def("to_json", &mdp_to_json)
        .def_static("from_json", &mdp_from_json)
        .def("validate", &Mdp::validate);

    py::class_<QTable>(m, "QTable")
        .def_readonly("num_states", &QTable::num_states)
        .def_readonly("num_actions", &QTable::num_actions)
        .def("q", py::overload_cast<int, int>(&QTable::q, py::const_))
        .def("rows", &qtable_rows);

    py::class_<Policy>(m, "Policy")
        .def_property_readonly("actions", [](const Policy& p) { return p.actions; });

    m.def("value_iteration",
          [](const Mdp& mdp, double tol, int max_iters) {
              ValueIterationResult res = value_iteration(mdp, tol, max_iters);
              py::dict d;
              d["q"] = res.q;
              d["policy"] = res.policy.actions;
              d["v"] = res.v;
              d["iterations"] = res.iterations;
              return d;
          },
          py::arg("mdp"), py::arg("tol") = 1e-8, py::arg("max_iters") = 1000000);

    m.def("policy_from_q", [](const QTable& q) { return policy_from_q(q).actions; });
    m.def("average_policy_error", [](const std::vector<int>& a, const std::vector<int>& b) {
        int na = 1 + *std::max_element(a.begin(), a.end());
        int nb = 1 + *std::max_element(b.begin(), b.end());
        return average_policy_error(Policy::deterministic(a, std::max(na, nb)),
                                    Policy::deterministic(b, std::max(na, nb)));
    });

    m.def("generate_graph", [](const std::string& spec_json) {
        return generate(spec_from_json(spec_json));
    });
    m.def("graph_stats", [](const Mdp& mdp) {
        GraphStats st = measure_stats(mdp);
        py::dict d;
        d["zero_fraction"] = st.zero_fraction;
        d["nonzero_fraction"] = st.nonzero_fraction;
        d["one_directional_fraction"] = st.one_directional_fraction;
        d["symmetric_adjacency"] = st.symmetric_adjacency;
        d["all_out_degrees_equal"] = st.all_out_degrees_equal;
        d["out_degrees"] = st.out_degrees;
        return d;
    });
    m.def("is_block_circulant", &is_block_circulant);

    m.def("sample_and_estimate",
          [](const Mdp& truth, int min_visits, int trajectory_length, uint64_t seed) {
              Simulator sim(truth);
              return sample_and_estimate(sim, min_visits, trajectory_length, seed).to_mdp();
          },
          py::arg("truth"), py::arg("min_visits") = 40, py::arg("trajectory_length") = 10,
          py::arg("seed") = 0);

    m.def("build_family_orders", [](const Mdp& base, int k_total) {
        EnvironmentFamily fam = build_family(base, k_total);
        std::vector<Mdp> envs;
        for (const auto& member : fam.members) envs.push_back(member.env);
        return envs;
    });

    m.def("taylor_log_moments", &taylor_log_moments);
    m.def("softmax_epsilon_bound", &softmax_epsilon_bound);
    m.def("estimate_theta", &estimate_theta, py::arg("q_star"), py::arg("inflation") = 1e-6);

    m.def("prop1_bounds", [](double q, double th, double lam, double e_ln_v, double v_ln_v) {
        return bound_dict(prop1_bounds(q, th, lam, {e_ln_v, v_ln_v}));
    });
    m.def("prop2_bounds",
          [](double q, double th, double lam, double u, double e_ln_v, double v_ln_v) {
              return bound_dict(prop2_bounds(q, th, lam, u, {e_ln_v, v_ln_v}));
          });
    m.def("prop3_bounds", [](double q, double th, double lam, double u, int k,
                             double e_ln_v, double v_ln_v) {
        return bound_dict(prop3_bounds(q, th, lam, u, k, {e_ln_v, v_ln_v}));
    });
    m.def("prop4_bounds",
          [](double q, double th, double lam, int num_actions, double e_ln_v, double v_ln_v) {
              return bound_dict(prop4_bounds(q, th, lam, num_actions, {e_ln_v, v_ln_v}));
          });

    m.def("compute_f", &compute_f);
    m.def("decide_pair", [](double gamma, int n, int mm, double cmin, double cmax,
                            double zeta) {
        PairDecision d = decide_pair(gamma, n, mm, cmin, cmax, zeta);
        py::dict out;
        out["f"] = d.f;
        out["threshold"] = d.threshold;
        out["n_less"] = d.n_less;
        return out;
    });
    m.def("theoretical_lambda", &theoretical_lambda);
    m.def("partial_order_select",
          [](int k, int k_total) { return partial_order_select(k, k_total).chosen; });
    m.def("coverage_order",
          [](double gamma, int k_total, double cmin, double cmax, double zeta) {
              RankResult r =
                  coverage_order(gamma, k_total, cmin, cmax, ZetaMode::fixed(zeta));
              py::dict d;
              d["ranked"] = r.ranked;
              d["comparisons"] = r.comparisons;
              d["intransitive"] = r.intransitive;
              return d;
          },
          py::arg("gamma"), py::arg("k_total"), py::arg("cmin") = 0.5,
          py::arg("cmax") = 1.0, py::arg("zeta") = 0.5);

    m.def("run_ccq",
          [](const Mdp& truth, int k, int k_total, int min_visits_estimate,
             int learn_min_visits, uint64_t seed, double zeta) {
              ValueIterationResult oracle = value_iteration(truth);
              Simulator sim(truth);
              EstimatedModel est = sample_and_estimate(sim, min_visits_estimate, 10,
                                                       derive_seed(seed, "estimate"));
              EnvironmentFamily fam = build_family(est.to_mdp(), k_total);
              std::vector<Simulator> sims = build_simulators(fam);
              CcqOptions opts;
              opts.k = k;
              opts.k_total = k_total;
              opts.zeta = ZetaMode::fixed(zeta);
              opts.ensemble.min_visits = learn_min_visits;
              CcqResult res = ccq(fam, sims, opts, derive_seed(seed, "ccq"));
              py::dict d;
              d["ape"] = average_policy_error(oracle.policy, res.policy);
              d["chosen"] = res.selection.chosen;
              d["comparisons_made"] = res.selection.comparisons_made;
              d["policy"] = res.policy.actions;
              d["q_hat"] = res.q_hat;
              return d;
          },
          py::arg("truth"), py::arg("k") = 3, py::arg("k_total") = 6,
          py::arg("min_visits_estimate") = 40, py::arg("learn_min_visits") = 60,
          py::arg("seed") = 0, py::arg("zeta") = 0.5);

    m.def("run_single_env",
          [](const Mdp& env, int min_visits, uint64_t seed) {
              Simulator sim(env);
              SingleEnvOptions opts;
              opts.min_visits = min_visits;
              return run_single_env(sim, opts, seed);
          },
          py::arg("env"), py::arg("min_visits") = 100, py::arg("seed") = 0);
}
