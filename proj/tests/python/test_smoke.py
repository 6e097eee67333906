"""Smoke tests for the python module: core operations round-trip through the
bindings and agree with small hand-computed references."""

import json
import math
import os
import subprocess

import memq


def chain_mdp():
    # 2 states, 2 actions; action 0 swaps states, action 1 stays
    transitions = [
        [[0.0, 1.0], [1.0, 0.0]],
        [[1.0, 0.0], [0.0, 1.0]],
    ]
    costs = [[1.0, 1.0], [0.5, 0.5]]
    return memq.Mdp(2, 2, 0.9, transitions, costs)


def test_value_iteration_fixed_point():
    m = chain_mdp()
    res = memq.value_iteration(m, tol=1e-10)
    # staying forever at cost 0.5 is optimal: v = 0.5 / (1 - 0.9) = 5
    assert abs(res["v"][0] - 5.0) < 1e-6
    assert res["policy"] == [1, 1]
    assert memq.policy_from_q(res["q"]) == [1, 1]


def test_average_policy_error():
    assert memq.average_policy_error([0, 1, 0, 1], [0, 1, 0, 0]) == 0.25


def test_mdp_json_roundtrip():
    m = chain_mdp()
    back = memq.Mdp.from_json(m.to_json())
    assert back.num_states == 2
    assert abs(back.prob(0, 0, 1) - 1.0) < 1e-12


def test_graph_generation_predicates():
    spec = {
        "num_states": 24,
        "num_actions": 2,
        "structure": "structured",
        "sparsity": "sparse",
        "direction": "undirected",
        "regularity": "regular",
        "sparsity_threshold": 0.7,
        "block_count": 4,
        "seed": 5,
    }
    m = memq.generate_graph(json.dumps(spec))
    st = memq.graph_stats(m)
    assert st["zero_fraction"] >= 0.7
    assert st["symmetric_adjacency"]
    assert st["all_out_degrees_equal"]
    assert memq.is_block_circulant(m, 0, 4)


def test_bound_evaluators_match_reference():
    # prop1 at Q*=1, theta=3, lambda=0.3, v=0.5
    b = memq.prop1_bounds(1.0, 3.0, 0.3, math.log(0.5), 0.0)
    assert abs(b["exp_lb"] - (math.log(0.25) - 0.015 - math.log(0.5))) < 1e-12
    assert abs(b["exp_ub"] - 0.4242151081081644) < 1e-12
    # prop4 reduces to prop1 at two actions
    b4 = memq.prop4_bounds(1.0, 3.0, 0.3, 2, math.log(0.5), 0.0)
    assert b4["exp_lb"] == b["exp_lb"]
    assert b4["exp_ub"] == b["exp_ub"]


def test_taylor_and_theta():
    e, v = memq.taylor_log_moments(2.0, 1.0)
    assert abs(e - (math.log(2.0) - 0.125)) < 1e-12
    assert abs(v - 0.25) < 1e-12
    assert abs(memq.softmax_epsilon_bound(2.0) - 0.6224593312018546) < 1e-12


def test_selection_operations():
    assert memq.partial_order_select(4, 8) == [1, 2, 3, 5]
    assert abs(memq.compute_f(0.9, 2, 3) - 1.3321033210332103) < 1e-12
    d = memq.decide_pair(0.9, 2, 3, 0.5, 1.0, 0.5)
    assert d["threshold"] == 1.25 and d["n_less"]
    rank = memq.coverage_order(0.9, 10)
    assert rank["ranked"] == list(range(1, 11))
    assert rank["comparisons"] <= 45
    assert abs(memq.theoretical_lambda(0.9, 2, 1.0) - 8.204451193747313) < 1e-12


def test_ccq_end_to_end():
    spec = {
        "num_states": 12,
        "num_actions": 2,
        "sparsity_threshold": 0.6,
        "block_count": 4,
        "seed": 9,
    }
    truth = memq.generate_graph(json.dumps(spec))
    out = memq.run_ccq(truth, k=3, k_total=6, learn_min_visits=150, seed=4)
    assert out["chosen"] == [1, 2, 3]
    assert 0.0 <= out["ape"] <= 1.0
    assert out["comparisons_made"] <= 15


def test_cli_graph_gen(tmp_path):
    cli = os.environ.get("MEMQ_CLI")
    if not cli:
        import pytest

        pytest.skip("MEMQ_CLI not set")
    out = tmp_path / "g.json"
    subprocess.run(
        [cli, "graph", "gen", "--states", "24", "--actions", "2", "--seed", "3",
         "-o", str(out)],
        check=True,
        capture_output=True,
    )
    doc = json.loads(out.read_text())
    assert doc["num_states"] == 24
    assert len(doc["transitions"]) > 0
