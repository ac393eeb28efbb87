import json
import random

import numpy as np
import pytest

from conftest import random_graph
from rcpc.consensus import (AdversaryModel, Constant, Oscillate, Protocol, Ramp, Scenario,
                            ScenarioError, Scope, Trace, WeightRule, adversary_violations,
                            check_agreement, check_safety, considered_set, load_scenario,
                            necessity_witness, partition_extremes, rcpc_step, read_trace_csv,
                            rescue_by_color, run_simulation, same_color_subsets, save_scenario,
                            scenario_from_dict, simulate_outcome, validate_adversary_placement,
                            wmsr_step, write_trace_csv)
from rcpc.graph import build_graph, complete_graph, cycle_graph, disjoint_union, recolor_uniform

# node 0 at value 0 with neighbors a..e = 1..5
STAR = build_graph(6, [(0, v) for v in range(1, 6)], [0, 1, 2, 1, 1, 2])
STAR_X = np.array([0.0, 5.0, 4.0, 3.0, -5.0, -4.0])


def test_partition_extremes():
    assert partition_extremes(STAR, STAR_X, 0, 2) == ([1, 2], [4, 5])
    assert partition_extremes(STAR, STAR_X, 0, 0) == ([], [])
    assert partition_extremes(STAR, np.zeros(6), 0, 2) == ([], [])
    # fewer than F strictly greater neighbors: all of them go
    assert partition_extremes(STAR, STAR_X, 0, 9)[0] == [1, 2, 3]
    with pytest.raises(ScenarioError):
        partition_extremes(STAR, STAR_X, 6, 1)


def test_partition_ties_prefer_lower_id():
    g = complete_graph(4)
    assert partition_extremes(g, [0.0, 1.0, 1.0, 1.0], 0, 2)[0] == [1, 2]


def test_rescue_by_color():
    assert rescue_by_color(STAR, STAR_X, [1, 2], "max") == [2]
    assert rescue_by_color(STAR, STAR_X, [4, 5], "min") == [5]
    assert rescue_by_color(STAR, STAR_X, [1, 3], "max") == []
    assert rescue_by_color(STAR, STAR_X, [], "max") == []


def test_hand_example():
    assert considered_set(STAR, STAR_X, 0, 2) == [0, 2, 3, 5]
    assert rcpc_step(STAR, STAR_X, 0, 2) == pytest.approx(0.75)
    assert wmsr_step(STAR, STAR_X, 0, 2) == pytest.approx(1.5)
    assert rcpc_step(STAR, np.full(6, 2.5), 0, 2) == 2.5


def _random_instance(rng):
    n = rng.randint(2, 10)
    g = random_graph(rng, n, rng.uniform(0.2, 1.0), rng.randint(1, 4))
    x = np.array([rng.choice([rng.random(), round(rng.random(), 1)]) for _ in range(n)])
    return g, x, rng.randrange(n), rng.randint(0, 3)


def test_wmsr_reduction():
    rng = random.Random(11)
    for _ in range(1000):
        g, x, i, F = _random_instance(rng)
        u = recolor_uniform(g)
        assert rcpc_step(u, x, i, F) == wmsr_step(u, x, i, F)


def test_kernel_step_matches_reference():
    rng = random.Random(12)
    for _ in range(300):
        g, x, _, F = _random_instance(rng)
        for proto, ref in ((Protocol.RCPC, rcpc_step), (Protocol.WMSR, wmsr_step)):
            tr = run_simulation(Scenario(g, x, AdversaryModel(F=F), proto, T=1))
            want = [ref(g, x, i, F) for i in range(g.n)]
            np.testing.assert_array_equal(tr.states[1], want)


def _random_scenario(rng, protocol=Protocol.RCPC):
    n = rng.randint(3, 10)
    g = random_graph(rng, n, rng.uniform(0.3, 1.0), rng.randint(1, 4))
    F = rng.randint(0, 2)
    c = rng.choice(g.colors)
    pool = [v for v in range(n) if g.colors[v] == c]
    adv = frozenset(rng.sample(pool, min(F, len(pool), n - 1)))
    strat = rng.choice([Constant({v: rng.uniform(-2, 3) for v in adv}),
                        Ramp({v: rng.uniform(-0.1, 0.1) for v in adv}),
                        Oscillate(rng.uniform(0, 3), rng.randint(2, 30))])
    return Scenario(g, None, AdversaryModel(Scope.F_TOTAL, F, adv, strat), protocol,
                    T=rng.randint(1, 200), seed=rng.randrange(2 ** 31))


def test_safety_and_envelope():
    rng = random.Random(13)
    for _ in range(300):
        tr = run_simulation(_random_scenario(rng))
        assert check_safety(tr)
        assert (np.diff(tr.M_series) <= 1e-12).all()
        assert (np.diff(tr.m_series) >= -1e-12).all()


def test_determinism():
    rng = random.Random(14)
    for _ in range(20):
        sc = _random_scenario(rng)
        assert run_simulation(sc).states.tobytes() == run_simulation(sc).states.tobytes()


def test_plain_consensus():
    g = cycle_graph(7)
    tr = run_simulation(Scenario(g, None, AdversaryModel(F=0), Protocol.WMSR, T=2000, seed=3))
    assert check_agreement(tr, 1e-6) and check_safety(tr)
    x0 = tr.states[0]
    assert x0.min() <= tr.states[-1, 0] <= x0.max()


def test_constant_adversaries_hold_value():
    g = complete_graph(6, [0, 0, 1, 1, 2, 2])
    sc = Scenario(g, None, AdversaryModel(Scope.F_TOTAL, 2, frozenset({0, 1}),
                                          Constant({0: 7.0, 1: -3.0})), T=50)
    tr = run_simulation(sc)
    assert (tr.states[:, 0] == 7.0).all() and (tr.states[:, 1] == -3.0).all()
    assert tr.adversaries == [0, 1]


def test_safety_checker_detects_violation():
    states = np.array([[0.0, 1.0], [0.5, 0.5]])
    tr = Trace(states.copy(), np.array([True, True]))
    assert check_safety(tr)
    tr.states[1, 0] = 1.5
    assert not check_safety(tr)
    assert check_safety(Trace(np.zeros((3, 1)), np.array([True])))


def test_agreement_checker():
    tr = Trace(np.ones((4, 3)), np.array([True, True, True]))
    assert check_agreement(tr, 1e-9)
    tr0 = Trace(np.array([[0.0, 0.1]]), np.array([True, True]))
    assert check_agreement(tr0, 0.5) and not check_agreement(tr0, 0.05)
    with pytest.raises(ValueError):
        check_agreement(tr, 0)


def test_adversary_placement():
    k5 = complete_graph(5, [0, 1, 2, 3, 4])
    assert not validate_adversary_placement(k5, AdversaryModel(Scope.F_TOTAL, 3, frozenset({0, 1})))
    g = complete_graph(6, [0, 0, 0, 1, 1, 1])
    assert validate_adversary_placement(g, AdversaryModel(Scope.F_TOTAL, 3, frozenset({0, 1, 2})))
    assert not validate_adversary_placement(g, AdversaryModel(Scope.F_TOTAL, 2, frozenset({0, 1, 2})))
    star = build_graph(5, [(0, v) for v in range(1, 5)], [0] * 5)
    # open neighborhoods: center plus one leaf puts one adversary next to each node
    assert validate_adversary_placement(star, AdversaryModel(Scope.F_LOCAL, 1, frozenset({0, 1})))
    msgs = adversary_violations(star, AdversaryModel(Scope.F_LOCAL, 1, frozenset({1, 2})))
    assert msgs and "F-local" in msgs[0]


def test_scenario_validation():
    g = complete_graph(4, [0, 1, 0, 1])
    with pytest.raises(ScenarioError, match="one color"):
        simulate_outcome(Scenario(g, None, AdversaryModel(Scope.F_TOTAL, 2, frozenset({0, 1}))))
    with pytest.raises(ScenarioError, match="horizon"):
        run_simulation(Scenario(g, T=0))
    with pytest.raises(ScenarioError, match="alpha"):
        run_simulation(Scenario(g, weights=WeightRule(alpha=0.9)))
    run_simulation(Scenario(g, weights=WeightRule(alpha=0.2), T=3))


def test_necessity_witness_components():
    g = disjoint_union(complete_graph(3), complete_graph(3))
    sc = necessity_witness(g, 1)
    assert not sc.adversary.nodes
    tr = run_simulation(sc.with_(T=100))
    assert (tr.spread == 1.0).all()


def test_necessity_witness_cycle():
    sc = necessity_witness(cycle_graph(6), 1, T=10_000, eps=1e-3)
    assert sc is not None and len(sc.adversary.nodes) <= 1
    tr = run_simulation(sc)
    assert not check_agreement(tr, 1e-3)
    assert (tr.spread >= 1.0 - 1e-12).all() and check_safety(tr)


def test_necessity_witness_none_when_robust():
    assert necessity_witness(complete_graph(5, [0, 1, 2, 3, 4]), 3) is None
    assert necessity_witness(complete_graph(7), 2, Protocol.WMSR) is None


def test_outcome_matches_trace():
    rng = random.Random(15)
    for _ in range(50):
        sc = _random_scenario(rng)
        tr = run_simulation(sc)
        out = simulate_outcome(sc, early_stop=False)
        np.testing.assert_array_equal(out.final, tr.states[-1])
        assert out.final_spread == pytest.approx(tr.spread[-1], abs=0)
        assert out.safe == check_safety(tr)


def test_scenario_roundtrip(tmp_path):
    g = complete_graph(5, [0, 0, 1, 1, 2])
    sc = Scenario(g, np.linspace(0, 1, 5), AdversaryModel(Scope.F_LOCAL, 2, frozenset({0, 1}),
                                                         Ramp({0: 0.5, 1: -0.5})),
                  Protocol.WMSR, WeightRule(), 30, 1e-4, 9)
    save_scenario(sc, tmp_path / "s.json")
    back = load_scenario(tmp_path / "s.json")
    assert run_simulation(back).states.tobytes() == run_simulation(sc).states.tobytes()


def test_scenario_graph_by_path(tmp_path):
    from rcpc.graph import save_graph
    save_graph(cycle_graph(4), tmp_path / "c4.json")
    sc = scenario_from_dict({"graph": "c4.json", "T": 5}, tmp_path)
    assert sc.graph == cycle_graph(4)
    with pytest.raises(ScenarioError, match="strategy"):
        scenario_from_dict({"graph": "c4.json", "adversary": {"strategy": {"kind": "x"}}}, tmp_path)
    with pytest.raises(ScenarioError, match="graph"):
        scenario_from_dict({}, tmp_path)


def test_trace_csv(tmp_path):
    sc = Scenario(complete_graph(4, [0, 0, 1, 1]), None,
                  AdversaryModel(Scope.F_TOTAL, 1, frozenset({2}), Constant({2: 0.25})), T=10)
    tr = run_simulation(sc)
    side = write_trace_csv(tr, tmp_path / "t.csv")
    head = (tmp_path / "t.csv").read_text().splitlines()[0]
    assert head == "t,node_0,node_1,node_2,node_3"
    assert json.loads(side.read_text())["adversaries"] == [2]
    back = read_trace_csv(tmp_path / "t.csv")
    np.testing.assert_allclose(back.states, tr.states, rtol=1e-11)
    assert back.adversaries == [2]


def test_same_color_subsets():
    g = complete_graph(5, [0, 0, 0, 1, 1])
    subsets = list(same_color_subsets(g, 2))
    assert len(subsets) == 3 + 3 + 2 + 1
    assert all(len({g.colors[v] for v in s}) == 1 for s in subsets)
