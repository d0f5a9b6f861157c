"""Exploration engine: graphs, boundedness, cyclicity, coverability."""

import pytest

from wfsound import (
    CapExceeded,
    ExploreCaps,
    IncompleteGraph,
    NotBounded,
    PetriNet,
    backward_reachable,
    build_reach_graph,
    decide_boundedness,
    decide_cyclicity,
    karp_miller,
    quasi_liveness,
    random_workflow,
    short_circuit,
)

PUMP = PetriNet(["a"], [("t", {"a": 1}, {"a": 2})])


def test_right_net_graph(fig1):
    right = fig1["right"]
    graph = build_reach_graph(right.net, right.initial_marking(1))
    assert len(graph.vertices) == 5
    assert len(graph.edges) == 6
    assert graph.complete


def test_short_circuit_right_graph(fig1):
    sc, tsc = short_circuit(fig1["right"])
    graph = build_reach_graph(sc, sc.marking({"i": 1}))
    assert len(graph.vertices) == 5
    assert len(graph.edges) == 7
    names = {sc.transitions[ti] for _, ti, _ in graph.edges}
    assert tsc in names


def test_middle_net_graph(fig1):
    middle = fig1["middle"]
    graph = build_reach_graph(middle.net, middle.initial_marking(1))
    markings = [middle.net.marking_dict(v) for v in graph.vertices]
    assert markings == [{"i": 1}, {"q1": 1}, {"q2": 1}]


def test_graph_determinism(fig1):
    wf = fig1["right"]
    a = build_reach_graph(wf.net, wf.initial_marking(2))
    b = build_reach_graph(wf.net, wf.initial_marking(2))
    assert a.vertices == b.vertices and a.edges == b.edges


def test_vertex_cap_reported(fig1):
    wf = fig1["right"]
    graph = build_reach_graph(wf.net, wf.initial_marking(2), ExploreCaps(max_vertices=3))
    assert graph.caps_hit == "vertices"
    assert not graph.complete


def test_norm_cap_reported():
    graph = build_reach_graph(PUMP, (1,), ExploreCaps(max_norm=4))
    assert graph.caps_hit == "norm"
    src, ti, marking = graph.norm_offender
    assert marking == (5,)
    # the offending marking replays from the root
    run = graph.run_to(src) + [PUMP.transitions[ti]]
    final, _ = PUMP.apply_run((1,), run)
    assert final == (5,)


def test_edge_list_export(fig1):
    wf = fig1["middle"]
    graph = build_reach_graph(wf.net, wf.initial_marking(1))
    lines = graph.to_edge_list().splitlines()
    assert lines[0].split() == ["0", "t1", "1"]


def test_boundedness_bounded_cases(fig1):
    sc, _ = short_circuit(fig1["right"])
    verdict = decide_boundedness(sc, sc.marking({"i": 1}))
    assert verdict.status == "bounded"
    assert verdict.bound == (1, 1, 1, 1, 1)
    middle = fig1["middle"]
    assert decide_boundedness(middle.net, middle.initial_marking(1)).bounded


def test_boundedness_unbounded_with_witness():
    verdict = decide_boundedness(PUMP, (1,))
    assert verdict.status == "unbounded"
    m1, _ = PUMP.apply_run((1,), verdict.prefix_run)
    m2, _ = PUMP.apply_run(m1, verdict.pump_run)
    assert all(a <= b for a, b in zip(m1, m2)) and m1 != m2


def test_boundedness_witness_replays_on_random_nets():
    found = 0
    for seed in range(40):
        wf = random_workflow(seed, places=4, transitions=4, max_weight=2)
        verdict = decide_boundedness(wf.net, wf.initial_marking(2))
        if verdict.status != "unbounded":
            continue
        found += 1
        m1, _ = wf.net.apply_run(wf.initial_marking(2), verdict.prefix_run)
        m2, _ = wf.net.apply_run(m1, verdict.pump_run)
        assert all(a <= b for a, b in zip(m1, m2)) and m1 != m2
    assert found > 0  # the corpus does contain unbounded instances


def test_bound_vector_dominates_complete_graphs():
    for seed in range(30):
        wf = random_workflow(seed, places=4, transitions=4, max_weight=2)
        graph = build_reach_graph(
            wf.net, wf.initial_marking(2), ExploreCaps(max_vertices=5000)
        )
        if not graph.complete:
            continue
        verdict = decide_boundedness(wf.net, wf.initial_marking(2))
        assert verdict.bounded
        for vertex in graph.vertices:
            assert all(v <= b for v, b in zip(vertex, verdict.bound))


def test_boundedness_cap():
    verdict = decide_boundedness(PUMP, (1,), node_cap=1)
    assert verdict.status in ("unbounded", "exceeded")


def test_cyclicity(fig1):
    sc, _ = short_circuit(fig1["right"])
    assert decide_cyclicity(sc, sc.marking({"i": 1})) == (True, None)
    scm, _ = short_circuit(fig1["middle"])
    cyclic, counter = decide_cyclicity(scm, scm.marking({"i": 1}))
    assert not cyclic
    assert scm.marking_dict(counter) == {"q1": 1}
    # single-vertex graph: no enabled transition
    lone = PetriNet(["a", "b"], [("t", {"a": 2}, {"b": 1})])
    assert decide_cyclicity(lone, lone.marking({"a": 1})) == (True, None)


def test_cyclicity_requires_bounded():
    with pytest.raises(NotBounded):
        decide_cyclicity(PUMP, (1,), node_cap=50)


def test_cyclicity_consistent_with_backward_reachability():
    for seed in range(25):
        wf = random_workflow(seed, places=4, transitions=3, max_weight=2)
        graph = build_reach_graph(
            wf.net, wf.initial_marking(1), ExploreCaps(max_vertices=5000)
        )
        if not graph.complete:
            continue
        back = backward_reachable(graph, wf.initial_marking(1))
        cyclic, _ = decide_cyclicity(wf.net, wf.initial_marking(1))
        assert cyclic == (len(back) == len(graph.vertices))


def test_quasi_liveness_examples(fig1):
    middle = fig1["middle"]
    verdict = quasi_liveness(middle.net, middle.initial_marking(1))
    assert verdict == {"t1": True, "t2": True, "t3": True, "t4": False}
    right = fig1["right"]
    assert all(quasi_liveness(right.net, right.initial_marking(1)).values())
    # nothing enabled: every transition with a nonempty pre set is dead
    lone = PetriNet(["a", "b"], [("t", {"a": 2}, {"b": 1}), ("free", {}, {"b": 1})])
    verdict = quasi_liveness(lone, lone.marking({"a": 1}), node_cap=100)
    assert verdict == {"t": False, "free": True}


def test_quasi_liveness_on_unbounded_net():
    net = PetriNet(
        ["a", "b", "c"],
        [("t", {"a": 1}, {"a": 2}), ("u", {"a": 3}, {"b": 1}), ("dead", {"c": 1}, {"b": 1})],
    )
    verdict = quasi_liveness(net, net.marking({"a": 1}))
    assert verdict["t"] and verdict["u"]
    assert not verdict["dead"]  # nothing ever marks c


def test_quasi_liveness_cap():
    with pytest.raises(CapExceeded):
        quasi_liveness(PUMP, (1,), node_cap=2)


def test_km_agrees_with_explicit_graph_when_bounded():
    for seed in range(30):
        wf = random_workflow(seed, places=4, transitions=4, max_weight=2)
        graph = build_reach_graph(
            wf.net, wf.initial_marking(2), ExploreCaps(max_vertices=4000)
        )
        if not graph.complete:
            continue
        km = quasi_liveness(wf.net, wf.initial_marking(2))
        explicit = {
            t: any(wf.net.enabled(m, t) for m in graph.vertices)
            for t in wf.net.transitions
        }
        assert km == explicit


def test_km_tree_on_bounded_net_matches_graph(fig1):
    middle = fig1["middle"]
    tree = karp_miller(middle.net, middle.initial_marking(1))
    assert not tree.has_omega
    assert len(tree.markings) == 3


def test_backward_reachable(fig1):
    right = fig1["right"]
    graph = build_reach_graph(right.net, right.initial_marking(1))
    assert backward_reachable(graph, right.final_marking(1)) == {0, 1, 2, 3, 4}
    middle = fig1["middle"]
    graph2 = build_reach_graph(middle.net, middle.initial_marking(1))
    assert backward_reachable(graph2, middle.final_marking(1)) == set()
    # a predicate matching the root contains at least the root
    assert 0 in backward_reachable(graph2, lambda m: m == graph2.vertices[0])


def test_backward_reachable_requires_complete(fig1):
    wf = fig1["right"]
    graph = build_reach_graph(wf.net, wf.initial_marking(2), ExploreCaps(max_vertices=3))
    with pytest.raises(IncompleteGraph):
        backward_reachable(graph, wf.final_marking(2))
