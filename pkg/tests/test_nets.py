"""Net model: firing semantics, runs, validation, measures."""

import itertools

import pytest

from wfsound import (
    ConsumesFromFinal,
    NetError,
    NotEnabled,
    NotEnabledAt,
    NotOnPath,
    Overflow,
    PetriNet,
    ProducesIntoInitial,
    ValidationError,
    WorkflowNet,
    random_workflow,
    validate_workflow,
)
from wfsound.nets import MAX_TOKENS, run_support


def test_construction_rejects_duplicates_and_unknowns():
    with pytest.raises(NetError):
        PetriNet(["a", "a"], [])
    with pytest.raises(NetError):
        PetriNet(["a"], [("t", {"b": 1}, {})])
    with pytest.raises(NetError):
        PetriNet(["a"], [("a", {}, {"a": 1})])  # shared name
    with pytest.raises(NetError):
        PetriNet(["a"], [("t", {"a": 0}, {})])  # zero weight


def test_fire_examples(fig1):
    middle = fig1["middle"].net
    assert middle.marking_dict(middle.fire(middle.marking({"i": 1}), "t1")) == {"q1": 1}
    with pytest.raises(NotEnabled) as err:
        middle.fire(middle.marking({"q1": 1}), "t4")
    assert err.value.transition == "t4"
    assert err.value.place == "q2"
    out = middle.fire(middle.marking({"q1": 1, "q2": 1}), "t4")
    assert middle.marking_dict(out) == {"o": 2}


def test_z_fire_examples(fig1):
    middle = fig1["middle"].net
    out = middle.z_fire(middle.marking({"q1": 1}), "t4")
    assert middle.marking_dict(out) == {"q2": -1, "o": 2}
    # identity effect
    loop = PetriNet(["a"], [("t", {"a": 1}, {"a": 1})])
    m = loop.marking({"a": 1})
    assert loop.z_fire(m, "t") == m
    assert middle.marking_dict(middle.z_fire(middle.marking({"i": 1}), "t1")) == {"q1": 1}


def test_apply_run_examples(fig1):
    right = fig1["right"].net
    final, trace = right.apply_run(right.marking({"i": 2}), ["u1", "u2", "u4"])
    assert right.marking_dict(final) == {"r2": 2, "o": 1}
    assert right.enabled_transitions(final) == []
    assert len(trace) == 4

    middle = fig1["middle"].net
    m = middle.marking({"i": 1})
    assert middle.apply_run(m, []) == (m, [m])
    with pytest.raises(NotEnabledAt) as err:
        middle.apply_run(m, ["t1", "t4"], semantics="N")
    assert err.value.index == 1 and err.value.transition == "t4"
    final, _ = middle.apply_run(m, ["t1", "t4"], semantics="Z")
    assert middle.marking_dict(final) == {"q2": -1, "o": 2}


def test_fire_agrees_with_z_fire_when_enabled(fig1):
    for wf in fig1.values():
        net = wf.net
        for k in (1, 2):
            m = wf.initial_marking(k)
            for t in net.transitions:
                if net.enabled(m, t):
                    fired = net.fire(m, t)
                    assert fired == net.z_fire(m, t)
                    assert all(v >= 0 for v in fired)


def test_z_semantics_permutation_invariance(fig1):
    net = fig1["right"].net
    m = net.marking({"i": 2})
    run = ["u1", "u2", "u4", "u1"]
    results = set()
    for perm in itertools.permutations(run):
        final, _ = net.apply_run(m, list(perm), semantics="Z")
        results.add(final)
    assert len(results) == 1


def test_overflow_detected():
    net = PetriNet(["a"], [("t", {}, {"a": 1})])
    near = (MAX_TOKENS,)
    with pytest.raises(Overflow):
        net.fire(near, "t")
    with pytest.raises(Overflow):
        net.marking({"a": MAX_TOKENS + 1})


def test_run_support():
    assert run_support(["a", "b", "a"]) == frozenset({"a", "b"})


def test_validate_accepts_fig1(fig1):
    for wf in fig1.values():
        again = validate_workflow(wf.net, wf.initial, wf.final)
        assert again.net == wf.net


def test_validate_rejects_each_mutation(fig1):
    middle = fig1["middle"].net
    # isolated place
    iso = PetriNet(
        list(middle.places) + ["x"],
        [(t, middle.pre_dict(t), middle.post_dict(t)) for t in middle.transitions],
    )
    with pytest.raises(NotOnPath) as err:
        validate_workflow(iso, "i", "o")
    assert err.value.node == "x"
    # producing into the initial place
    bad = PetriNet(
        middle.places,
        [(t, middle.pre_dict(t), middle.post_dict(t)) for t in middle.transitions]
        + [("tb", {"q1": 1}, {"i": 1})],
    )
    with pytest.raises(ProducesIntoInitial):
        validate_workflow(bad, "i", "o")
    # consuming from the final place
    bad2 = PetriNet(
        middle.places,
        [(t, middle.pre_dict(t), middle.post_dict(t)) for t in middle.transitions]
        + [("tb", {"o": 1}, {"q1": 1})],
    )
    with pytest.raises(ConsumesFromFinal):
        validate_workflow(bad2, "i", "o")
    # transition off every path
    off = PetriNet(
        list(middle.places) + ["x", "y"],
        [(t, middle.pre_dict(t), middle.post_dict(t)) for t in middle.transitions]
        + [("tx", {"x": 1}, {"y": 1})],
    )
    with pytest.raises(NotOnPath):
        validate_workflow(off, "i", "o")


def test_validate_designation_errors(fig1):
    net = fig1["middle"].net
    with pytest.raises(ValidationError):
        validate_workflow(net, "i", "i")
    with pytest.raises(ValidationError):
        validate_workflow(net, "nope", "o")


def test_workflow_helpers(fig1):
    wf = fig1["middle"]
    assert wf.net.marking_dict(wf.initial_marking(3)) == {"i": 3}
    assert wf.net.marking_dict(wf.final_marking(2)) == {"o": 2}
    assert wf.initial_marking(0) == (0, 0, 0, 0)
    assert isinstance(wf, WorkflowNet)


def test_metrics(fig1):
    middle = fig1["middle"].net
    metrics = middle.metrics()
    assert metrics.abs_value == 8
    assert metrics.max_arc_weight == 2
    assert metrics.norm == 3
    assert metrics.size > 0
    empty = PetriNet([], [])
    assert empty.metrics().norm == 1
    assert empty.metrics().abs_value == 0


def test_nets_are_immutable_and_hashable(fig1):
    net = fig1["left"].net
    with pytest.raises(AttributeError):
        net.places = ()
    assert hash(net) == hash(validate_workflow(net, "i", "o").net)


def test_random_nets_roundtrip_semantics():
    # firing from the initial marking never goes negative
    for seed in range(20):
        wf = random_workflow(seed)
        net = wf.net
        m = wf.initial_marking(2)
        for t in net.transitions:
            if net.enabled(m, t):
                assert all(v >= 0 for v in net.fire(m, t))
