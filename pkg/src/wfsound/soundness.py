"""Soundness decision procedures and the sound-numbers characterization.

The 1-soundness check reduces to boundedness plus cyclicity of the
short-circuit net; k-soundness goes through the scale construction; the
generalised and structural checks first prune redundant places, then
combine exact cone/ILP reasoning with capped exploration.  Verdicts carry
replayable certificates and a ``complete`` flag that records whether the
search was truncated below the (astronomically large) theoretical bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bounds import bound_generalised_K, bound_structural_K, bound_z_norm_cap
from .explore import (
    DEFAULT_NODE_CAP,
    CapExceeded,
    ExploreCaps,
    backward_reachable,
    build_reach_graph,
    decide_boundedness,
    quasi_liveness,
)
from .ilp import build_ilp_s, feasible_rational, homogeneous_witness
from .nets import PetriNet, WorkflowNet

DEFAULT_K_MAX = 64


@dataclass
class Verdict:
    """Decision result with certificate.

    ``holds`` is True/False/None (unknown).  ``certificate`` is present on
    failure: a witness run, a counterexample marking, or a reason tag.
    ``complete`` is False when a cap or a non-exact bound truncated the
    search, i.e. the verdict covers only the checked range.
    """

    prop: str
    holds: bool | None
    certificate: dict | None = None
    complete: bool = True
    params: dict = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    quasi_live: dict | None = None

    @property
    def holds_str(self) -> str:
        return {True: "true", False: "false", None: "unknown"}[self.holds]


@dataclass
class RemovalReport:
    """Result of pruning redundant places.

    ``disconnected`` flags that the final place itself was redundant; the
    pruned net then admits no sound budget at all.
    """

    wf: WorkflowNet
    removed_places: tuple
    removed_transitions: tuple
    disconnected: bool


@dataclass
class SoundNums:
    """The set of sound budgets, in its arithmetic-progression shape.

    The sound numbers are exactly ``{i * p : 1 <= i < k_limit}``; ``p == 0``
    means none were found (then ``k_limit == 0``), and ``k_limit is None``
    means no unsound multiple was found (proven infinite only when
    ``complete``).
    """

    p: int
    k_limit: int | None
    complete: bool
    params: dict = field(default_factory=dict)

    def sound_set_upto(self, limit: int) -> set:
        if self.p == 0:
            return set()
        out = set()
        i = 1
        while i * self.p <= limit and (self.k_limit is None or i < self.k_limit):
            out.add(i * self.p)
            i += 1
        return out


def nonredundant_saturation(wf: WorkflowNet) -> set:
    """Places markable from some initial budget: the least fixpoint of
    firing any transition whose whole pre-support is already markable."""
    return {wf.net.places[p] for p in _saturate(wf)[0]}


def _saturate(wf: WorkflowNet):
    """Index set of nonredundant places plus the transition firing order
    (with the places each one newly contributed)."""
    net = wf.net
    marked = {wf.initial_index}
    order = []
    used = [False] * len(net.transitions)
    changed = True
    while changed:
        changed = False
        for ti in range(len(net.transitions)):
            if used[ti]:
                continue
            if all(p in marked for p, _ in net.pre[ti]):
                used[ti] = True
                new = [p for p, _ in net.post[ti] if p not in marked]
                marked.update(new)
                order.append((ti, new))
                changed = True
    return marked, order


def covering_run(wf: WorkflowNet, place: str):
    """A concrete ``(budget, run)`` marking ``place``, built by the
    saturation induction: each newly needed transition is preceded by
    enough repetitions of the previous run to guarantee its input places.

    Raises ValueError for redundant places.  The budget stays below
    ``(W + 2) ^ |T|``.
    """
    net = wf.net
    pi = net.place_index[place]
    if pi == wf.initial_index:
        return 1, []
    marked, order = _saturate(wf)
    if pi not in marked:
        raise ValueError(f"place {place!r} is redundant")
    w = net.max_arc_weight()
    k = 0
    run = []
    have = {wf.initial_index}
    for ti, new in order:
        if not run:
            k = w
            run = [net.transitions[ti]]
        else:
            k = (k + 1) * (w + 1)
            run = run * (w + 1) + [net.transitions[ti]]
        have.update(new)
        if pi in have:
            return k, run
    raise AssertionError("saturation order did not cover a markable place")


def remove_redundant(wf: WorkflowNet) -> RemovalReport:
    """Drop every redundant place and every transition consuming from one.

    Preserves k-soundness for every k.  The final place is kept even when
    redundant so downstream code can still reference it, but the report is
    then flagged ``disconnected`` and no budget is sound.
    """
    net = wf.net
    marked, _ = _saturate(wf)
    disconnected = wf.final_index not in marked
    keep = set(marked) | {wf.final_index}
    if len(keep) == len(net.places):
        return RemovalReport(wf, (), (), disconnected)
    kept_places = [p for i, p in enumerate(net.places) if i in keep]
    removed_places = tuple(p for i, p in enumerate(net.places) if i not in keep)
    kept_transitions = []
    removed_transitions = []
    for ti, t in enumerate(net.transitions):
        if all(p in marked for p, _ in net.pre[ti]):
            pre = {net.places[p]: w for p, w in net.pre[ti]}
            post = {
                net.places[p]: w for p, w in net.post[ti] if p in keep
            }
            kept_transitions.append((t, pre, post))
        else:
            removed_transitions.append(t)
    pruned = PetriNet(kept_places, kept_transitions)
    return RemovalReport(
        WorkflowNet.unchecked(pruned, wf.initial, wf.final),
        removed_places,
        tuple(removed_transitions),
        disconnected,
    )


def _fresh(base: str, used) -> str:
    name = base
    while name in used:
        name += "'"
    return name


def short_circuit(wf: WorkflowNet):
    """The net plus one transition moving a token from final back to
    initial; returns ``(net, name of the new transition)``."""
    net = wf.net
    used = set(net.places) | set(net.transitions)
    tsc = _fresh("t_sc", used)
    transitions = [
        (t, net.pre_dict(t), net.post_dict(t)) for t in net.transitions
    ]
    transitions.append((tsc, {wf.final: 1}, {wf.initial: 1}))
    return PetriNet(net.places, transitions), tsc


def scale_net(wf: WorkflowNet, k: int) -> WorkflowNet:
    """Net that is c-sound iff ``wf`` is ck-sound: fresh initial and final
    places exchanging one token against ``k`` of the old ones."""
    if k < 1:
        raise ValueError("k must be >= 1")
    net = wf.net
    used = set(net.places) | set(net.transitions)
    new_i = _fresh(wf.initial + "'", used)
    used.add(new_i)
    new_f = _fresh(wf.final + "'", used)
    used.add(new_f)
    t_in = _fresh("t_in", used)
    used.add(t_in)
    t_out = _fresh("t_out", used)
    places = list(net.places) + [new_i, new_f]
    transitions = [
        (t, net.pre_dict(t), net.post_dict(t)) for t in net.transitions
    ]
    transitions.append((t_in, {new_i: 1}, {wf.initial: k}))
    transitions.append((t_out, {wf.final: k}, {new_f: 1}))
    return WorkflowNet.unchecked(PetriNet(places, transitions), new_i, new_f)


def check_1_sound(wf: WorkflowNet, node_cap: int = DEFAULT_NODE_CAP) -> Verdict:
    """1-soundness via the short-circuit net: some transition must consume
    exactly one initial token, and the short-circuit net must be bounded
    and cyclic from one initial token."""
    verdict = Verdict("1-sound", None, params={"k": 1, "nodeCap": node_cap})
    net = wf.net
    ii = wf.initial_index
    if not any(items == ((ii, 1),) for items in net.pre):
        verdict.holds = False
        verdict.certificate = {"reason": "no transition consumes exactly one initial token"}
        return verdict
    sc, _ = short_circuit(wf)
    m0 = sc.marking({wf.initial: 1})
    bv = decide_boundedness(sc, m0, node_cap=node_cap)
    if bv.status == "exceeded":
        verdict.holds = None
        verdict.complete = False
        verdict.certificate = {"reason": "node cap exceeded"}
        return verdict
    if bv.status == "unbounded":
        end, _ = sc.apply_run(m0, bv.prefix_run + bv.pump_run)
        verdict.holds = False
        verdict.certificate = {
            "reason": "short-circuit net unbounded",
            "run": bv.prefix_run + bv.pump_run,
            "marking": sc.marking_dict(end),
        }
        return verdict
    graph = build_reach_graph(sc, m0, ExploreCaps(max_vertices=node_cap))
    verdict.stats["verticesExplored"] = len(graph.vertices)
    if not graph.complete:
        verdict.holds = None
        verdict.complete = False
        verdict.certificate = {"reason": "node cap exceeded"}
        return verdict
    back = backward_reachable(graph, m0)
    if len(back) != len(graph.vertices):
        bad = min(v for v in range(len(graph.vertices)) if v not in back)
        verdict.holds = False
        verdict.certificate = {
            "reason": "short-circuit net not cyclic",
            "run": graph.run_to(bad),
            "marking": sc.marking_dict(graph.vertices[bad]),
        }
        return verdict
    verdict.holds = True
    return verdict


def check_classical(wf: WorkflowNet, node_cap: int = DEFAULT_NODE_CAP) -> Verdict:
    """Classical soundness: the short-circuit net is quasi-live, bounded
    and cyclic from one initial token.  The per-transition quasi-liveness
    report is attached to the verdict."""
    verdict = Verdict("classical", None, params={"nodeCap": node_cap})
    sc, _ = short_circuit(wf)
    m0 = sc.marking({wf.initial: 1})
    try:
        qlive = quasi_liveness(sc, m0, node_cap=node_cap)
    except CapExceeded:
        verdict.holds = None
        verdict.complete = False
        verdict.certificate = {"reason": "node cap exceeded"}
        return verdict
    verdict.quasi_live = qlive
    dead = [t for t, ok in qlive.items() if not ok]
    if dead:
        verdict.holds = False
        verdict.certificate = {
            "reason": "not quasi-live",
            "transitions": dead,
        }
        return verdict
    bv = decide_boundedness(sc, m0, node_cap=node_cap)
    if bv.status == "exceeded":
        verdict.holds = None
        verdict.complete = False
        verdict.certificate = {"reason": "node cap exceeded"}
        return verdict
    if bv.status == "unbounded":
        end, _ = sc.apply_run(m0, bv.prefix_run + bv.pump_run)
        verdict.holds = False
        verdict.certificate = {
            "reason": "short-circuit net unbounded",
            "run": bv.prefix_run + bv.pump_run,
            "marking": sc.marking_dict(end),
        }
        return verdict
    graph = build_reach_graph(sc, m0, ExploreCaps(max_vertices=node_cap))
    verdict.stats["verticesExplored"] = len(graph.vertices)
    back = backward_reachable(graph, m0)
    if len(back) != len(graph.vertices):
        bad = min(v for v in range(len(graph.vertices)) if v not in back)
        verdict.holds = False
        verdict.certificate = {
            "reason": "short-circuit net not cyclic",
            "run": graph.run_to(bad),
            "marking": sc.marking_dict(graph.vertices[bad]),
        }
        return verdict
    verdict.holds = True
    return verdict


def check_k_sound(wf: WorkflowNet, k: int, node_cap: int = DEFAULT_NODE_CAP) -> Verdict:
    """k-soundness by checking 1-soundness of the scale construction."""
    if k < 1:
        raise ValueError("k must be >= 1")
    scaled = scale_net(wf, k)
    inner = check_1_sound(scaled, node_cap=node_cap)
    verdict = Verdict(
        f"{k}-sound",
        inner.holds,
        certificate=inner.certificate,
        complete=inner.complete,
        params={"k": k, "nodeCap": node_cap},
        stats=inner.stats,
    )
    return verdict


def oracle_k_sound(
    wf: WorkflowNet, k: int, caps: ExploreCaps = ExploreCaps()
) -> Verdict:
    """Brute-force oracle: build the full reachability graph from ``k``
    initial tokens and check every vertex can reach ``k`` final tokens."""
    if k < 0:
        raise ValueError("k must be >= 0")
    verdict = Verdict(
        f"{k}-sound (oracle)", None, params={"k": k, "maxVertices": caps.max_vertices}
    )
    if k == 0:
        verdict.holds = True  # the empty marking is its own target
        return verdict
    net = wf.net
    graph = build_reach_graph(net, wf.initial_marking(k), caps)
    verdict.stats["verticesExplored"] = len(graph.vertices)
    if not graph.complete:
        verdict.holds = None
        verdict.complete = False
        verdict.certificate = {"reason": f"cap hit: {graph.caps_hit}"}
        return verdict
    target = wf.final_marking(k)
    good = backward_reachable(graph, target)
    if len(good) == len(graph.vertices):
        verdict.holds = True
        return verdict
    bad = min(v for v in range(len(graph.vertices)) if v not in good)
    verdict.holds = False
    verdict.certificate = {
        "reason": "reachable marking cannot reach the final marking",
        "run": graph.run_to(bad),
        "marking": net.marking_dict(graph.vertices[bad]),
        "k": k,
    }
    return verdict


def check_generalised(
    wf: WorkflowNet,
    k_max: int = DEFAULT_K_MAX,
    constant: int = 1,
    node_cap: int = DEFAULT_NODE_CAP,
) -> Verdict:
    """Generalised soundness: k-soundness for every positive budget.

    Pipeline: prune redundant places; an upward-pumping transition
    multiset refutes immediately; then budgets are scanned in increasing
    order with a per-budget norm cutoff (markings above it also refute).
    A truncated scan that found no counterexample answers True with
    ``complete=False``.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    verdict = Verdict(
        "generalised",
        None,
        params={"kMax": k_max, "constant": constant, "nodeCap": node_cap},
    )
    report = remove_redundant(wf)
    if report.disconnected:
        verdict.holds = False
        verdict.certificate = {
            "reason": "final place unreachable after pruning redundant places",
            "k": 1,
        }
        return verdict
    rr = report.wf
    witness = homogeneous_witness(rr)
    if witness is not None:
        verdict.holds = False
        verdict.certificate = {
            "reason": "repeatable transition multiset pumps tokens",
            "pump": witness,
        }
        return verdict
    theory = bound_generalised_K(rr, constant).value
    limit = min(k_max, theory)
    explored = 0
    net = rr.net
    for k in range(1, limit + 1):
        cap = bound_z_norm_cap(rr, k).value
        caps = ExploreCaps(max_vertices=node_cap, max_norm=cap)
        graph = build_reach_graph(net, rr.initial_marking(k), caps)
        explored += len(graph.vertices)
        if graph.caps_hit == "norm":
            src, ti, child = graph.norm_offender
            run = graph.run_to(src) + [net.transitions[ti]]
            verdict.holds = False
            verdict.certificate = {
                "reason": "marking above the norm cutoff (net pumps tokens)",
                "run": run,
                "marking": net.marking_dict(child),
                "k": k,
                "normCap": cap,
            }
            verdict.stats["verticesExplored"] = explored
            return verdict
        if graph.caps_hit == "vertices":
            verdict.holds = None
            verdict.complete = False
            verdict.certificate = {"reason": "node cap exceeded", "k": k}
            verdict.stats["verticesExplored"] = explored
            return verdict
        good = backward_reachable(graph, rr.final_marking(k))
        if len(good) != len(graph.vertices):
            bad = min(v for v in range(len(graph.vertices)) if v not in good)
            verdict.holds = False
            verdict.certificate = {
                "reason": "reachable marking cannot reach the final marking",
                "run": graph.run_to(bad),
                "marking": net.marking_dict(graph.vertices[bad]),
                "k": k,
            }
            verdict.stats["verticesExplored"] = explored
            return verdict
    verdict.holds = True
    verdict.complete = limit >= theory
    verdict.stats["verticesExplored"] = explored
    return verdict


def check_structural(
    wf: WorkflowNet,
    k_max: int = DEFAULT_K_MAX,
    constant: int = 1,
    node_cap: int = DEFAULT_NODE_CAP,
) -> Verdict:
    """Structural soundness: k-soundness for some positive budget.

    The relaxed-reachability system is a necessary condition checked
    exactly over the rationals first; then budgets are scanned upward.
    If the scan runs out at ``k_max`` without success the answer is False
    with ``complete=False`` (no sound budget up to the checked range).
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    verdict = Verdict(
        "structural",
        None,
        params={"kMax": k_max, "constant": constant, "nodeCap": node_cap},
    )
    report = remove_redundant(wf)
    if report.disconnected:
        verdict.holds = False
        verdict.certificate = {
            "reason": "final place unreachable after pruning redundant places"
        }
        return verdict
    rr = report.wf
    if feasible_rational(build_ilp_s(rr)) is None:
        verdict.holds = False
        verdict.certificate = {
            "reason": "no transition multiset turns initial budgets into final ones"
        }
        return verdict
    theory = bound_structural_K(rr, constant).value
    limit = min(k_max, theory)
    unknown = False
    for k in range(1, limit + 1):
        inner = check_k_sound(rr, k, node_cap=node_cap)
        if inner.holds is True:
            verdict.holds = True
            verdict.params["smallestSoundK"] = k
            return verdict
        if inner.holds is None:
            unknown = True
    if unknown:
        verdict.holds = None
        verdict.complete = False
        verdict.certificate = {"reason": "some k-soundness checks hit caps"}
        return verdict
    verdict.holds = False
    verdict.complete = limit >= theory
    verdict.certificate = {"reason": f"no sound budget up to {limit}"}
    return verdict


def compute_sound_numbers(
    wf: WorkflowNet,
    k_max: int = DEFAULT_K_MAX,
    constant: int = 1,
    node_cap: int = DEFAULT_NODE_CAP,
) -> SoundNums:
    """The progression describing all sound budgets.

    First the smallest sound budget ``p`` is located by upward scan; then
    the scale construction is scanned for the smallest unsound multiple of
    ``p``.  Both scans stop at ``k_max``; ``complete`` records whether the
    theoretical bounds were actually reached.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    params = {"kMax": k_max, "constant": constant}
    report = remove_redundant(wf)
    if report.disconnected:
        return SoundNums(0, 0, True, params)
    rr = report.wf
    if feasible_rational(build_ilp_s(rr)) is None:
        return SoundNums(0, 0, True, params)
    theory_p = bound_structural_K(rr, constant).value
    limit_p = min(k_max, theory_p)
    p = None
    saw_unknown = False
    for k in range(1, limit_p + 1):
        inner = check_k_sound(rr, k, node_cap=node_cap)
        if inner.holds is True:
            p = k
            break
        if inner.holds is None:
            saw_unknown = True
    if p is None:
        return SoundNums(0, 0, limit_p >= theory_p and not saw_unknown, params)
    scaled = scale_net(rr, p)
    theory_c = bound_generalised_K(scaled, constant).value
    limit_c = min(k_max, theory_c)
    saw_unknown = False
    for c in range(1, limit_c + 1):
        inner = check_k_sound(scaled, c, node_cap=node_cap)
        if inner.holds is False:
            return SoundNums(p, c, True, params)
        if inner.holds is None:
            saw_unknown = True
    return SoundNums(p, None, limit_c >= theory_c and not saw_unknown, params)
