"""Example nets, hardness-reduction generators, random instances, and
net classification helpers (conservative, reversible).

The reductions return a :class:`ReductionInstance` carrying the output
net together with the embedding of the input and the construction
parameters, so tests can replay input runs inside the output.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .nets import NetError, PetriNet, WorkflowNet, validate_workflow


class NotConservative(NetError):
    pass


class NotReversible(NetError):
    pass


class SumMismatch(NetError):
    pass


class GenerationFailed(NetError):
    pass


@dataclass
class ReductionInstance:
    wf: WorkflowNet
    place_map: dict = field(default_factory=dict)
    transition_map: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)


def fig1_examples():
    """The three running example nets: ``(left, middle, right)``.

    Left never empties its middle place once marked; middle needs two
    tokens to terminate; right terminates from one token but deadlocks
    from two.
    """
    left = validate_workflow(
        PetriNet(
            ["i", "p1", "o"],
            [
                ("s1", {"i": 1}, {"p1": 1}),
                ("s2", {"p1": 2}, {"o": 1, "p1": 1}),
            ],
        ),
        "i",
        "o",
    )
    middle = validate_workflow(
        PetriNet(
            ["i", "q1", "q2", "o"],
            [
                ("t1", {"i": 1}, {"q1": 1}),
                ("t2", {"q1": 1}, {"q2": 1}),
                ("t3", {"q2": 1}, {"q1": 1}),
                ("t4", {"q1": 1, "q2": 1}, {"o": 2}),
            ],
        ),
        "i",
        "o",
    )
    right = validate_workflow(
        PetriNet(
            ["i", "r1", "r2", "r3", "o"],
            [
                ("u1", {"i": 1}, {"r1": 1, "r2": 1}),
                ("u2", {"i": 1}, {"r2": 1, "r3": 1}),
                ("u3", {"i": 1}, {"r1": 1, "r3": 1}),
                ("u4", {"r1": 1, "r3": 1}, {"o": 1}),
                ("u5", {"r1": 1, "r2": 1}, {"o": 1}),
                ("u6", {"r2": 1, "r3": 1}, {"o": 1}),
            ],
        ),
        "i",
        "o",
    )
    return left, middle, right


def is_conservative(net: PetriNet) -> bool:
    """Every transition consumes exactly as many tokens as it produces."""
    for ti in range(len(net.transitions)):
        if sum(w for _, w in net.pre[ti]) != sum(w for _, w in net.post[ti]):
            return False
    return True


def is_reversible(net: PetriNet):
    """Does every transition have an exact inverse?  Returns the pairing
    (first match in declaration order) alongside the answer."""
    pairing = {}
    for ti, t in enumerate(net.transitions):
        inverse = None
        for tj, u in enumerate(net.transitions):
            if net.pre[tj] == net.post[ti] and net.post[tj] == net.pre[ti]:
                inverse = u
                break
        if inverse is None:
            return False, None
        pairing[t] = inverse
    return True, pairing


def _fresh(base: str, used: set) -> str:
    name = base
    while name in used:
        name += "'"
    used.add(name)
    return name


def _as_marking_dict(net: PetriNet, m) -> dict:
    if isinstance(m, dict):
        return dict(m)
    return net.marking_dict(m)


def pspace_reduction(net: PetriNet, m, m_prime) -> ReductionInstance:
    """Workflow net that is generalised sound iff ``m`` reaches ``m_prime``
    in the conservative input net.

    Adds an initial place feeding a reset place ``r`` with ``c`` tokens per
    budget unit (``c`` the token count of ``m``), a loader ``r^c -> m``, an
    unloader ``m_prime -> o``, and one drain ``p -> r`` per original place.
    """
    if not is_conservative(net):
        raise NotConservative("the input net must preserve token counts")
    m = _as_marking_dict(net, m)
    m_prime = _as_marking_dict(net, m_prime)
    c = sum(m.values())
    if c != sum(m_prime.values()):
        raise SumMismatch("source and target markings must have equal token counts")
    if c < 1:
        raise ValueError("markings must carry at least one token")
    used = set(net.places) | set(net.transitions)
    p_i = _fresh("i", used)
    p_o = _fresh("o", used)
    p_r = _fresh("r", used)
    places = list(net.places) + [p_i, p_o, p_r]
    transitions = [
        (t, net.pre_dict(t), net.post_dict(t)) for t in net.transitions
    ]
    t_i = _fresh("t_i", used)
    t_m = _fresh("t_m", used)
    t_mp = _fresh("t_m'", used)
    transitions.append((t_i, {p_i: 1}, {p_r: c}))
    transitions.append((t_m, {p_r: c}, dict(m)))
    transitions.append((t_mp, dict(m_prime), {p_o: 1}))
    drains = {}
    for p in net.places:
        t_p = _fresh(f"t_{p}", used)
        drains[p] = t_p
        transitions.append((t_p, {p: 1}, {p_r: 1}))
    out = PetriNet(places, transitions)
    # The producing/consuming conditions hold by construction; the path
    # condition can fail for degenerate inputs (places unreachable from m),
    # which downstream checks handle through redundancy pruning.
    wf = WorkflowNet.unchecked(out, p_i, p_o)
    return ReductionInstance(
        wf,
        place_map={p: p for p in net.places},
        transition_map={t: t for t in net.transitions},
        params={
            "c": c,
            "m": m,
            "mPrime": m_prime,
            "initial": p_i,
            "final": p_o,
            "reset": p_r,
            "loader": t_m,
            "unloader": t_mp,
            "drains": drains,
        },
    )


def structural_hardness_transform(wf: WorkflowNet) -> WorkflowNet:
    """Add one transition folding two initial tokens into one final token.

    The result is structurally sound iff the input is 1-sound, and is
    k-unsound for every k >= 2.
    """
    net = wf.net
    used = set(net.places) | set(net.transitions)
    t_fold = _fresh("t_fold", used)
    transitions = [
        (t, net.pre_dict(t), net.post_dict(t)) for t in net.transitions
    ]
    transitions.append((t_fold, {wf.initial: 2}, {wf.final: 1}))
    return validate_workflow(
        PetriNet(net.places, transitions), wf.initial, wf.final
    )


@dataclass
class CountingGadget:
    """Reversible net with distinguished places start/control/finish/budget.

    One forward transition converts ``{start:1, control:1}`` into
    ``{finish:1, control:1, budget:count}`` and its inverse converts back;
    unary in ``count`` by design, it satisfies the five exchange properties
    the assembly relies on.
    """

    net: PetriNet
    count: int
    start: str = "s"
    control: str = "c"
    finish: str = "f"
    budget: str = "b"

    def m_start(self) -> tuple:
        return self.net.marking({self.start: 1, self.control: 1})

    def m_finish(self) -> tuple:
        return self.net.marking(
            {self.finish: 1, self.control: 1, self.budget: self.count}
        )


def naive_counting_gadget(count: int) -> CountingGadget:
    if count < 1:
        raise ValueError("count must be >= 1")
    net = PetriNet(
        ["s", "c", "f", "b"],
        [
            ("t_count", {"s": 1, "c": 1}, {"f": 1, "c": 1, "b": count}),
            ("t_count_inv", {"f": 1, "c": 1, "b": count}, {"s": 1, "c": 1}),
        ],
    )
    return CountingGadget(net, count)


def expspace_reduction(net: PetriNet, m, m_prime, c_n: int) -> ReductionInstance:
    """Workflow net that is 1-sound (and classically sound) iff ``m``
    reaches ``m_prime`` in the reversible input net.

    Every original place gets a budget twin holding ``c_n`` minus its
    token count; original transitions run only while an in-progress lock
    is held and mirror their effect on the twins.  Two counting-gadget
    copies (sharing the budget place ``b``) install and drain the budgets,
    and a simple branch keeps every original transition quasi-live.

    ``c_n`` must dominate the norm of some witness run for the forward
    direction of the equivalence to hold; :func:`suggest_cn` helps at toy
    scale.
    """
    reversible, _ = is_reversible(net)
    if not reversible:
        raise NotReversible("the input net must contain an inverse for every transition")
    if c_n < 1:
        raise ValueError("c_n must be >= 1")
    m = _as_marking_dict(net, m)
    m_prime = _as_marking_dict(net, m_prime)
    if max(m.values(), default=0) > c_n or max(m_prime.values(), default=0) > c_n:
        raise ValueError("c_n must dominate the source and target markings")

    used = set(net.places) | set(net.transitions)
    bar = {p: _fresh(p + "_bar", used) for p in net.places}
    p_i = _fresh("i", used)
    p_o = _fresh("o", used)
    p_start = _fresh("p_start", used)
    p_prog = _fresh("p_inProgress", used)
    p_cover = _fresh("p_cover", used)
    p_simple = _fresh("p_simple", used)
    p_fire = _fresh("p_canFire", used)
    g_s = _fresh("s", used)
    g_c = _fresh("c", used)
    g_f = _fresh("f", used)
    g_b = _fresh("b", used)
    h_s = _fresh("s_heart", used)
    h_c = _fresh("c_heart", used)
    h_f = _fresh("f_heart", used)

    places = (
        list(net.places)
        + [bar[p] for p in net.places]
        + [p_i, p_o, p_start, p_prog, p_cover, p_simple, p_fire]
        + [g_s, g_c, g_f, g_b, h_s, h_c, h_f]
    )
    weight = net.metrics().norm  # enough tokens to enable any single firing

    transitions = []
    # group 1: originals, gated by the lock, mirrored on the budget twins
    for t in net.transitions:
        pre = net.pre_dict(t)
        post = net.post_dict(t)
        new_pre = dict(pre)
        new_post = dict(post)
        for p in net.places:
            produced = post.get(p, 0)
            consumed = pre.get(p, 0)
            if produced:
                new_pre[bar[p]] = produced
            if consumed:
                new_post[bar[p]] = consumed
        new_pre[p_fire] = new_pre.get(p_fire, 0) + 1
        new_post[p_fire] = new_post.get(p_fire, 0) + 1
        transitions.append((t, new_pre, new_post))

    # groups 2 and 3: gadget copies whose budget-place effect is mirrored
    # onto every twin; the second copy shares the budget place
    def gadget_copy(suffix, s, c, f):
        gadget = naive_counting_gadget(c_n)
        rename = {"s": s, "c": c, "f": f, "b": g_b}
        out = []
        for t in gadget.net.transitions:
            pre = gadget.net.pre_dict(t)
            post = gadget.net.post_dict(t)
            new_pre = {rename[p]: w for p, w in pre.items()}
            new_post = {rename[p]: w for p, w in post.items()}
            b_in = pre.get("b", 0)
            b_out = post.get("b", 0)
            for p in net.places:
                if b_in:
                    new_pre[bar[p]] = b_in
                if b_out:
                    new_post[bar[p]] = b_out
            out.append((_fresh(t + suffix, used), new_pre, new_post))
        return out

    transitions.extend(gadget_copy("", g_s, g_c, g_f))
    transitions.extend(gadget_copy("_heart", h_s, h_c, h_f))

    # group 4: the ten control transitions
    t_hard = _fresh("t_hard", used)
    t_start = _fresh("t_start", used)
    t_m = _fresh("t_m", used)
    t_mp = _fresh("t_m'", used)
    t_mp_inv = _fresh("t_m'_inv", used)
    t_reach = _fresh("t_reach", used)
    t_reach_inv = _fresh("t_reach_inv", used)
    t_end = _fresh("t_end", used)
    t_simple = _fresh("t_simple", used)
    t_simple2 = _fresh("t_simple2", used)

    transitions.append((t_hard, {p_i: 1}, {g_s: 1, g_c: 1}))
    transitions.append((t_start, {g_f: 1, g_c: 1}, {p_start: 1}))
    pre_m = {p_start: 1}
    post_m = {p_prog: 1, p_fire: 1}
    for p, w in m.items():
        pre_m[bar[p]] = w
        post_m[p] = w
    transitions.append((t_m, pre_m, post_m))
    pre_mp = {p_prog: 1, p_fire: 1}
    post_mp = {p_cover: 1}
    for p, w in m_prime.items():
        pre_mp[p] = w
        post_mp[bar[p]] = w
    transitions.append((t_mp, pre_mp, post_mp))
    transitions.append((t_mp_inv, post_mp, pre_mp))
    transitions.append((t_reach, {p_cover: 1}, {h_f: 1, h_c: 1}))
    transitions.append((t_reach_inv, {h_f: 1, h_c: 1}, {p_cover: 1}))
    transitions.append((t_end, {h_s: 1, h_c: 1}, {p_o: 1}))
    pre_simple = {p_i: 1}
    post_simple = {p_simple: 1, p_fire: 1}
    pre_simple2 = {p_simple: 1, p_fire: 1}
    post_simple2 = {p_o: 1}
    for p in net.places:
        post_simple[p] = weight
        post_simple[bar[p]] = weight
        pre_simple2[p] = weight
        pre_simple2[bar[p]] = weight
    transitions.append((t_simple, pre_simple, post_simple))
    transitions.append((t_simple2, pre_simple2, post_simple2))

    wf = validate_workflow(PetriNet(places, transitions), p_i, p_o)
    return ReductionInstance(
        wf,
        place_map={p: p for p in net.places},
        transition_map={t: t for t in net.transitions},
        params={
            "cN": c_n,
            "m": m,
            "mPrime": m_prime,
            "bars": bar,
            "budget": g_b,
            "initial": p_i,
            "final": p_o,
            "hard": t_hard,
            "simple": t_simple,
        },
    )


def suggest_cn(net: PetriNet, m, m_prime, cap: int = 10_000, max_norm: int | None = None):
    """Budget bound sufficient for the witness run found by explicit search.

    Inside the assembly a firing needs the tokens present plus the tokens
    it produces to fit into the budget, so the bound is the peak of
    ``marking[p] + produced[p]`` along the run (and the run's endpoints).
    Returns None when the target is unreachable within the search caps
    (any bound then preserves the equivalence).
    """
    from .explore import ExploreCaps, build_reach_graph

    m = tuple(m) if not isinstance(m, dict) else net.marking(m)
    target = tuple(m_prime) if not isinstance(m_prime, dict) else net.marking(m_prime)
    graph = build_reach_graph(
        net, m, ExploreCaps(max_vertices=cap, max_norm=max_norm)
    )
    if graph.caps_hit == "vertices":
        raise GenerationFailed("state space too large to suggest a bound")
    for v, marking in enumerate(graph.vertices):
        if marking == target:
            run = graph.run_to(v)
            _, trace = net.apply_run(m, run)
            peak = max(max(step, default=0) for step in trace)
            for before, t in zip(trace, run):
                ti = net.transition_index[t]
                for p, produced in net.post[ti]:
                    peak = max(peak, before[p] + produced)
            return peak
    return None


def random_workflow(
    seed: int,
    places: int = 4,
    transitions: int = 4,
    max_weight: int = 2,
    max_retries: int = 500,
) -> WorkflowNet:
    """Deterministic random workflow net: resamples until the result
    passes validation, so every output satisfies all three conditions."""
    if places < 2 or transitions < 1 or max_weight < 1:
        raise ValueError("need places >= 2, transitions >= 1, max_weight >= 1")
    rng = random.Random(seed)
    names = ["i"] + [f"p{j}" for j in range(1, places - 1)] + ["o"]
    sources = names[:-1]  # never consume from the final place
    sinks = names[1:]  # never produce into the initial place
    for _ in range(max_retries):
        spec = []
        for j in range(transitions):
            pre_size = rng.randint(1, min(2, len(sources)))
            post_size = rng.randint(1, min(2, len(sinks)))
            pre = {
                p: rng.randint(1, max_weight)
                for p in rng.sample(sources, pre_size)
            }
            post = {
                p: rng.randint(1, max_weight)
                for p in rng.sample(sinks, post_size)
            }
            spec.append((f"t{j + 1}", pre, post))
        try:
            return validate_workflow(PetriNet(names, spec), "i", "o")
        except NetError:
            continue
    raise GenerationFailed(f"no valid net after {max_retries} attempts (seed {seed})")
