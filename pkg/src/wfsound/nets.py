"""Petri net and workflow net data model with both firing semantics.

Place and transition names are interned to dense indices in declaration
order, and every iteration in the package follows that order, so all
downstream results are deterministic.  Markings are plain tuples of ints
indexed like ``net.places``; helper methods convert to and from the
``{name: count}`` notation used in inputs and reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Marking entries live in a checked 64-bit budget.  Explorations are capped
# far below this; bound formulas (module bounds) use plain big ints instead.
MAX_TOKENS = 2**63 - 1


class NetError(Exception):
    """Base class for net construction and semantics errors."""


class Overflow(NetError):
    """A marking entry left the checked 64-bit range."""


class NotEnabled(NetError):
    def __init__(self, transition: str, place: str):
        super().__init__(
            f"transition {transition!r} is not enabled: not enough tokens in {place!r}"
        )
        self.transition = transition
        self.place = place


class NotEnabledAt(NetError):
    def __init__(self, index: int, transition: str, place: str):
        super().__init__(
            f"run disabled at step {index}: transition {transition!r} "
            f"needs more tokens in {place!r}"
        )
        self.index = index
        self.transition = transition
        self.place = place


class ValidationError(NetError):
    """The net violates one of the workflow net conditions."""


class ProducesIntoInitial(ValidationError):
    def __init__(self, transition: str):
        super().__init__(f"transition {transition!r} produces tokens in the initial place")
        self.transition = transition


class ConsumesFromFinal(ValidationError):
    def __init__(self, transition: str):
        super().__init__(f"transition {transition!r} consumes tokens from the final place")
        self.transition = transition


class NotOnPath(ValidationError):
    def __init__(self, node: str):
        super().__init__(f"node {node!r} is not on a path from the initial to the final place")
        self.node = node


@dataclass(frozen=True)
class NetMetrics:
    """Size measures of a net: ``abs_value`` is places plus transitions,
    ``norm`` is the largest arc weight plus one, ``size`` combines both,
    and ``max_arc_weight`` is the largest single arc weight."""

    abs_value: int
    norm: int
    size: float
    max_arc_weight: int


def _as_items(bag, place_index, what):
    if bag is None:
        return ()
    items = []
    for name, weight in bag.items():
        if name not in place_index:
            raise NetError(f"{what} refers to unknown place {name!r}")
        if not isinstance(weight, int) or weight <= 0:
            raise NetError(f"{what} has non-positive weight {weight!r} on {name!r}")
        items.append((place_index[name], weight))
    items.sort()
    return tuple(items)


class PetriNet:
    """An immutable Petri net.

    ``transitions`` is given as ``(name, pre, post)`` triples where ``pre``
    and ``post`` map place names to positive weights (absent means 0).
    """

    __slots__ = (
        "places",
        "transitions",
        "pre",
        "post",
        "place_index",
        "transition_index",
        "_effect",
        "_hash",
    )

    def __init__(self, places, transitions):
        places = tuple(places)
        if len(set(places)) != len(places):
            raise NetError("duplicate place name")
        place_index = {p: i for i, p in enumerate(places)}
        names = []
        pre = []
        post = []
        for name, tpre, tpost in transitions:
            if name in place_index:
                raise NetError(f"name {name!r} used for both a place and a transition")
            names.append(name)
            pre.append(_as_items(tpre, place_index, f"pre({name})"))
            post.append(_as_items(tpost, place_index, f"post({name})"))
        if len(set(names)) != len(names):
            raise NetError("duplicate transition name")
        object.__setattr__(self, "places", places)
        object.__setattr__(self, "transitions", tuple(names))
        object.__setattr__(self, "pre", tuple(pre))
        object.__setattr__(self, "post", tuple(post))
        object.__setattr__(self, "place_index", place_index)
        object.__setattr__(
            self, "transition_index", {t: i for i, t in enumerate(names)}
        )
        effects = []
        for items_pre, items_post in zip(pre, post):
            delta = [0] * len(places)
            for p, w in items_pre:
                delta[p] -= w
            for p, w in items_post:
                delta[p] += w
            effects.append(tuple(delta))
        object.__setattr__(self, "_effect", tuple(effects))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("PetriNet is immutable")

    # -- identity ---------------------------------------------------------

    def _key(self):
        return (self.places, self.transitions, self.pre, self.post)

    def __eq__(self, other):
        return isinstance(other, PetriNet) and self._key() == other._key()

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self._key())
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"PetriNet(|P|={len(self.places)}, |T|={len(self.transitions)})"

    # -- bags and markings -------------------------------------------------

    def pre_dict(self, t: str) -> dict:
        ti = self.transition_index[t]
        return {self.places[p]: w for p, w in self.pre[ti]}

    def post_dict(self, t: str) -> dict:
        ti = self.transition_index[t]
        return {self.places[p]: w for p, w in self.post[ti]}

    def effect(self, t: str) -> tuple:
        """Effect vector of ``t``: produced minus consumed per place."""
        return self._effect[self.transition_index[t]]

    def marking(self, counts: dict | None = None) -> tuple:
        """Marking tuple from ``{place: count}``; counts must be >= 0."""
        m = self.z_marking(counts)
        if any(v < 0 for v in m):
            raise NetError("marking entries must be nonnegative")
        return m

    def z_marking(self, counts: dict | None = None) -> tuple:
        """Like :meth:`marking` but entries may be negative."""
        m = [0] * len(self.places)
        for name, value in (counts or {}).items():
            if name not in self.place_index:
                raise NetError(f"unknown place {name!r}")
            if abs(value) > MAX_TOKENS:
                raise Overflow(f"entry for {name!r} exceeds 64-bit range")
            m[self.place_index[name]] = value
        return tuple(m)

    def marking_dict(self, m) -> dict:
        """Name-keyed view of a marking tuple; zero entries are omitted."""
        return {self.places[i]: v for i, v in enumerate(m) if v != 0}

    # -- semantics ----------------------------------------------------------

    def enabled(self, m, t: str) -> bool:
        ti = self.transition_index[t]
        return all(m[p] >= w for p, w in self.pre[ti])

    def enabled_transitions(self, m) -> list:
        return [t for t in self.transitions if self.enabled(m, t)]

    def fire(self, m, t: str) -> tuple:
        """Fire ``t`` under the usual semantics; raises NotEnabled/Overflow."""
        ti = self.transition_index[t]
        for p, w in self.pre[ti]:
            if m[p] < w:
                raise NotEnabled(t, self.places[p])
        return self._apply_effect(m, ti)

    def z_fire(self, m, t: str) -> tuple:
        """Fire ``t`` in the relaxed semantics where entries may go negative."""
        return self._apply_effect(m, self.transition_index[t])

    def _apply_effect(self, m, ti: int) -> tuple:
        delta = self._effect[ti]
        out = tuple(v + d for v, d in zip(m, delta))
        for v in out:
            if v > MAX_TOKENS or v < -MAX_TOKENS:
                raise Overflow("marking entry exceeds 64-bit range")
        return out

    def apply_run(self, m, run, semantics: str = "N"):
        """Apply a sequence of transition names from ``m``.

        Returns ``(final, trace)`` where ``trace`` lists every marking from
        ``m`` to the final one.  Under "N" semantics the first disabled step
        raises :class:`NotEnabledAt`; under "Z" every step is applied.
        """
        if semantics not in ("N", "Z"):
            raise ValueError(f"semantics must be 'N' or 'Z', not {semantics!r}")
        trace = [tuple(m)]
        cur = tuple(m)
        for i, t in enumerate(run):
            ti = self.transition_index[t]
            if semantics == "N":
                for p, w in self.pre[ti]:
                    if cur[p] < w:
                        raise NotEnabledAt(i, t, self.places[p])
            cur = self._apply_effect(cur, ti)
            trace.append(cur)
        return cur, trace

    # -- measures ------------------------------------------------------------

    def max_arc_weight(self) -> int:
        """Largest weight on any arc (0 for a net without arcs)."""
        best = 0
        for items in self.pre + self.post:
            for _, w in items:
                if w > best:
                    best = w
        return best

    def metrics(self) -> NetMetrics:
        w = self.max_arc_weight()
        norm = w + 1
        abs_value = len(self.places) + len(self.transitions)
        return NetMetrics(
            abs_value=abs_value,
            norm=norm,
            size=abs_value * (1 + math.log2(norm)),
            max_arc_weight=w,
        )


def run_support(run) -> frozenset:
    """Set of transitions occurring in a run."""
    return frozenset(run)


@dataclass(frozen=True)
class WorkflowNet:
    """A Petri net with designated initial and final places.

    Build through :func:`validate_workflow`, which checks the three
    workflow conditions; internal constructions that are correct by
    design may bypass validation via :meth:`unchecked`.
    """

    net: PetriNet
    initial: str
    final: str

    @staticmethod
    def unchecked(net: PetriNet, initial: str, final: str) -> "WorkflowNet":
        return WorkflowNet(net, initial, final)

    @property
    def initial_index(self) -> int:
        return self.net.place_index[self.initial]

    @property
    def final_index(self) -> int:
        return self.net.place_index[self.final]

    def initial_marking(self, k: int = 1) -> tuple:
        return self.net.marking({self.initial: k} if k else {})

    def final_marking(self, k: int = 1) -> tuple:
        return self.net.marking({self.final: k} if k else {})


def _underlying_edges(net: PetriNet):
    """Forward and backward adjacency of the underlying graph.

    Nodes are ``("p", index)`` and ``("t", index)``; an edge u -> v exists
    iff the flow between them is positive.
    """
    fwd = {}
    bwd = {}
    for ti in range(len(net.transitions)):
        tnode = ("t", ti)
        for p, _ in net.pre[ti]:
            fwd.setdefault(("p", p), []).append(tnode)
            bwd.setdefault(tnode, []).append(("p", p))
        for p, _ in net.post[ti]:
            fwd.setdefault(tnode, []).append(("p", p))
            bwd.setdefault(("p", p), []).append(tnode)
    return fwd, bwd


def _closure(start, adj):
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def validate_workflow(net: PetriNet, initial: str, final: str) -> WorkflowNet:
    """Check the workflow conditions and return the designated net.

    Raises :class:`ProducesIntoInitial`, :class:`ConsumesFromFinal` or
    :class:`NotOnPath` naming the first offending element in declaration
    order, or :class:`ValidationError` for bad designations.
    """
    if initial not in net.place_index:
        raise ValidationError(f"initial place {initial!r} is not a place of the net")
    if final not in net.place_index:
        raise ValidationError(f"final place {final!r} is not a place of the net")
    if initial == final:
        raise ValidationError("initial and final places must differ")
    ii = net.place_index[initial]
    fi = net.place_index[final]
    for ti, t in enumerate(net.transitions):
        for p, _ in net.post[ti]:
            if p == ii:
                raise ProducesIntoInitial(t)
    for ti, t in enumerate(net.transitions):
        for p, _ in net.pre[ti]:
            if p == fi:
                raise ConsumesFromFinal(t)
    fwd, bwd = _underlying_edges(net)
    from_i = _closure(("p", ii), fwd)
    to_f = _closure(("p", fi), bwd)
    on_path = from_i & to_f
    for pi, p in enumerate(net.places):
        if ("p", pi) not in on_path:
            raise NotOnPath(p)
    for ti, t in enumerate(net.transitions):
        if ("t", ti) not in on_path:
            raise NotOnPath(t)
    return WorkflowNet(net, initial, final)
