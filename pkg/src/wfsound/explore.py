"""Explicit-state reachability engine.

Reachability graphs are built breadth-first with children in transition
declaration order, so vertex indexing is deterministic.  Boundedness and
coverability questions go through a Karp-Miller construction in which a
node that strictly dominates one of its tree ancestors gets the dominated
coordinates accelerated to omega; identical (omega-)markings are globally
deduplicated, so on bounded nets the structure coincides with the plain
reachability graph.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .nets import MAX_TOKENS, NetError, Overflow, PetriNet

OMEGA = float("inf")

DEFAULT_NODE_CAP = 1_000_000


class CapExceeded(NetError):
    def __init__(self, which: str):
        super().__init__(f"exploration cap exceeded: {which}")
        self.which = which


class IncompleteGraph(NetError):
    pass


class NotBounded(NetError):
    pass


@dataclass(frozen=True)
class ExploreCaps:
    """Limits for explicit exploration.

    ``max_norm`` caps individual marking entries; reaching a marking above
    it is reported in-band (it is the cutoff used by the generalised
    soundness check).
    """

    max_vertices: int = DEFAULT_NODE_CAP
    max_norm: int | None = None

    def __post_init__(self):
        if self.max_vertices < 1:
            raise ValueError("max_vertices must be >= 1")


@dataclass
class ReachGraph:
    """Explicit reachability graph; vertex 0 is the root marking."""

    net: PetriNet
    vertices: list
    edges: list  # (source index, transition index, target index)
    parent: list  # BFS-tree (parent index, transition index) per vertex
    caps_hit: str | None = None  # None | "vertices" | "norm"
    norm_offender: tuple | None = None  # (source index, transition index, marking)

    @property
    def complete(self) -> bool:
        return self.caps_hit is None

    @property
    def root(self) -> int:
        return 0

    def run_to(self, vertex: int) -> list:
        """Transition names along the BFS tree from the root to ``vertex``."""
        run = []
        v = vertex
        while self.parent[v] is not None:
            u, ti = self.parent[v]
            run.append(self.net.transitions[ti])
            v = u
        run.reverse()
        return run

    def successors(self, vertex: int):
        return [(ti, dst) for src, ti, dst in self.edges if src == vertex]

    def to_edge_list(self) -> str:
        """Debug export: one ``src transition dst`` line per edge."""
        return "\n".join(
            f"{src} {self.net.transitions[ti]} {dst}" for src, ti, dst in self.edges
        ) + ("\n" if self.edges else "")


def build_reach_graph(net: PetriNet, m0, caps: ExploreCaps = ExploreCaps()) -> ReachGraph:
    """BFS over the markings reachable from ``m0``.

    Stops as soon as a cap is hit, recording which one; the graph is
    complete (closed under firing) iff no cap was hit.
    """
    m0 = tuple(m0)
    if caps.max_norm is not None and m0 and max(m0) > caps.max_norm:
        raise ValueError("initial marking exceeds the norm cap")
    graph = ReachGraph(net, [m0], [], [None])
    index = {m0: 0}
    vertices = graph.vertices
    edges = graph.edges
    parent = graph.parent
    pre = net.pre
    effect = net._effect
    trans_range = range(len(net.transitions))
    max_norm = caps.max_norm
    max_vertices = caps.max_vertices
    add = int.__add__
    queue = deque([0])
    while queue:
        v = queue.popleft()
        m = vertices[v]
        for ti in trans_range:
            enabled = True
            for p, w in pre[ti]:
                if m[p] < w:
                    enabled = False
                    break
            if not enabled:
                continue
            child = tuple(map(add, m, effect[ti]))
            j = index.get(child)
            if j is None:
                # norm and overflow bounds only need checking on markings
                # seen for the first time
                top = max(child, default=0)
                if top > MAX_TOKENS:
                    raise Overflow("marking entry exceeds 64-bit range")
                if max_norm is not None and top > max_norm:
                    graph.caps_hit = "norm"
                    graph.norm_offender = (v, ti, child)
                    return graph
                if len(vertices) >= max_vertices:
                    graph.caps_hit = "vertices"
                    return graph
                j = len(vertices)
                index[child] = j
                vertices.append(child)
                parent.append((v, ti))
                queue.append(j)
            edges.append((v, ti, j))
    return graph


@dataclass
class KMTree:
    """Karp-Miller structure with globally deduplicated (omega-)markings."""

    net: PetriNet
    markings: list
    parent: list  # (parent index, transition index) or None
    caps_hit: bool = False
    pump: tuple | None = None  # (prefix run, pump run) captured at first acceleration

    @property
    def has_omega(self) -> bool:
        return any(OMEGA in m for m in self.markings)

    def run_to(self, node: int) -> list:
        run = []
        v = node
        while self.parent[v] is not None:
            u, ti = self.parent[v]
            run.append(self.net.transitions[ti])
            v = u
        run.reverse()
        return run

    def covers(self, vector) -> bool:
        """Is some node componentwise above ``vector`` (omega counts as infinity)?"""
        for m in self.markings:
            if all(a >= b for a, b in zip(m, vector)):
                return True
        return False


def karp_miller(
    net: PetriNet, m0, node_cap: int = DEFAULT_NODE_CAP, stop_on_pump: bool = False
) -> KMTree:
    m0 = tuple(m0)
    tree = KMTree(net, [m0], [None])
    index = {m0: 0}
    markings = tree.markings
    parent = tree.parent
    pre = net.pre
    effect = net._effect
    n_trans = len(net.transitions)
    queue = deque([0])
    while queue:
        v = queue.popleft()
        m = markings[v]
        # ancestor chain of v, nearest first
        chain = []
        u = v
        while u is not None:
            chain.append(u)
            u = parent[u][0] if parent[u] is not None else None
        for ti in range(n_trans):
            enabled = True
            for p, w in pre[ti]:
                if m[p] < w:
                    enabled = False
                    break
            if not enabled:
                continue
            child = [a + b for a, b in zip(m, effect[ti])]
            for c in child:
                if c != OMEGA and (c > MAX_TOKENS or c < -MAX_TOKENS):
                    raise Overflow("marking entry exceeds 64-bit range")
            # accelerate against every ancestor until stable
            changed = True
            accelerated_from = None
            while changed:
                changed = False
                for a in chain:
                    am = markings[a]
                    if am == tuple(child):
                        continue
                    if all(x <= y for x, y in zip(am, child)):
                        for i, (x, y) in enumerate(zip(am, child)):
                            if x < y and child[i] != OMEGA:
                                child[i] = OMEGA
                                changed = True
                        if changed and accelerated_from is None:
                            accelerated_from = a
            child = tuple(child)
            if accelerated_from is not None and tree.pump is None:
                # First acceleration anywhere: the whole structure is still
                # concrete, so both runs replay with ordinary firings.
                prefix = tree.run_to(accelerated_from)
                full = tree.run_to(v) + [net.transitions[ti]]
                tree.pump = (prefix, full[len(prefix):])
                if stop_on_pump:
                    return tree
            if child in index:
                continue
            if len(markings) >= node_cap:
                tree.caps_hit = True
                return tree
            index[child] = len(markings)
            markings.append(child)
            parent.append((v, ti))
            queue.append(len(markings) - 1)
    return tree


@dataclass
class BoundednessVerdict:
    """Outcome of the boundedness decision.

    ``status`` is ``"bounded"`` (with the componentwise ``bound`` over all
    reachable markings), ``"unbounded"`` (with a replayable witness: the
    ``prefix_run`` reaches a marking that the following ``pump_run``
    strictly increases), or ``"exceeded"`` if the node cap was hit first.
    """

    status: str
    bound: tuple | None = None
    prefix_run: list | None = None
    pump_run: list | None = None

    @property
    def bounded(self) -> bool:
        return self.status == "bounded"


def decide_boundedness(
    net: PetriNet, m0, node_cap: int = DEFAULT_NODE_CAP
) -> BoundednessVerdict:
    tree = karp_miller(net, m0, node_cap=node_cap, stop_on_pump=True)
    if tree.pump is not None:
        prefix, pump = tree.pump
        return BoundednessVerdict("unbounded", prefix_run=prefix, pump_run=pump)
    if tree.caps_hit:
        return BoundednessVerdict("exceeded")
    bound = tuple(
        max(m[i] for m in tree.markings) for i in range(len(net.places))
    )
    return BoundednessVerdict("bounded", bound=bound)


def quasi_liveness(
    net: PetriNet, m0, node_cap: int = DEFAULT_NODE_CAP
) -> dict:
    """Per-transition quasi-liveness from ``m0``.

    A transition is quasi-live iff some Karp-Miller node covers its pre
    vector (omega entries count as infinity); on bounded nets the node set
    is exactly the reachable markings, so this degenerates to the explicit
    graph check.
    """
    tree = karp_miller(net, m0, node_cap=node_cap)
    if tree.caps_hit:
        raise CapExceeded("karp-miller nodes")
    verdict = {}
    for ti, t in enumerate(net.transitions):
        pre = net.pre[ti]
        verdict[t] = any(
            all(m[p] >= w for p, w in pre) for m in tree.markings
        )
    return verdict


def backward_reachable(graph: ReachGraph, targets) -> set:
    """Vertices from which some target vertex is reachable.

    ``targets`` is a marking tuple, a collection of marking tuples, or a
    predicate over markings.  Requires a complete graph.
    """
    if not graph.complete:
        raise IncompleteGraph(f"graph exploration hit cap: {graph.caps_hit}")
    if callable(targets):
        pred = targets
    else:
        if targets and isinstance(next(iter(targets)), (int, float)):
            targets = [tuple(targets)]
        wanted = {tuple(t) for t in targets}
        pred = lambda m: m in wanted
    reverse = {}
    for src, _, dst in graph.edges:
        reverse.setdefault(dst, []).append(src)
    seen = {v for v, m in enumerate(graph.vertices) if pred(m)}
    stack = list(seen)
    while stack:
        v = stack.pop()
        for u in reverse.get(v, ()):
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return seen


def decide_cyclicity(net: PetriNet, m0, node_cap: int = DEFAULT_NODE_CAP):
    """Is every reachable marking able to reach ``m0`` back?

    The net must be bounded from ``m0`` (the caller normally establishes
    this first); a cap hit raises :class:`NotBounded`.  Returns
    ``(True, None)`` or ``(False, counterexample marking)``.
    """
    m0 = tuple(m0)
    graph = build_reach_graph(net, m0, ExploreCaps(max_vertices=node_cap))
    if not graph.complete:
        raise NotBounded("reachability graph exploration hit a cap")
    back = backward_reachable(graph, m0)
    if len(back) == len(graph.vertices):
        return True, None
    worst = min(v for v in range(len(graph.vertices)) if v not in back)
    return False, graph.vertices[worst]
