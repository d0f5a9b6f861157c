"""Integer programs over nonnegative variables and exact feasibility search.

Programs are inequality systems ``A.x >= b`` whose variables range over
the naturals by convention (equalities are stored as paired inequalities).
Everything is exact: integer rows, big-int rechecks, and rational
Fourier-Motzkin elimination for cone questions.  No floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .nets import NetError, WorkflowNet


class BoxTooLarge(NetError):
    """The box-bounded search exceeded its node budget."""


@dataclass(frozen=True)
class IntegerProgram:
    """``rows`` are ``(coefficients, rhs)`` pairs meaning ``coeffs . x >= rhs``.

    All variables implicitly range over the nonnegative integers, so the
    integer and natural solution sets coincide.
    """

    variables: tuple
    rows: tuple

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    def norm(self) -> int:
        """max |A| + max |b| + rows + variables."""
        norm_a = max((abs(c) for coeffs, _ in self.rows for c in coeffs), default=0)
        norm_b = max((abs(rhs) for _, rhs in self.rows), default=0)
        return norm_a + norm_b + self.num_rows + self.num_vars

    def check(self, values) -> bool:
        """Exact big-int check that ``values`` satisfies every row."""
        if len(values) != self.num_vars:
            raise ValueError("wrong number of values")
        return all(
            sum(c * v for c, v in zip(coeffs, values)) >= rhs
            for coeffs, rhs in self.rows
        )

    def to_text(self) -> str:
        """Plain matrix export: coefficients, relation, constant per line."""
        return "\n".join(
            " ".join(str(c) for c in coeffs) + f" >= {rhs}"
            for coeffs, rhs in self.rows
        ) + ("\n" if self.rows else "")


@dataclass(frozen=True)
class Solution:
    """A nonnegative integer solution, verified against its program."""

    program: IntegerProgram
    values: tuple

    def __post_init__(self):
        if any(v < 0 for v in self.values):
            raise ValueError("solution values must be nonnegative")
        if not self.program.check(self.values):
            raise ValueError("values do not satisfy the program")

    def __getitem__(self, variable):
        return self.values[self.program.variables.index(variable)]

    def as_dict(self) -> dict:
        return dict(zip(self.program.variables, self.values))


def _equality_rows(coeffs, rhs):
    coeffs = tuple(coeffs)
    return [(coeffs, rhs), (tuple(-c for c in coeffs), -rhs)]


def build_ilp_n(wf: WorkflowNet) -> IntegerProgram:
    """System whose natural solutions describe the nonnegative markings
    obtainable from some initial budget under the relaxed firing semantics.

    Variables: the budget ``kappa`` then one counter per transition.  Rows:
    the initial place stays nonnegative; ``kappa >= 1``; every other place
    stays nonnegative; the counters are nonnegative.
    """
    net = wf.net
    n_t = len(net.transitions)
    variables = ("kappa",) + tuple(f"t:{t}" for t in net.transitions)
    ii = wf.initial_index
    rows = []
    rows.append(((1,) + tuple(net._effect[ti][ii] for ti in range(n_t)), 0))
    rows.append(((1,) + (0,) * n_t, 1))
    for pi in range(len(net.places)):
        if pi == ii:
            continue
        rows.append(((0,) + tuple(net._effect[ti][pi] for ti in range(n_t)), 0))
    for ti in range(n_t):
        unit = [0] * (n_t + 1)
        unit[ti + 1] = 1
        rows.append((tuple(unit), 0))
    return IntegerProgram(variables, tuple(rows))


def build_ilp_s(wf: WorkflowNet) -> IntegerProgram:
    """System encoding ``k`` initial tokens turning into ``k`` final tokens
    under the relaxed semantics: per-place equalities (paired inequalities),
    nonnegative counters, and ``kappa >= 1``.
    """
    net = wf.net
    n_t = len(net.transitions)
    variables = ("kappa",) + tuple(f"t:{t}" for t in net.transitions)
    ii = wf.initial_index
    fi = wf.final_index
    rows = []
    for pi in range(len(net.places)):
        kcoeff = (1 if pi == ii else 0) - (1 if pi == fi else 0)
        coeffs = (kcoeff,) + tuple(net._effect[ti][pi] for ti in range(n_t))
        rows.extend(_equality_rows(coeffs, 0))
    for ti in range(n_t):
        unit = [0] * (n_t + 1)
        unit[ti + 1] = 1
        rows.append((tuple(unit), 0))
    rows.append(((1,) + (0,) * n_t, 1))
    return IntegerProgram(variables, tuple(rows))


def marking_of(wf: WorkflowNet, solution) -> tuple:
    """Marking described by an ILP solution: the budget in the initial
    place plus the accumulated transition effects."""
    if isinstance(solution, Solution):
        values = solution.values
    elif isinstance(solution, dict):
        values = (solution.get("kappa", 0),) + tuple(
            solution.get(f"t:{t}", 0) for t in wf.net.transitions
        )
    else:
        values = tuple(solution)
    net = wf.net
    m = [0] * len(net.places)
    m[wf.initial_index] = values[0]
    for ti in range(len(net.transitions)):
        count = values[ti + 1]
        if count:
            for pi, d in enumerate(net._effect[ti]):
                m[pi] += count * d
    return tuple(m)


def slack_extended(program: IntegerProgram) -> IntegerProgram:
    """Extend a program with one fresh variable per row tied to the row's
    value, giving a ``3m x (m+n)`` system; bound formulas reference its
    dimensions."""
    m = program.num_rows
    n = program.num_vars
    variables = program.variables + tuple(f"y{j}" for j in range(1, m + 1))
    rows = []
    for coeffs, rhs in program.rows:
        rows.append((coeffs + (0,) * m, rhs))
    for j, (coeffs, _) in enumerate(program.rows):
        slack = [0] * m
        slack[j] = -1
        rows.extend(_equality_rows(coeffs + tuple(slack), 0))
    return IntegerProgram(variables, tuple(rows))


# -- box-bounded exact search -------------------------------------------------


def _propagate(rows, lo, hi):
    """Interval propagation to a fixpoint; returns False on a dead box."""
    changed = True
    while changed:
        changed = False
        for coeffs, rhs in rows:
            best = 0
            for c, l, h in zip(coeffs, lo, hi):
                best += c * h if c > 0 else c * l
            if best < rhs:
                return False
            for j, c in enumerate(coeffs):
                if c == 0:
                    continue
                rest = best - (c * hi[j] if c > 0 else c * lo[j])
                residual = rhs - rest
                if c > 0:
                    need = -((-residual) // c)  # ceil division
                    if need > lo[j]:
                        lo[j] = need
                        changed = True
                else:
                    limit = residual // c  # floor of residual / negative c
                    if limit < hi[j]:
                        hi[j] = limit
                        changed = True
                if lo[j] > hi[j]:
                    return False
    return True


def solve_box_bounded(
    program: IntegerProgram, box, node_budget: int = 200_000
):
    """Lexicographically least natural solution within the box, or None.

    ``box`` is a single bound applied to every variable or one bound per
    variable.  Depth-first over variables in declaration order with
    interval propagation after each assignment; raises :class:`BoxTooLarge`
    when the search exceeds ``node_budget`` nodes.
    """
    n = program.num_vars
    if isinstance(box, int):
        box = [box] * n
    else:
        box = list(box)
    if len(box) != n:
        raise ValueError("box size mismatch")
    if any(b < 0 for b in box):
        raise ValueError("box entries must be >= 0")
    rows = program.rows
    nodes = 0

    def search(level, lo, hi):
        nonlocal nodes
        if level == n:
            return list(lo)
        for value in range(lo[level], hi[level] + 1):
            nodes += 1
            if nodes > node_budget:
                raise BoxTooLarge(f"box search exceeded {node_budget} nodes")
            lo2 = list(lo)
            hi2 = list(hi)
            lo2[level] = hi2[level] = value
            if not _propagate(rows, lo2, hi2):
                continue
            found = search(level + 1, lo2, hi2)
            if found is not None:
                return found
        return None

    lo = [0] * n
    hi = list(box)
    if not _propagate(rows, lo, hi):
        return None
    found = search(0, lo, hi)
    if found is None:
        return None
    return Solution(program, tuple(found))


# -- exact rational feasibility (Fourier-Motzkin) ------------------------------


def _normalize_row(coeffs, rhs):
    """Scale a rational row to a primitive integer vector."""
    denoms = [c.denominator for c in coeffs] + [rhs.denominator]
    scale = lcm(*denoms) if denoms else 1
    ints = [int(c * scale) for c in coeffs]
    r = int(rhs * scale)
    g = 0
    for c in ints:
        g = gcd(g, abs(c))
    g = gcd(g, abs(r))
    if g > 1:
        ints = [c // g for c in ints]
        r = r // g
    return tuple(ints), r


def _fm_solve(rows, n):
    """Feasibility of ``coeffs . x >= rhs`` over the rationals.

    Returns an assignment as a list of Fractions, or None.  Rows come in
    as integer tuples; elimination keeps them integer and primitive.
    """
    # (rows, eliminated variable, its rows) stack for back-substitution
    remaining = list(range(n))
    work = []
    for coeffs, rhs in rows:
        work.append((tuple(Fraction(c) for c in coeffs), Fraction(rhs)))
    work = [_normalize_row(c, r) for c, r in work]
    stack = []

    def dedupe(rows_):
        best = {}
        for coeffs, rhs in rows_:
            if all(c == 0 for c in coeffs):
                if rhs > 0:
                    return None
                continue
            prev = best.get(coeffs)
            if prev is None or rhs > prev:
                best[coeffs] = rhs
        return [(c, r) for c, r in best.items()]

    work = dedupe(work)
    if work is None:
        return None
    while remaining:
        # eliminate the variable with the fewest pos x neg combinations
        def cost(var):
            pos = sum(1 for c, _ in work if c[var] > 0)
            neg = sum(1 for c, _ in work if c[var] < 0)
            return pos * neg
        var = min(remaining, key=cost)
        remaining.remove(var)
        pos = [(c, r) for c, r in work if c[var] > 0]
        neg = [(c, r) for c, r in work if c[var] < 0]
        zero = [(c, r) for c, r in work if c[var] == 0]
        stack.append((var, pos, neg))
        combos = []
        for pc, pr in pos:
            a = pc[var]
            for nc, nr in neg:
                b = -nc[var]
                coeffs = tuple(
                    Fraction(b * x + a * y) for x, y in zip(pc, nc)
                )
                combos.append(_normalize_row(coeffs, Fraction(b * pr + a * nr)))
        work = dedupe(zero + combos)
        if work is None:
            return None
    # all-variable elimination left only constant rows, all satisfied
    values = [Fraction(0)] * n
    for var, pos, neg in reversed(stack):
        lower = Fraction(0)
        has_lower = False
        for coeffs, rhs in pos:
            rest = sum(
                Fraction(c) * values[j] for j, c in enumerate(coeffs) if j != var
            )
            bound = (Fraction(rhs) - rest) / coeffs[var]
            if not has_lower or bound > lower:
                lower, has_lower = bound, True
        upper = None
        for coeffs, rhs in neg:
            rest = sum(
                Fraction(c) * values[j] for j, c in enumerate(coeffs) if j != var
            )
            bound = (Fraction(rhs) - rest) / coeffs[var]
            if upper is None or bound < upper:
                upper = bound
        value = lower if has_lower else Fraction(0)
        if upper is not None and value > upper:
            value = upper
        values[var] = value
    return values


def feasible_rational(program: IntegerProgram):
    """Exact rational feasibility of a program; returns Fractions or None."""
    return _fm_solve(program.rows, program.num_vars)


def homogeneous_witness(wf: WorkflowNet):
    """Nonzero natural transition counts whose combined effect is
    componentwise nonnegative and not zero, or None if none exists.

    Decided exactly on the rational cone (counts nonnegative, every place
    effect nonnegative, total effect at least one) and scaled back to
    integers.
    """
    net = wf.net
    n_t = len(net.transitions)
    if n_t == 0:
        return None
    rows = []
    for ti in range(n_t):
        unit = [0] * n_t
        unit[ti] = 1
        rows.append((tuple(unit), 0))
    for pi in range(len(net.places)):
        rows.append((tuple(net._effect[ti][pi] for ti in range(n_t)), 0))
    total = tuple(
        sum(net._effect[ti][pi] for pi in range(len(net.places)))
        for ti in range(n_t)
    )
    rows.append((total, 1))
    values = _fm_solve(rows, n_t)
    if values is None:
        return None
    scale = lcm(*(v.denominator for v in values))
    counts = [int(v * scale) for v in values]
    assert all(c >= 0 for c in counts) and any(counts)
    effect = [0] * len(net.places)
    for ti, c in enumerate(counts):
        for pi, d in enumerate(net._effect[ti]):
            effect[pi] += c * d
    assert all(e >= 0 for e in effect) and any(effect)
    return {t: c for t, c in zip(net.transitions, counts) if c}
