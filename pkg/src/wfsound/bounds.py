"""Exact evaluation of the explicit bound formulas, plus small-scale
zero-sum vector reordering utilities used as proof-artifact checks.

The closed-form bounds are exact; the two "big K" bounds instantiate an
asymptotic exponent with a configurable constant and are flagged
``exact=False`` accordingly.  All arithmetic is arbitrary precision;
reordering coefficients are kept as exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ilp import build_ilp_n, build_ilp_s, slack_extended
from .nets import NetError, WorkflowNet


class ScaleTooLarge(NetError):
    """Input is beyond the exhaustive-search envelope."""


@dataclass(frozen=True)
class BoundReport:
    value: int
    formula: str
    exact: bool
    asymptotic_constant: int | None = None


def _weight(wf: WorkflowNet) -> int:
    return wf.net.max_arc_weight()


def bound_placecover(wf: WorkflowNet) -> BoundReport:
    """Initial budget above which every nonredundant place is markable:
    ``(W + 2) ^ |T|`` where ``W`` is the largest arc weight."""
    w = _weight(wf)
    n_t = len(wf.net.transitions)
    return BoundReport((w + 2) ** n_t, f"({w}+2)^{n_t}", exact=True)


def bound_budget_ell(wf: WorkflowNet, k: int) -> BoundReport:
    """Token budget that turns a relaxed run from ``k`` initial tokens into
    an ordinary one: ``(W+2)^|T| * max(W, k) * |P|(|P|+2)``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    w = _weight(wf)
    n_t = len(wf.net.transitions)
    n_p = len(wf.net.places)
    value = (w + 2) ** n_t * max(w, k) * n_p * (n_p + 2)
    return BoundReport(
        value, f"({w}+2)^{n_t} * max({w},{k}) * {n_p}*({n_p}+2)", exact=True
    )


def bound_z_norm_cap(wf: WorkflowNet, k: int) -> BoundReport:
    """Norm cutoff for exploration from ``k`` initial tokens: any marking
    above ``max(W, k)^2 * (|P|+2) * |P|`` certifies unsoundness."""
    if k < 0:
        raise ValueError("k must be >= 0")
    w = _weight(wf)
    n_p = len(wf.net.places)
    value = max(w, k) ** 2 * (n_p + 2) * n_p
    return BoundReport(value, f"max({w},{k})^2 * ({n_p}+2) * {n_p}", exact=True)


def _small_solution_bound(program, constant: int) -> int:
    """Instantiation of the small-solution exponent on the slack-extended
    system: ``|G|^(constant * N * ceil(log2(N + 2)))`` with N its rows plus
    columns.  The hidden constant is not recoverable, hence configurable."""
    extended = slack_extended(program)
    n_total = extended.num_rows + extended.num_vars
    exponent = constant * n_total * max(1, (n_total + 1).bit_length())
    return program.norm() ** exponent


def bound_generalised_K(wf: WorkflowNet, constant: int = 1) -> BoundReport:
    """Upper bound on the smallest unsound budget (when one exists),
    assembled from the small-solution bound ``c`` of the reachability
    system and the budget bound for ``k = c``.  Not exact."""
    if constant <= 0:
        raise ValueError("constant must be > 0")
    c = _small_solution_bound(build_ilp_n(wf), constant)
    value = c + bound_budget_ell(wf, c).value
    return BoundReport(
        value, "c + ell(c) with c from the reachability system",
        exact=False, asymptotic_constant=constant,
    )


def bound_structural_K(wf: WorkflowNet, constant: int = 1) -> BoundReport:
    """Upper bound on the smallest sound budget (when one exists); same
    shape as :func:`bound_generalised_K` but over the sound-budget system."""
    if constant <= 0:
        raise ValueError("constant must be > 0")
    c = _small_solution_bound(build_ilp_s(wf), constant)
    value = c + bound_budget_ell(wf, c).value
    return BoundReport(
        value, "c + ell(c) with c from the sound-budget system",
        exact=False, asymptotic_constant=constant,
    )


# -- zero-sum reordering -------------------------------------------------------


def _norm(vector) -> int:
    return max((abs(x) for x in vector), default=0)


def _order_multiset(vectors, bound):
    """Order the multiset so every prefix sum has norm <= bound, or None.

    Exhaustive search over distinct next choices with memoized dead states;
    the prefix sum is a function of the remaining multiset, so memoizing on
    it alone is sound.
    """
    distinct = []
    counts = []
    for v in vectors:
        if v in distinct:
            counts[distinct.index(v)] += 1
        else:
            distinct.append(v)
            counts.append(1)
    dead = set()
    order = []

    def search(counts, prefix):
        if not any(counts):
            return True
        key = tuple(counts)
        if key in dead:
            return False
        for i, v in enumerate(distinct):
            if not counts[i]:
                continue
            nxt = tuple(a + b for a, b in zip(prefix, v))
            if _norm(nxt) <= bound:
                counts[i] -= 1
                order.append(v)
                if search(counts, nxt):
                    return True
                order.pop()
                counts[i] += 1
        dead.add(key)
        return False

    zero = tuple(Fraction(0) for _ in vectors[0]) if vectors else ()
    if search(counts, zero):
        return order
    return None


def _indices_for(vectors, ordered):
    """Map an ordered value sequence back to input indices, stably."""
    used = [False] * len(vectors)
    out = []
    for value in ordered:
        for i, v in enumerate(vectors):
            if not used[i] and v == value:
                used[i] = True
                out.append(i)
                break
    return out


def steinitz_reorder_small(vectors, d: int) -> list:
    """Permutation of zero-sum vectors whose prefix sums all stay within
    ``d * b`` where ``b`` is the largest input norm.  Exhaustive scale only:
    at most 10 vectors of dimension at most 3."""
    vectors = [tuple(v) for v in vectors]
    if len(vectors) > 10 or d > 3:
        raise ScaleTooLarge("reordering is exhaustive: need n <= 10, d <= 3")
    if any(len(v) != d for v in vectors):
        raise ValueError("vector dimension mismatch")
    if not vectors:
        return []
    total = tuple(sum(c) for c in zip(*vectors))
    if any(total):
        raise ValueError("vectors must sum to zero")
    b = max(_norm(v) for v in vectors)
    ordered = _order_multiset([tuple(Fraction(x) for x in v) for v in vectors], d * b)
    assert ordered is not None, "a reordering within d*b always exists"
    return _indices_for([tuple(Fraction(x) for x in v) for v in vectors], ordered)


@dataclass(frozen=True)
class SteinitzResult:
    """Reordering of ``x_0..x_n``: the permutation keeps ``x_0`` first, and
    prefix ``i`` stays within ``b(d+2)`` of ``coefficients[i]`` times the
    total sum, with the coefficients nondecreasing rationals."""

    permutation: tuple
    coefficients: tuple
    achieved_bound: Fraction


def steinitz_extended_reorder_small(vectors, d: int) -> SteinitzResult:
    """Reorder integer vectors ``x_0..x_n`` along their total sum.

    Augments the input with ``c`` copies of ``-z/c`` (``z`` the total sum,
    ``c`` its norm), orders the combined multiset within ``d*b``, extracts
    the positions of the original vectors and their drift coefficients,
    then swaps ``x_0`` back to the front, which costs at most ``2b`` more.
    """
    vectors = [tuple(int(x) for x in v) for v in vectors]
    if not vectors:
        raise ValueError("need at least one vector")
    if any(len(v) != d for v in vectors):
        raise ValueError("vector dimension mismatch")
    n = len(vectors) - 1
    z = tuple(sum(c) for c in zip(*vectors))
    c = _norm(z)
    b = max(_norm(v) for v in vectors)
    if n > 8 or d > 3 or c > 12:
        raise ScaleTooLarge("extended reordering needs n <= 8, d <= 3, |z| <= 12")

    if c == 0:
        perm = steinitz_reorder_small(vectors, d)
        perm = _front_swap(perm, perm.index(0))
        coeffs = tuple(Fraction(0) for _ in vectors)
        achieved = _achieved(vectors, perm, coeffs, z)
        return SteinitzResult(tuple(perm), coeffs, achieved)

    frac_vectors = [tuple(Fraction(x) for x in v) for v in vectors]
    w = tuple(Fraction(-x, c) for x in z)
    combined = frac_vectors + [w] * c
    ordered = _order_multiset(combined, d * max(b, 1))
    assert ordered is not None, "a reordering within d*b always exists"

    # choose which positions carry the original vectors: for the padding
    # value, the first c occurrences go to the padding
    from collections import Counter

    remaining = Counter(frac_vectors)
    padding_left = c
    positions = []
    original_values = []
    for pos, value in enumerate(ordered):
        if value == w and padding_left > 0:
            padding_left -= 1
            continue
        positions.append(pos)
        original_values.append(value)
        remaining[value] -= 1
    assert padding_left == 0 and all(v == 0 for v in remaining.values())

    coeffs = tuple(Fraction(s - i, c) for i, s in enumerate(positions))
    perm = _indices_for(frac_vectors, original_values)
    perm = _front_swap(perm, perm.index(0))
    achieved = _achieved(vectors, perm, coeffs, z)
    return SteinitzResult(tuple(perm), coeffs, achieved)


def _front_swap(perm, at):
    perm = list(perm)
    perm[0], perm[at] = perm[at], perm[0]
    return perm


def _achieved(vectors, perm, coeffs, z) -> Fraction:
    worst = Fraction(0)
    prefix = [Fraction(0)] * len(z) if z else []
    for i, idx in enumerate(perm):
        prefix = [a + b for a, b in zip(prefix, vectors[idx])]
        drift = [p - coeffs[i] * zi for p, zi in zip(prefix, z)]
        norm = max((abs(x) for x in drift), default=Fraction(0))
        if norm > worst:
            worst = norm
    return worst
