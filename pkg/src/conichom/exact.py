"""Exact combinatorial parameters: independence, clique, chromatic and
fractional chromatic numbers.

These back the CP-cone columns of the theta programs, which are never sent
to the conic solver.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .errors import CapabilityError, NumericalError
from .graph import Graph, complement
from .solver import ProgramBuilder, SolverOptions, solve

ALPHA_LIMIT = 80
CHI_LIMIT = 24
MAX_INDEPENDENT_SETS = 100_000
LP_TOL = 1e-9


def _bits(g: Graph) -> list[int]:
    masks = [0] * g.n
    for u, v in g.edges:
        masks[u] |= 1 << v
        masks[v] |= 1 << u
    return masks


def _members(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def maximum_clique(g: Graph, limit: int = ALPHA_LIMIT) -> list[int]:
    """A maximum clique, by branch and bound with a greedy-colouring bound."""
    if g.n > limit:
        raise CapabilityError(f"exact clique search limited to {limit} vertices, graph has {g.n}")
    nbr = _bits(g)
    best: list[int] = []

    def colour_bound(cand: int):
        # greedy sequential colouring; returns vertices in order with colour numbers
        order, bounds = [], []
        colour = 0
        remaining = cand
        while remaining:
            colour += 1
            avail = remaining
            while avail:
                low = avail & -avail
                v = low.bit_length() - 1
                avail &= ~low & ~nbr[v]
                remaining &= ~low
                order.append(v)
                bounds.append(colour)
        return order, bounds

    def expand(clique: list[int], cand: int):
        nonlocal best
        order, bounds = colour_bound(cand)
        for v, bound in zip(reversed(order), reversed(bounds)):
            if len(clique) + bound <= len(best):
                return
            clique.append(v)
            new = cand & nbr[v]
            if new:
                expand(clique, new)
            elif len(clique) > len(best):
                best = list(clique)
            clique.pop()
            cand &= ~(1 << v)

    if g.n:
        expand([], (1 << g.n) - 1)
    return sorted(best)


def maximum_independent_set(g: Graph, limit: int = ALPHA_LIMIT) -> list[int]:
    return maximum_clique(complement(g), limit)


def alpha_exact(g: Graph, limit: int = ALPHA_LIMIT) -> int:
    return len(maximum_independent_set(g, limit))


def omega_exact(g: Graph, limit: int = ALPHA_LIMIT) -> int:
    return len(maximum_clique(g, limit))


def _dsatur_order_colouring(g: Graph, k: Optional[int]) -> Optional[list[int]]:
    """Backtracking DSATUR: a proper colouring with at most ``k`` colours
    (greedy single pass when ``k`` is ``None``)."""
    n = g.n
    nbr = g.neighbors
    colours = [-1] * n

    def pick():
        best, key = -1, None
        for v in range(n):
            if colours[v] >= 0:
                continue
            sat = len({colours[u] for u in nbr[v] if colours[u] >= 0})
            cand = (sat, len(nbr[v]), -v)
            if key is None or cand > key:
                best, key = v, cand
        return best

    if k is None:
        for _ in range(n):
            v = pick()
            used = {colours[u] for u in nbr[v]}
            c = 0
            while c in used:
                c += 1
            colours[v] = c
        return colours

    def search(assigned, used_colours):
        if assigned == n:
            return True
        v = pick()
        forbidden = {colours[u] for u in nbr[v]}
        # new colours are interchangeable, so try at most one unused colour
        for c in range(min(used_colours + 1, k)):
            if c in forbidden:
                continue
            colours[v] = c
            if search(assigned + 1, max(used_colours, c + 1)):
                return True
            colours[v] = -1
        return False

    return list(colours) if search(0, 0) else None


def optimal_colouring(g: Graph, limit: int = CHI_LIMIT) -> list[int]:
    """A colouring with ``chi(g)`` colours: DSATUR upper bound, clique lower
    bound, then exact ``k``-colourability tests for increasing ``k``."""
    if g.n > limit:
        raise CapabilityError(f"exact colouring limited to {limit} vertices, graph has {g.n}")
    if g.n == 0:
        return []
    greedy = _dsatur_order_colouring(g, None)
    upper = max(greedy) + 1
    lower = max(1, omega_exact(g))
    for k in range(lower, upper):
        found = _dsatur_order_colouring(g, k)
        if found is not None:
            return found
    return greedy


def chi_exact(g: Graph, limit: int = CHI_LIMIT) -> int:
    col = optimal_colouring(g, limit)
    return max(col) + 1 if col else 0


def clique_cover(g: Graph, limit: int = CHI_LIMIT) -> list[list[int]]:
    """Partition of ``V(g)`` into ``chi(complement(g))`` cliques."""
    col = optimal_colouring(complement(g), limit)
    classes: dict[int, list[int]] = {}
    for v, c in enumerate(col):
        classes.setdefault(c, []).append(v)
    return [classes[c] for c in sorted(classes)]


def maximal_independent_sets(g: Graph, cap: int = MAX_INDEPENDENT_SETS) -> list[list[int]]:
    """All maximal independent sets (Bron-Kerbosch with pivoting on the
    complement)."""
    nbr = _bits(complement(g))
    found: list[list[int]] = []

    def bk(r: int, p: int, x: int):
        if not p and not x:
            found.append(_members(r))
            if len(found) > cap:
                raise CapabilityError(f"more than {cap} maximal independent sets")
            return
        pivot_pool = p | x
        pivot = max(_members(pivot_pool), key=lambda u: bin(p & nbr[u]).count("1"))
        for v in _members(p & ~nbr[pivot]):
            bit = 1 << v
            bk(r | bit, p & nbr[v], x & nbr[v])
            p &= ~bit
            x |= bit

    if g.n:
        bk(0, (1 << g.n) - 1, 0)
    return sorted(found)


def fractional_colouring(g: Graph, cap: int = MAX_INDEPENDENT_SETS):
    """Optimal fractional colouring ``(value, [(set, weight), ...])``.

    LP over the maximal independent sets, solved on the orthant-only path of
    the conic solver and then polished on its support.
    """
    if g.n == 0:
        return 0.0, []
    sets = maximal_independent_sets(g, cap)
    k = len(sets)
    pb = ProgramBuilder()
    w0 = pb.add_nonneg(k)
    s0 = pb.add_nonneg(g.n)
    member = np.zeros((g.n, k))
    for j, s in enumerate(sets):
        member[s, j] = 1.0
    for v in range(g.n):
        terms = [(w0 + j, 1.0) for j in np.nonzero(member[v])[0]]
        terms.append((s0 + v, -1.0))
        pb.add_constraint(lp_terms=terms, rhs=1.0)
    for j in range(k):
        pb.set_lp_objective(w0 + j, 1.0)
    report = solve(pb.build("min"), SolverOptions(feas_tol=LP_TOL, gap_tol=LP_TOL))
    if not report.usable:
        raise NumericalError(f"fractional colouring LP ended with status {report.status}")
    w = np.maximum(report.lp_solution[w0:w0 + k], 0.0)
    w = _polish(member, w)
    return float(w.sum()), [(sets[j], float(w[j])) for j in range(k) if w[j] > 0]


def _polish(member: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Re-solve the covering equalities on the support of an interior LP
    solution; keep the result only if it is feasible and no worse."""
    support = w > 1e-7 * max(1.0, w.max())
    cover = member @ w
    tight = np.abs(cover - 1.0) < 1e-6
    if not support.any() or not tight.any():
        return w
    sub = member[np.ix_(tight, support)]
    sol, *_ = np.linalg.lstsq(sub, np.ones(int(tight.sum())), rcond=None)
    cand = np.zeros_like(w)
    cand[support] = sol
    if cand.min() < -1e-12 or (member @ cand).min() < 1 - 1e-12:
        return w
    cand = np.maximum(cand, 0.0)
    if cand.sum() > w.sum() + 1e-9:
        return w
    return cand


def chi_f(g: Graph, cap: int = MAX_INDEPENDENT_SETS) -> float:
    return fractional_colouring(g, cap)[0]


def exact_cover_weights(n: int, weighted_sets):
    """Shrink sets of a fractional colouring until every vertex is covered
    with total weight exactly one. Subsets of independent sets stay independent."""
    items = [(list(s), float(w)) for s, w in weighted_sets if w > 0]
    cover = np.zeros(n)
    for s, w in items:
        cover[s] += w
    for v in range(n):
        excess = cover[v] - 1.0
        i = 0
        while excess > 1e-15 and i < len(items):
            s, w = items[i]
            if v in s and w > 0:
                r = min(w, excess)
                items[i] = (s, w - r)
                rest = [u for u in s if u != v]
                if rest:
                    items.append((rest, r))
                excess -= r
                cover[v] -= r
            i += 1
    return [(s, w) for s, w in items if w > 0]
