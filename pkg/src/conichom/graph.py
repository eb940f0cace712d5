"""Simple undirected graphs, the products used for conic homomorphisms, and
small-scale automorphism / homomorphism search.

Vertices are ``0..n-1``. Products on ``V(X) x V(Y)`` label the pair ``(x, y)``
by ``x * |V(Y)| + y`` (see :class:`VertexPairIndex`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import CapabilityError, ParameterError

DEFAULT_AUTOMORPHISM_LIMIT = 12


@dataclass(frozen=True)
class VertexPairIndex:
    """Bijection between pairs ``(x, y)`` and flat indices ``x * ny + y``."""

    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 0 or self.ny < 0:
            raise ParameterError(f"negative factor size ({self.nx}, {self.ny})")

    @property
    def size(self) -> int:
        return self.nx * self.ny

    def index(self, x: int, y: int) -> int:
        if not (0 <= x < self.nx and 0 <= y < self.ny):
            raise ParameterError(f"pair ({x}, {y}) out of range for {self.nx}x{self.ny}")
        return x * self.ny + y

    def pair(self, i: int) -> tuple[int, int]:
        if not 0 <= i < self.size:
            raise ParameterError(f"index {i} out of range for {self.nx}x{self.ny}")
        return divmod(i, self.ny)

    def block(self, x: int) -> range:
        """Flat indices of the block ``{(x, y) : y}``."""
        return range(x * self.ny, (x + 1) * self.ny)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return itertools.product(range(self.nx), range(self.ny))


@dataclass(frozen=True)
class Graph:
    """A finite simple graph. Immutable; build with :meth:`from_edges`."""

    n: int
    edges: frozenset

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 0:
            raise ParameterError(f"vertex count must be a nonnegative integer, got {self.n!r}")
        for e in self.edges:
            u, v = e
            if not (0 <= u < v < self.n):
                raise ParameterError(f"edge {e} is not a pair u < v of vertices in [0, {self.n})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]] = ()) -> "Graph":
        seen = set()
        for e in edges:
            if len(e) != 2:
                raise ParameterError(f"edge {e!r} does not have two endpoints")
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ParameterError(f"loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ParameterError(f"duplicate edge {key}")
            seen.add(key)
        return cls(int(n), frozenset(seen))

    @classmethod
    def from_adjacency(cls, adj) -> "Graph":
        a = np.asarray(adj)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ParameterError("adjacency matrix must be square")
        a = a.astype(bool)
        if a.diagonal().any():
            raise ParameterError("adjacency matrix has loops")
        if (a != a.T).any():
            raise ParameterError("adjacency matrix is not symmetric")
        iu, ju = np.nonzero(np.triu(a, 1))
        return cls(a.shape[0], frozenset(zip(iu.tolist(), ju.tolist())))

    @cached_property
    def adj(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            a[u, v] = a[v, u] = True
        a.setflags(write=False)
        return a

    @cached_property
    def neighbors(self) -> tuple[frozenset, ...]:
        nbrs = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def degrees(self) -> list[int]:
        return [len(s) for s in self.neighbors]

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u, v])

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges})"


def complement(g: Graph) -> Graph:
    a = ~g.adj
    np.fill_diagonal(a, False)
    return Graph.from_adjacency(a)


def _factor_masks(x: Graph, y: Graph):
    ix = np.eye(x.n, dtype=bool)[:, None, :, None]
    ax = x.adj[:, None, :, None]
    iy = np.eye(y.n, dtype=bool)[None, :, None, :]
    ay = y.adj[None, :, None, :]
    return ix, ax, iy, ay


def _from_pair_mask(mask: np.ndarray, x: Graph, y: Graph) -> Graph:
    size = x.n * y.n
    full = np.broadcast_to(mask, (x.n, y.n, x.n, y.n)).reshape(size, size).copy()
    np.fill_diagonal(full, False)
    return Graph.from_adjacency(full)


def homomorphic_product(x: Graph, y: Graph) -> Graph:
    """``X ⋉ Y``: ``(x,y)~(x',y')`` iff ``x=x', y≠y'`` or ``x~x', y≁y'``.

    Its edges are exactly the entries a strong homomorphism matrix must zero.
    """
    ix, ax, iy, ay = _factor_masks(x, y)
    return _from_pair_mask((ix & ~iy) | (ax & ~ay), x, y)


def strong_product(x: Graph, y: Graph) -> Graph:
    ix, ax, iy, ay = _factor_masks(x, y)
    return _from_pair_mask((ax & ay) | (ax & iy) | (ix & ay), x, y)


def lexicographic_product(x: Graph, y: Graph) -> Graph:
    ix, ax, iy, ay = _factor_masks(x, y)
    return _from_pair_mask(ax | (ix & ay), x, y)


def disjunctive_product(x: Graph, y: Graph) -> Graph:
    _, ax, _, ay = _factor_masks(x, y)
    return _from_pair_mask(ax | ay, x, y)


def categorical_product(x: Graph, y: Graph) -> Graph:
    _, ax, _, ay = _factor_masks(x, y)
    return _from_pair_mask(ax & ay, x, y)


def disjoint_union(x: Graph, y: Graph) -> Graph:
    """``X + Y`` with the vertices of ``Y`` shifted by ``|V(X)|``."""
    edges = list(x.edges) + [(u + x.n, v + x.n) for u, v in y.edges]
    return Graph.from_edges(x.n + y.n, edges)


PRODUCTS = {
    "homomorphic": homomorphic_product,
    "strong": strong_product,
    "lexicographic": lexicographic_product,
    "disjunctive": disjunctive_product,
    "categorical": categorical_product,
    "union": disjoint_union,
}


# -- generators ---------------------------------------------------------------

def _check_order(n):
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ParameterError(f"graph order must be a nonnegative integer, got {n!r}")


def complete(n: int) -> Graph:
    _check_order(n)
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def empty(n: int) -> Graph:
    _check_order(n)
    return Graph.from_edges(n)


def cycle(n: int) -> Graph:
    _check_order(n)
    if n < 3:
        raise ParameterError(f"cycle needs at least 3 vertices, got {n}")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    """Path on ``n`` vertices (``n - 1`` edges)."""
    _check_order(n)
    if n < 1:
        raise ParameterError("path needs at least one vertex")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def kneser(n: int, k: int) -> Graph:
    """Kneser graph: ``k``-subsets of ``[n]``, adjacent when disjoint."""
    if k < 1 or n < 2 * k:
        raise ParameterError(f"kneser(n, k) needs n >= 2k >= 2, got n={n}, k={k}")
    subsets = [frozenset(c) for c in itertools.combinations(range(n), k)]
    edges = [(i, j) for i, j in itertools.combinations(range(len(subsets)), 2)
             if not subsets[i] & subsets[j]]
    return Graph.from_edges(len(subsets), edges)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def erdos_renyi(n: int, p: float, rng: np.random.Generator) -> Graph:
    _check_order(n)
    draws = rng.random((n, n)) < p
    return Graph.from_adjacency(np.triu(draws, 1) | np.triu(draws, 1).T)


# -- automorphisms -------------------------------------------------------------

def automorphisms(g: Graph, limit: int = DEFAULT_AUTOMORPHISM_LIMIT) -> list[tuple[int, ...]]:
    """All permutations ``p`` with ``adj[p[u], p[v]] == adj[u, v]``.

    Backtracking over vertex images, pruned by degree and the sorted degree
    sequence of the neighbourhood. Factorial worst case, hence ``limit``.
    """
    if g.n > limit:
        raise CapabilityError(f"automorphism search limited to {limit} vertices, graph has {g.n}")
    adj = g.adj
    deg = g.degrees()
    signature = [(deg[v], tuple(sorted(deg[u] for u in g.neighbors[v]))) for v in range(g.n)]
    order = sorted(range(g.n), key=lambda v: (-deg[v], v))
    image = [-1] * g.n
    used = [False] * g.n
    found = []

    def extend(pos):
        if pos == g.n:
            found.append(tuple(image))
            return
        v = order[pos]
        for w in range(g.n):
            if used[w] or signature[w] != signature[v]:
                continue
            if any(adj[v, u] != adj[w, image[u]] for u in order[:pos]):
                continue
            image[v] = w
            used[w] = True
            extend(pos + 1)
            used[w] = False
        image[v] = -1

    extend(0)
    return sorted(found)


def is_vertex_transitive(g: Graph, limit: int = DEFAULT_AUTOMORPHISM_LIMIT) -> bool:
    if g.n == 0:
        return True
    orbit = {p[0] for p in automorphisms(g, limit)}
    return len(orbit) == g.n


# -- classical homomorphisms ---------------------------------------------------

def classical_homomorphism(x: Graph, y: Graph) -> Optional[list[int]]:
    """A map ``phi`` with ``u ~ v  =>  phi(u) ~ phi(v)``, or ``None``.

    Backtracking with forward checking and smallest-domain-first ordering.
    """
    if x.n == 0:
        return []
    if y.n == 0:
        return None
    nbr_x = x.neighbors
    nbr_y = y.neighbors
    domains = [set(range(y.n)) for _ in range(x.n)]
    assignment = [-1] * x.n

    def search(domains):
        free = [v for v in range(x.n) if assignment[v] < 0]
        if not free:
            return True
        v = min(free, key=lambda u: (len(domains[u]), -len(nbr_x[u]), u))
        for w in sorted(domains[v]):
            new = list(domains)
            ok = True
            for u in nbr_x[v]:
                if assignment[u] < 0:
                    new[u] = domains[u] & nbr_y[w]
                    if not new[u]:
                        ok = False
                        break
            if not ok:
                continue
            assignment[v] = w
            new[v] = {w}
            if search(new):
                return True
            assignment[v] = -1
        return False

    if search(domains):
        return list(assignment)
    return None


def is_homomorphism(phi: Sequence[int], x: Graph, y: Graph) -> bool:
    if len(phi) != x.n:
        return False
    return all(y.has_edge(phi[u], phi[v]) for u, v in x.edges)
