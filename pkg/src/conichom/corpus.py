"""The deterministic graph corpus used by the verification harness."""

from __future__ import annotations

import numpy as np

from .graph import Graph, complete, cycle, empty, erdos_renyi, path, petersen

DEFAULT_SEED = 20140601
RANDOM_ORDERS = (4, 5, 6, 7, 8)

VERTEX_TRANSITIVE = ("C5", "C7", "K5", "petersen")


def named_graphs() -> dict[str, Graph]:
    return {
        "K2": complete(2),
        "K3": complete(3),
        "K4": complete(4),
        "K5": complete(5),
        "E3": empty(3),
        "P3": path(3),
        "P4": path(4),
        "C4": cycle(4),
        "C5": cycle(5),
        "C7": cycle(7),
        "petersen": petersen(),
    }


def random_graphs(seed: int = DEFAULT_SEED, orders=RANDOM_ORDERS) -> dict[str, Graph]:
    """One G(n, 1/2) sample per order, all drawn from a single seeded stream."""
    rng = np.random.default_rng(seed)
    return {f"G{n}": erdos_renyi(n, 0.5, rng) for n in orders}


def corpus(seed: int = DEFAULT_SEED, max_size: int = 10) -> list[tuple[str, Graph]]:
    """Named graphs followed by the random samples, restricted to at most
    ``max_size`` vertices."""
    items = list(named_graphs().items()) + list(random_graphs(seed).items())
    return [(name, g) for name, g in items if g.n <= max_size]


def corpus_pairs(seed: int = DEFAULT_SEED, max_size: int = 10, max_product: int = 40):
    """Ordered pairs ``(X, Y)`` from the corpus with ``|V(X)| |V(Y)| <= max_product``."""
    graphs = corpus(seed, max_size)
    return [((nx_, x), (ny_, y)) for nx_, x in graphs for ny_, y in graphs
            if x.n * y.n <= max_product]
