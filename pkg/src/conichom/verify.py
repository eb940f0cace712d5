"""Theorem-verification harness.

Each suite walks a deterministic corpus and checks one family of identities
or constructions, recording per-instance outcomes. Solver results are cached
per process, so running several suites in one session reuses them.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from . import homomorphisms as hm
from .corpus import DEFAULT_SEED, VERTEX_TRANSITIVE, corpus, corpus_pairs, named_graphs
from .errors import ConicHomError, InconclusiveError
from .exact import alpha_exact, chi_exact
from .graph import (Graph, categorical_product, classical_homomorphism, complement, complete,
                    disjunctive_product, lexicographic_product, path, cycle)
from .linalg import contract, kron, min_eigenvalue, permute, principal_submatrix
from .theta import ConeTag, big_theta, big_theta_residual, theta, theta_residual

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"

CONIC = (ConeTag.DNN, ConeTag.SPLUS)
ALL_CONES = (ConeTag.CP, ConeTag.DNN, ConeTag.SPLUS)


@dataclass
class Outcome:
    key: str
    status: str
    residual: float = 0.0
    detail: str = ""


@dataclass
class SuiteResult:
    theorem: str
    outcomes: list = field(default_factory=list)
    wall_time: float = 0.0

    def count(self, status: str) -> int:
        return sum(1 for o in self.outcomes if o.status == status)

    @property
    def worst_residual(self) -> float:
        return max((o.residual for o in self.outcomes), default=0.0)

    @property
    def failures(self) -> list:
        return [o for o in self.outcomes if o.status == FAIL]

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> dict:
        return {"theorem": self.theorem, "instances": len(self.outcomes),
                "pass": self.count(PASS), "fail": self.count(FAIL),
                "inconclusive": self.count(INCONCLUSIVE),
                "worst_residual": float(f"{self.worst_residual:.9g}"),
                "wall_time": round(self.wall_time, 3),
                "failures": [{"instance": o.key, "detail": o.detail} for o in self.failures]}


@dataclass
class VerificationReport:
    suites: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.suites)

    def to_json(self) -> dict:
        return {"ok": self.ok, "suites": [s.summary() for s in self.suites]}

    def lines(self) -> list[str]:
        out = []
        for s in self.suites:
            tag = PASS if s.ok else FAIL
            out.append(f"{tag:4s} {s.theorem:18s} instances={len(s.outcomes):4d} pass={s.count(PASS):4d} "
                       f"fail={s.count(FAIL):3d} inconclusive={s.count(INCONCLUSIVE):3d} "
                       f"worst={s.worst_residual:.3e} time={s.wall_time:.2f}s")
            for o in s.failures:
                out.append(f"     FAIL {o.key}: {o.detail}")
        return out


# -- cached computations -----------------------------------------------------------

@lru_cache(maxsize=None)
def cached_theta(g: Graph, cone: ConeTag):
    return theta(g, cone)


@lru_cache(maxsize=None)
def cached_big_theta(g: Graph, cone: ConeTag):
    return big_theta(g, cone)


@lru_cache(maxsize=None)
def cached_decision(x: Graph, y: Graph, cone: ConeTag, mode: str):
    return hm.decide_hom(x, y, cone, mode)


def clear_caches():
    for fn in (cached_theta, cached_big_theta, cached_decision):
        fn.cache_clear()


def _status(ok: bool) -> str:
    return PASS if ok else FAIL


# -- oracles ------------------------------------------------------------------------------

def spectral_theta(g: Graph) -> float:
    """``-n l_min / (l_max - l_min)`` from the adjacency spectrum; equals
    Lovasz theta for edge-transitive graphs."""
    ev = np.linalg.eigvalsh(g.adj.astype(float))
    return float(-g.n * ev[0] / (ev[-1] - ev[0]))


def brute_force_hom_exists(x: Graph, y: Graph, chunk: int = 200_000) -> bool:
    """Enumerate every map ``V(X) -> V(Y)``, vectorised in chunks."""
    if x.n == 0:
        return True
    if y.n == 0:
        return False
    edges = np.array(x.sorted_edges(), dtype=int).reshape(-1, 2)
    total = y.n ** x.n
    digits = y.n ** np.arange(x.n - 1, -1, -1)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk))
        maps = (codes[:, None] // digits[None, :]) % y.n
        if edges.size == 0:
            return True
        ok = y.adj[maps[:, edges[:, 0]], maps[:, edges[:, 1]]].all(axis=1)
        if ok.any():
            return True
    return False


# -- suites ---------------------------------------------------------------------------------

def suite_golden(ctx) -> list:
    out = []
    c5, pet = cycle(5), named_graphs()["petersen"]
    for name, g, tol in (("C5", c5, 1e-6), ("petersen", pet, 1e-5)):
        v = cached_theta(g, ConeTag.SPLUS).value
        ref = spectral_theta(g)
        out.append(Outcome(f"theta_splus({name})", _status(abs(v - ref) <= tol), abs(v - ref),
                           f"value {v:.10g} vs spectral {ref:.10g}"))
    a = cached_theta(c5, ConeTag.CP).value
    out.append(Outcome("theta_cp(C5)", _status(a == 2.0), abs(a - 2.0), f"value {a}"))
    f = cached_big_theta(c5, ConeTag.CP).value
    out.append(Outcome("big_theta_cp(C5)", _status(abs(f - 2.5) <= 1e-9), abs(f - 2.5), f"value {f!r}"))
    return out


def suite_thetas(ctx) -> list:
    out = []
    for name, g in corpus(ctx["seed"], ctx["max_size"]):
        for cone in CONIC:
            t = cached_theta(g, cone).value
            b = cached_big_theta(g, cone).value
            prod = t * b
            ok = prod >= g.n - 1e-6
            detail = f"theta*Theta = {prod:.10g}, n = {g.n}"
            res = max(0.0, g.n - prod)
            if name in VERTEX_TRANSITIVE:
                ok = ok and abs(prod - g.n) <= 1e-5
                res = abs(prod - g.n)
            out.append(Outcome(f"{name}/{cone.value}", _status(ok), res, detail))
    return out


def _pairs(ctx, max_product=40):
    return corpus_pairs(ctx["seed"], ctx["max_size"], max_product)


def suite_hom2theta(ctx) -> list:
    out = []
    for (nx_, x), (ny_, y) in _pairs(ctx):
        key = f"{nx_}->{ny_}"
        for cone in CONIC:
            d = cached_decision(x, y, cone, hm.STRONG)
            dv = d.diagnostics["direct"]["route_verdict"]
            tv = d.diagnostics["theta"]["route_verdict"]
            conflict = {dv, tv} == {hm.YES, hm.NO}
            if conflict:
                out.append(Outcome(f"{key}/{cone.value}", FAIL, 0.0, f"direct {dv}, theta {tv}"))
            elif d.verdict == hm.INCONCLUSIVE:
                out.append(Outcome(f"{key}/{cone.value}", INCONCLUSIVE, 0.0, f"direct {dv}, theta {tv}"))
            else:
                res = d.witness.residuals.worst(hm.STRONG) if d.witness else 0.0
                out.append(Outcome(f"{key}/{cone.value}", PASS, res, d.verdict))
        if y.n ** x.n <= 10 ** 6:
            d = cached_decision(x, y, ConeTag.CP, hm.STRONG)
            truth = brute_force_hom_exists(x, y)
            out.append(Outcome(f"{key}/cp", _status((d.verdict == hm.YES) == truth), 0.0,
                               f"decision {d.verdict}, enumeration {truth}"))
    return out


def suite_dnnequiv(ctx) -> list:
    out = []
    for (nx_, x), (ny_, y) in _pairs(ctx):
        d = cached_decision(x, y, ConeTag.DNN, hm.WEAK)
        key = f"{nx_}->{ny_}"
        if d.verdict != hm.YES:
            continue
        try:
            r = hm.repair_weak_to_strong_dnn(d.witness)
        except ConicHomError as exc:
            out.append(Outcome(key, FAIL, math.inf, str(exc)))
            continue
        res = r.residuals.worst(hm.STRONG)
        out.append(Outcome(key, _status(res <= 1e-7), res,
                           f"weak in-block mass {d.witness.residuals.mortho_dev:.3e}"))
    return out


def suite_monotonicity(ctx) -> list:
    out = []
    for (nx_, x), (ny_, y) in _pairs(ctx):
        for cone in ALL_CONES:
            d = cached_decision(x, y, cone, hm.STRONG)
            if d.verdict != hm.YES:
                continue
            w = d.witness
            key = f"{nx_}->{ny_}/{cone.value}"
            # complement theta
            m = cached_theta(complement(x), cone).solution
            n_mat = hm.monotone_transform_theta(m, w)
            feas = theta_residual(n_mat, complement(y), cone)
            bar_y = cached_theta(complement(y), cone).value
            ok1 = feas <= 1e-6 and n_mat.total() <= bar_y + 1e-5
            # Theta
            big_y = cached_big_theta(y, cone)
            mx, t, top = hm.monotone_transform_big_theta(big_y.solution, w)
            feas2 = big_theta_residual(mx, x, cone)
            big_x = cached_big_theta(x, cone).value
            ok2 = feas2 <= 1e-6 and big_x <= t + 1e-5 and top.min() >= -1e-6
            out.append(Outcome(key, _status(ok1 and ok2), max(feas, feas2),
                               f"theta-bar {n_mat.total():.9g} <= {bar_y:.9g}; Theta {big_x:.9g} <= {t:.9g}"))
    return out


def suite_multiplicativity(ctx) -> list:
    out = []
    base = {"C5": cycle(5), "K3": complete(3), "P3": path(3), "C4": cycle(4)}
    ratios = []
    for (a, x), (b, y) in itertools.product(base.items(), repeat=2):
        for cone in CONIC:
            tx, ty = cached_theta(x, cone).value, cached_theta(y, cone).value
            target = tx * ty
            dis = cached_theta(disjunctive_product(x, y), cone).value
            lex = cached_theta(lexicographic_product(x, y), cone).value
            err = max(abs(dis - target), abs(lex - target))
            ok = err <= 1e-5 * target
            bx, by = cached_big_theta(x, cone).value, cached_big_theta(y, cone).value
            bdis = cached_big_theta(disjunctive_product(x, y), cone).value
            ok = ok and bdis <= bx * by + 1e-6
            ratios.append(bdis / (bx * by))
            out.append(Outcome(f"{a}*{b}/{cone.value}", _status(ok), err / target,
                               f"theta {dis:.9g}, {lex:.9g} vs {target:.9g}; "
                               f"Theta ratio {bdis / (bx * by):.9g}"))
    ctx.setdefault("notes", {})["big_theta_ratio_range"] = (min(ratios), max(ratios))
    return out


def suite_lattice(ctx) -> list:
    out = []
    c5, c4, k3, k4 = cycle(5), cycle(4), complete(3), complete(4)
    lift = lambda x, y: hm.lift_map_witness(classical_homomorphism(x, y), x, y)
    cases = [("lift", ConeTag.CP, lift(c5, k3), lift(c5, k4), lift(c4, k3))]
    for cone in CONIC:
        cases.append(("solver", cone,
                      cached_decision(c5, k3, cone, hm.STRONG).witness,
                      cached_decision(c5, k4, cone, hm.STRONG).witness,
                      cached_decision(c4, k3, cone, hm.STRONG).witness))
    for kind, cone, w53, w54, w43 in cases:
        try:
            meet = hm.categorical_meet_witness(w53, w54)
            res = meet.residuals.worst(meet.mode)
            ok = res <= 1e-6 and meet.y == categorical_product(k3, k4)
            out.append(Outcome(f"meet/{kind}/{cone.value}", _status(ok), res, "C5 -> K3 x K4"))
        except ConicHomError as exc:
            out.append(Outcome(f"meet/{kind}/{cone.value}", FAIL, math.inf, str(exc)))
        try:
            join = hm.disjoint_union_witness(w53, w43)
            res = join.residuals.worst(join.mode)
            out.append(Outcome(f"union/{kind}/{cone.value}", _status(res <= 1e-6), res,
                               f"C5 + C4 -> K3, cone violation {join.residuals.cone_dev:.3e}"))
        except ConicHomError as exc:
            out.append(Outcome(f"union/{kind}/{cone.value}", FAIL, math.inf, str(exc)))
    return out


def suite_alpha(ctx) -> list:
    out = []
    for name, g in corpus(ctx["seed"], ctx["max_size"]):
        for cone in ALL_CONES:
            key = f"{name}/{cone.value}"
            try:
                rep = hm.conic_alpha_report(g, cone, hm.STRONG)
            except InconclusiveError as exc:
                failed = "disagree" in str(exc)
                out.append(Outcome(key, FAIL if failed else INCONCLUSIVE, 0.0, f"{exc} {exc.diagnostics}"))
                continue
            out.append(Outcome(key, PASS, 0.0,
                               f"theta {rep['theta']:.9g}, search {rep['by_search']}"))
    return out


def suite_degeneracy(ctx) -> list:
    out = []
    k2 = complete(2)
    graphs = [(name, g) for name, g in corpus(ctx["seed"], ctx["max_size"]) if 2 <= g.n <= 6]
    graphs += [(f"K{n}", complete(n)) for n in range(2, 7)]
    for name, g in graphs:
        h = hm.degenerate_weak_splus_witness(g.n)
        r = hm.hom_residuals(h, g, k2, ConeTag.SPLUS)
        res = max(r.block_sum_dev, r.ortho_dev, r.cone_dev)
        out.append(Outcome(f"{name}->K2", _status(res <= 1e-9), res,
                           f"n={g.n}, chromatic number {chi_exact(g)}"))
    return out


def _random_psd(rng, d):
    g = rng.standard_normal((d, d + 1))
    m = g @ g.T
    return m / np.trace(m)


def _random_dnn(rng, d):
    b = rng.random((d, d + 1))
    m = b @ b.T
    return m / np.trace(m)


def suite_frabjous(ctx, count: int = 200) -> list:
    out = []
    rng = np.random.default_rng(ctx["seed"])
    for cone, gen in (("psd", _random_psd), ("dnn", _random_dnn)):
        for op in ("contract", "kron", "submatrix", "permute"):
            worst = 0.0
            worst_neg = 0.0
            for _ in range(count):
                d = int(rng.integers(2, 7))
                a = gen(rng, d)
                if op == "contract":
                    labels = rng.integers(0, int(rng.integers(1, d + 1)), size=d)
                    blocks = [np.nonzero(labels == k)[0].tolist() for k in np.unique(labels)]
                    r = contract(a, blocks).data
                elif op == "kron":
                    r = kron(a, gen(rng, int(rng.integers(2, 5)))).data
                elif op == "submatrix":
                    k = int(rng.integers(1, d + 1))
                    r = principal_submatrix(a, sorted(rng.choice(d, k, replace=False).tolist())).data
                else:
                    r = permute(a, rng.permutation(d).tolist()).data
                worst = min(worst, min_eigenvalue(r))
                worst_neg = min(worst_neg, float(r.min()))
            ok = worst >= -1e-9 and (cone == "psd" or worst_neg >= 0.0)
            out.append(Outcome(f"{op}/{cone}", _status(ok), max(0.0, -worst),
                               f"{count} instances, min eigenvalue {worst:.3e}"))
    return out


def suite_curious(ctx) -> list:
    """Where theta equals the clique cover number, the cover witness for
    ``K_k -> complement`` validates and the conic independence number is ``k``."""
    out = []
    for name, g in corpus(ctx["seed"], ctx["max_size"]):
        k = chi_exact(complement(g))
        for cone in CONIC:
            th = cached_theta(g, cone)
            if abs(th.value - k) > 1e-6:
                continue
            w = hm.clique_cover_witness(th.solution, g, cone=cone)
            res = w.residuals.worst(hm.STRONG)
            ok = res <= 1e-6 and alpha_exact(g) == k
            out.append(Outcome(f"{name}/{cone.value}", _status(ok), res, f"k={k}"))
    return out


def suite_weakhom2alpha(ctx) -> list:
    out = []
    for (nx_, x), (ny_, y) in _pairs(ctx, max_product=20):
        d = cached_decision(x, y, ConeTag.DNN, hm.WEAK)
        if d.verdict != hm.YES:
            continue
        w = hm.weak_alpha_embedding(d.witness)
        res = w.residuals.worst(hm.WEAK)
        out.append(Outcome(f"{nx_}->{ny_}", _status(res <= 1e-6), res, "weak DNN embedding"))
    return out


SUITES: dict[str, Callable] = {
    "golden": suite_golden,
    "thm:thetas": suite_thetas,
    "hom2theta": suite_hom2theta,
    "dnnequiv": suite_dnnequiv,
    "monotonicity": suite_monotonicity,
    "multiplicativity": suite_multiplicativity,
    "lattice": suite_lattice,
    "alpha": suite_alpha,
    "degeneracy": suite_degeneracy,
    "frabjous": suite_frabjous,
    "curious": suite_curious,
    "weakhom2alpha": suite_weakhom2alpha,
}


def run_suite(name: str, seed: int = DEFAULT_SEED, max_size: int = 10,
              ctx: Optional[dict] = None) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    ctx = ctx if ctx is not None else {}
    ctx.setdefault("seed", seed)
    ctx.setdefault("max_size", max_size)
    t0 = time.perf_counter()
    outcomes = SUITES[name](ctx)
    outcomes.sort(key=lambda o: o.key)
    return SuiteResult(name, outcomes, time.perf_counter() - t0)


def _run_named(args):
    name, seed, max_size = args
    return run_suite(name, seed, max_size)


def run_verification(names=None, seed: int = DEFAULT_SEED, max_size: int = 10,
                     workers: int = 1) -> VerificationReport:
    """Run the named suites (all by default). With ``workers > 1`` suites run
    in separate processes and do not share the solver cache."""
    names = list(SUITES) if names in (None, "all", ["all"]) else list(names)
    for n in names:
        if n not in SUITES:
            raise KeyError(f"unknown suite {n!r}; choose from {', '.join(SUITES)}")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_named, [(n, seed, max_size) for n in names]))
    else:
        results = [run_suite(n, seed, max_size) for n in names]
    return VerificationReport(results)
