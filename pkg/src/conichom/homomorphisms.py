"""Conic graph homomorphisms: decision procedures and witness constructions.

A K-homomorphism matrix ``H`` for ``X -> Y`` lives in the cone ``K`` and is
indexed by ``V(X) x V(Y)`` (x-major). Writing ``H[xy, x'y']``:

1. every block ``{(x, .), (x', .)}`` sums to one;
2. ``H[xy, x'y'] = 0`` whenever ``x ~ x'`` and ``y`` is not adjacent to ``y'``
   (in particular ``y = y'``);
3. ``H[xy, xy'] = 0`` for ``y != y'``.

Strong homomorphisms satisfy all three, weak ones only the first two. Every
transformation below builds its output from kron, principal submatrix,
contraction and sums of cone elements, so the result stays in the cone; the
residual report is recomputed regardless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InconclusiveError, ParameterError, PreconditionError
from .exact import alpha_exact, chi_exact, clique_cover, omega_exact
from .graph import (Graph, VertexPairIndex, classical_homomorphism, complement, complete,
                    homomorphic_product)
from .linalg import SymMatrix, as_array, contract, kron, principal_submatrix, psd_violation
from .solver import FEASIBLE, INFEASIBLE_VERDICT, ConicProgram, ProgramBuilder, SolverOptions, feasibility
from .theta import ConeTag, cone_violation, theta

__all__ = [
    "Residuals", "HomWitness", "HomDecision", "STRONG", "WEAK",
    "hom_residuals", "make_witness", "hom_program", "decide_hom",
    "identity_witness", "lift_map_witness", "compose_witnesses",
    "repair_weak_to_strong_dnn", "categorical_meet_witness", "disjoint_union_witness",
    "hom_to_theta_witness", "theta_to_hom_witness", "rebalance",
    "monotone_transform_theta", "monotone_transform_big_theta",
    "conic_alpha", "conic_alpha_report", "lemma_gram_check",
    "degenerate_weak_splus_witness", "nonsignalling_check",
    "clique_cover_witness", "weak_alpha_embedding",
    "alpha_exact", "omega_exact", "chi_exact",
]

STRONG = "strong"
WEAK = "weak"
YES = "yes"
NO = "no"
INCONCLUSIVE = "inconclusive"

WITNESS_TOL = 1e-7
NO_MARGIN = 1e-4
YES_MARGIN = 1e-6
ALPHA_GUARD = 1e-5
SOLVER_TOL = 1e-9


def _mode(mode: str) -> str:
    m = str(mode).lower()
    if m not in (STRONG, WEAK):
        raise ParameterError(f"mode must be 'strong' or 'weak', got {mode!r}")
    return m


def _check_mode_cone(cone: ConeTag, mode: str):
    if mode == WEAK and not cone.nonnegative:
        raise ParameterError(
            "weak homomorphisms are only defined over nonnegative cones (CP, DNN); "
            "over S+ every graph maps weakly to K2, see degenerate_weak_splus_witness")


# -- residuals and witnesses -----------------------------------------------------

@dataclass(frozen=True)
class Residuals:
    block_sum_dev: float
    ortho_dev: float
    mortho_dev: float
    cone_dev: float

    def worst(self, mode: str = STRONG) -> float:
        vals = [self.block_sum_dev, self.ortho_dev, self.cone_dev]
        if _mode(mode) == STRONG:
            vals.append(self.mortho_dev)
        return max(vals)

    def passes(self, mode: str = STRONG, tol: float = WITNESS_TOL) -> bool:
        return self.worst(mode) <= tol

    def as_dict(self) -> dict:
        return {"block_sum_dev": self.block_sum_dev, "ortho_dev": self.ortho_dev,
                "mortho_dev": self.mortho_dev, "cone_dev": self.cone_dev}


def _masks(x: Graph, y: Graph):
    """Boolean ``(nx ny) x (nx ny)`` masks of the condition-2 and condition-3 positions."""
    ix = np.eye(x.n, dtype=bool)[:, None, :, None]
    ax = x.adj[:, None, :, None]
    iy = np.eye(y.n, dtype=bool)[None, :, None, :]
    ay = y.adj[None, :, None, :]
    size = x.n * y.n
    ortho = np.broadcast_to(ax & ~ay, (x.n, y.n, x.n, y.n)).reshape(size, size)
    mortho = np.broadcast_to(ix & ~iy, (x.n, y.n, x.n, y.n)).reshape(size, size)
    return ortho, mortho


def block_sums(h, nx: int, ny: int) -> np.ndarray:
    """The ``nx x nx`` contraction of ``h`` over the blocks ``{(x, .)}``."""
    return as_array(h).reshape(nx, ny, nx, ny).sum(axis=(1, 3))


def hom_residuals(h, x: Graph, y: Graph, cone) -> Residuals:
    a = as_array(h)
    size = x.n * y.n
    if a.shape != (size, size):
        raise ParameterError(f"matrix of shape {a.shape} for a {x.n} x {y.n} witness")
    ortho, mortho = _masks(x, y)
    bs = block_sums(a, x.n, y.n)
    return Residuals(
        block_sum_dev=float(np.abs(bs - 1.0).max(initial=0.0)),
        ortho_dev=float(np.abs(a[ortho]).max(initial=0.0)),
        mortho_dev=float(np.abs(a[mortho]).max(initial=0.0)),
        cone_dev=cone_violation(a, cone) if size else 0.0,
    )


@dataclass(frozen=True)
class HomWitness:
    h: SymMatrix
    x: Graph
    y: Graph
    cone: ConeTag
    mode: str
    residuals: Residuals

    def valid(self, tol: float = WITNESS_TOL) -> bool:
        return self.residuals.passes(self.mode, tol)

    @property
    def labels(self) -> VertexPairIndex:
        return VertexPairIndex(self.x.n, self.y.n)


def make_witness(h, x: Graph, y: Graph, cone, mode: str = STRONG) -> HomWitness:
    cone = ConeTag.parse(cone)
    mode = _mode(mode)
    labels = VertexPairIndex(x.n, y.n)
    m = SymMatrix(as_array(h), labels)
    return HomWitness(m, x, y, cone, mode, hom_residuals(m, x, y, cone))


@dataclass
class HomDecision:
    verdict: str
    method: str
    witness: Optional[HomWitness] = None
    certificate: Optional[object] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def exists(self) -> Optional[bool]:
        return {YES: True, NO: False}.get(self.verdict)


# -- basic witnesses ----------------------------------------------------------------

def lift_map_witness(phi: Sequence[int], x: Graph, y: Graph, cone=ConeTag.CP) -> HomWitness:
    """``H = Phi Phi^T`` with ``Phi = sum_x e_x (x) e_phi(x)`` for a classical map."""
    if len(phi) != x.n:
        raise ParameterError("map length does not match the source graph")
    v = np.zeros(x.n * y.n)
    for u, w in enumerate(phi):
        if not 0 <= w < y.n:
            raise ParameterError(f"image {w} outside the target graph")
        v[u * y.n + w] = 1.0
    return make_witness(np.outer(v, v), x, y, cone, STRONG)


def identity_witness(x: Graph, cone=ConeTag.CP) -> HomWitness:
    """The maximally entangled witness ``X -> X``; CP, hence valid for every cone."""
    return lift_map_witness(list(range(x.n)), x, x, cone)


def _same_graph(a: Graph, b: Graph, what: str):
    if a != b:
        raise ParameterError(f"{what}: graphs do not match")


def _join_cone(a: ConeTag, b: ConeTag) -> ConeTag:
    return a if a.rank >= b.rank else b


def _join_mode(w1: HomWitness, w2: HomWitness, cone: ConeTag) -> str:
    mode = STRONG if w1.mode == STRONG and w2.mode == STRONG else WEAK
    _check_mode_cone(cone, mode)
    return mode


def compose_witnesses(w1: HomWitness, w2: HomWitness) -> HomWitness:
    """``X -> Y`` and ``Y -> Z`` give ``X -> Z``:
    ``H[xz, x'z'] = sum_{y, y'} H1[xy, x'y'] H2[yz, y'z']``,
    a contraction of a principal submatrix of ``H1 (x) H2``."""
    _same_graph(w1.y, w2.x, "compose")
    cone = _join_cone(w1.cone, w2.cone)
    mode = _join_mode(w1, w2, cone)
    nx, ny, nz = w1.x.n, w1.y.n, w2.y.n
    big = kron(w1.h, w2.h)
    idx = [(x * ny + y) * (ny * nz) + y * nz + z
           for x in range(nx) for y in range(ny) for z in range(nz)]
    sub = principal_submatrix(big, idx)
    # sub is ordered (x, y, z); sum out y inside each (x, z) block
    blocks = [[(x * ny + y) * nz + z for y in range(ny)] for x in range(nx) for z in range(nz)]
    return make_witness(contract(sub, blocks), w1.x, w2.y, cone, mode)


def repair_weak_to_strong_dnn(w: HomWitness, tol: float = WITNESS_TOL) -> HomWitness:
    """Clear every in-block off-diagonal entry ``c = H[xy, xy']`` by adding
    ``c B`` with ``B = (e_xy - e_xy')(e_xy - e_xy')^T``.

    ``B`` is PSD, vanishes off the two positions' rows, and has zero block
    sum, so the result is a strong DNN witness with unchanged block sums.
    """
    if not w.cone.nonnegative:
        raise PreconditionError("repair needs a witness over a nonnegative cone")
    if not w.residuals.passes(WEAK, tol):
        raise PreconditionError(f"input is not a valid weak witness: {w.residuals.as_dict()}")
    if w.residuals.mortho_dev == 0.0:
        return make_witness(w.h, w.x, w.y, ConeTag.DNN if w.cone is ConeTag.SPLUS else w.cone, STRONG)
    h = np.array(w.h.data)
    nx, ny = w.x.n, w.y.n
    for x in range(nx):
        base = x * ny
        for a in range(ny):
            for b in range(a + 1, ny):
                i, j = base + a, base + b
                c = h[i, j]
                if c > 0:
                    h[i, i] += c
                    h[j, j] += c
                h[i, j] = h[j, i] = 0.0
    return make_witness(h, w.x, w.y, ConeTag.DNN, STRONG)


def categorical_meet_witness(w1: HomWitness, w2: HomWitness) -> HomWitness:
    """``Z -> X`` and ``Z -> Y`` give ``Z -> X x Y`` with
    ``H[z(x,y), z'(x',y')] = H1[zx, z'x'] H2[zy, z'y']``."""
    from .graph import categorical_product

    _same_graph(w1.x, w2.x, "categorical meet")
    cone = _join_cone(w1.cone, w2.cone)
    mode = _join_mode(w1, w2, cone)
    nz, nx, ny = w1.x.n, w1.y.n, w2.y.n
    big = kron(w1.h, w2.h)
    idx = [(z * nx + x) * (nz * ny) + z * ny + y
           for z in range(nz) for x in range(nx) for y in range(ny)]
    return make_witness(principal_submatrix(big, idx), w1.x,
                        categorical_product(w1.y, w2.y), cone, mode)


def disjoint_union_witness(w1: HomWitness, w2: HomWitness, tol: float = WITNESS_TOL) -> HomWitness:
    """``X -> Z`` and ``Y -> Z`` give ``X + Y -> Z`` through the block matrix
    ``[[H1, H1 J H2 / ab], [(H1 J H2)^T / ab, H2]]``."""
    from .errors import NumericalError
    from .graph import disjoint_union

    _same_graph(w1.y, w2.y, "disjoint union")
    cone = _join_cone(w1.cone, w2.cone)
    mode = _join_mode(w1, w2, cone)
    a, b = w1.x.n, w2.x.n
    h1, h2 = w1.h.data, w2.h.data
    cross = (h1.sum(axis=1)[:, None] * h2.sum(axis=0)[None, :]) / (a * b)
    h = np.block([[h1, cross], [cross.T, h2]])
    out = make_witness(h, disjoint_union(w1.x, w2.x), w1.y, cone, mode)
    if out.residuals.cone_dev > tol:
        raise NumericalError(f"joined matrix left the {cone.value} cone "
                             f"(violation {out.residuals.cone_dev:.3e})")
    return out


# -- witness polishing -------------------------------------------------------------------

def rebalance(h, nx: int, ny: int) -> np.ndarray:
    """Scale by ``D (x) I`` with ``D = diag(1/sqrt(s_xx))`` so that every
    diagonal block sums to exactly one; stays in any cone closed under
    positive diagonal congruence."""
    a = as_array(h)
    d = np.diag(block_sums(a, nx, ny))
    if np.any(d <= 0):
        raise PreconditionError("a diagonal block has nonpositive sum")
    s = np.repeat(1.0 / np.sqrt(d), ny)
    return a * s[:, None] * s[None, :]


def _polish(h, x: Graph, y: Graph, cone: ConeTag, mode: str) -> np.ndarray:
    """Zero the prescribed entries, clip tiny negatives for nonnegative cones,
    then rebalance."""
    a = np.array(as_array(h))
    ortho, mortho = _masks(x, y)
    a[ortho] = 0.0
    if mode == STRONG:
        a[mortho] = 0.0
    if cone.nonnegative:
        a = np.maximum(a, 0.0)
    return rebalance(a, x.n, y.n)


# -- hom <-> theta of the homomorphic product -----------------------------------------------

def hom_to_theta_witness(w: HomWitness) -> SymMatrix:
    """``H / |V(X)|``: trace one and value ``|V(X)|`` for theta of ``X ⋉ Y``."""
    if w.mode != STRONG:
        raise PreconditionError("only strong witnesses correspond to theta solutions")
    return SymMatrix(w.h.data / w.x.n, w.labels)


def theta_to_hom_witness(m, x: Graph, y: Graph, cone, tol: float = YES_MARGIN) -> HomWitness:
    """Turn an optimal theta solution for ``X ⋉ Y`` of value ``|V(X)|`` into a
    strong witness. Its block contraction is PSD with trace one and total
    ``|V(X)|``, which forces it to equal ``J / |V(X)|``."""
    cone = ConeTag.parse(cone)
    a = as_array(m)
    value = float(a.sum())
    if value < x.n - tol * max(1.0, x.n):
        raise PreconditionError(f"theta value {value:.9g} is short of |V(X)| = {x.n}")
    h = _polish(x.n * a, x, y, cone, STRONG)
    return make_witness(h, x, y, cone, STRONG)


# -- monotonicity transforms ------------------------------------------------------------------

def _h4(w: HomWitness) -> np.ndarray:
    return w.h.data.reshape(w.x.n, w.y.n, w.x.n, w.y.n)


def monotone_transform_theta(m, w: HomWitness) -> SymMatrix:
    """A solution ``M`` of theta of the complement of ``X`` and a strong
    witness ``X -> Y`` give ``N[y, y'] = sum_{x, x'} M[x, x'] H[xy, x'y']``,
    feasible for the complement of ``Y`` with the same value."""
    a = as_array(m)
    if w.mode != STRONG:
        raise PreconditionError("the theta transform needs a strong witness")
    if a.shape != (w.x.n, w.x.n):
        raise ParameterError("solution dimension does not match the witness source")
    return SymMatrix(np.einsum("ab,aybz->yz", a, _h4(w)))


def monotone_transform_big_theta(n_mat, w: HomWitness):
    """A ``Theta^K(Y)`` solution and a witness ``X -> Y`` give a ``Theta^K(X)``
    solution of the same value: ``M[x, x'] = sum_{y, y'} H[xy, x'y'] N[y, y']``
    topped up on the diagonal to the common value ``t``.

    Returns ``(M, t, top_up)``.
    """
    a = as_array(n_mat)
    if a.shape != (w.y.n, w.y.n):
        raise ParameterError("solution dimension does not match the witness target")
    _check_mode_cone(w.cone, w.mode)
    t = float(a.diagonal().mean())
    m = np.einsum("aybz,yz->ab", _h4(w), a)
    top = t - m.diagonal()
    m = m + np.diag(top)
    return SymMatrix(m), t, top


# -- decision procedure ----------------------------------------------------------------------

def hom_program(x: Graph, y: Graph, cone, mode: str = STRONG) -> ConicProgram:
    """Feasibility program for a ``cone`` homomorphism matrix ``X -> Y``."""
    cone = ConeTag.parse(cone)
    mode = _mode(mode)
    if cone is ConeTag.CP:
        raise ParameterError("CP homomorphisms are decided combinatorially")
    _check_mode_cone(cone, mode)
    nx, ny = x.n, y.n
    size = nx * ny
    ortho, mortho = _masks(x, y)
    zero = ortho | mortho if mode == STRONG else ortho.copy()
    pb = ProgramBuilder()
    blk = pb.add_psd_block(size)
    for a in range(nx):
        for b in range(a, nx):
            if a == b:
                # each off-diagonal pair of the diagonal block is counted twice
                terms = [(blk, a * ny + i, a * ny + j, 1.0 if i == j else 2.0)
                         for i in range(ny) for j in range(i, ny)]
            else:
                terms = [(blk, a * ny + i, b * ny + j, 1.0) for i in range(ny) for j in range(ny)]
            pb.add_constraint(psd_terms=terms, rhs=1.0)
    iu, ju = np.nonzero(np.triu(zero, 1))
    for i, j in zip(iu.tolist(), ju.tolist()):
        pb.add_constraint(psd_terms=[(blk, i, j, 1.0)], rhs=0.0)
    if cone is ConeTag.DNN:
        free = ~zero & ~np.eye(size, dtype=bool)
        iu, ju = np.nonzero(np.triu(free, 1))
        s0 = pb.add_nonneg(len(iu))
        for k, (i, j) in enumerate(zip(iu.tolist(), ju.tolist())):
            pb.add_constraint(psd_terms=[(blk, i, j, 1.0)], lp_terms=[(s0 + k, -1.0)], rhs=0.0)
    return pb.build("min")


def _direct_route(x, y, cone, mode, opts):
    res = feasibility(hom_program(x, y, cone, mode), opts)
    info = {"verdict": res.verdict, "residual": res.residual, "violation": res.violation}
    # the witness check below is the real test; the solver's own threshold is stricter
    if res.verdict == FEASIBLE or (res.verdict != INFEASIBLE_VERDICT and res.residual <= WITNESS_TOL):
        w = make_witness(_polish(res.psd_solution[0], x, y, cone, mode), x, y, cone, mode)
        info["witness_residual"] = w.residuals.worst(mode)
        if w.valid(WITNESS_TOL):
            return YES, w, None, info
        return INCONCLUSIVE, None, None, info
    if res.verdict == INFEASIBLE_VERDICT:
        return NO, None, res.certificate, info
    return INCONCLUSIVE, None, None, info


def _theta_route(x, y, cone, opts):
    prod = homomorphic_product(x, y)
    res = theta(prod, cone, opts)
    n = x.n
    info = {"theta": res.value, "target": n, "attained": res.attained,
            "note": "optimum attainment judged by tolerance"}
    if res.value >= n - YES_MARGIN * n:
        try:
            w = theta_to_hom_witness(res.solution, x, y, cone)
        except PreconditionError:
            return INCONCLUSIVE, None, info
        info["witness_residual"] = w.residuals.worst(STRONG)
        return YES, w, info
    if res.value <= n - NO_MARGIN:
        return NO, None, info
    return INCONCLUSIVE, None, info


def decide_hom(x: Graph, y: Graph, cone, mode: str = STRONG,
               opts: Optional[SolverOptions] = None) -> HomDecision:
    """Decide whether ``X`` has a (strong or weak) ``cone`` homomorphism to ``Y``.

    CP is classical homomorphism existence, found by backtracking. For DNN and
    S+ the direct feasibility program and the theta test on ``X ⋉ Y`` are both
    run and must agree; a disagreement or an undecided route gives
    ``inconclusive``. Weak DNN uses the same theta test, since weak and strong
    DNN homomorphisms coincide.
    """
    cone = ConeTag.parse(cone)
    mode = _mode(mode)
    _check_mode_cone(cone, mode)
    if x.n == 0:
        return HomDecision(YES, "trivial", make_witness(np.zeros((0, 0)), x, y, cone, mode))
    if y.n == 0:
        return HomDecision(NO, "trivial", certificate="empty target")
    if cone is ConeTag.CP:
        phi = classical_homomorphism(x, y)
        if phi is None:
            return HomDecision(NO, "combinatorial", certificate="exhaustive search")
        w = lift_map_witness(phi, x, y, ConeTag.CP)
        if mode == WEAK:
            w = make_witness(w.h, x, y, ConeTag.CP, WEAK)
        return HomDecision(YES, "combinatorial", w, diagnostics={"map": phi})
    opts = opts or SolverOptions(feas_tol=SOLVER_TOL, gap_tol=SOLVER_TOL)
    d_verdict, d_wit, cert, d_info = _direct_route(x, y, cone, mode, opts)
    t_verdict, t_wit, t_info = _theta_route(x, y, cone, opts)
    d_info["route_verdict"] = d_verdict
    t_info["route_verdict"] = t_verdict
    diag = {"direct": d_info, "theta": t_info}
    if d_verdict == t_verdict == YES:
        w = d_wit
        if x == y:
            w = identity_witness(x, cone)
            if mode == WEAK:
                w = make_witness(w.h, x, y, cone, WEAK)
        return HomDecision(YES, "direct-feasibility+theta-reduction", w, diagnostics=diag)
    if d_verdict == t_verdict == NO:
        return HomDecision(NO, "direct-feasibility+theta-reduction", certificate=cert, diagnostics=diag)
    return HomDecision(INCONCLUSIVE, "direct-feasibility+theta-reduction", diagnostics=diag)


# -- conic independence numbers -------------------------------------------------------------

def conic_alpha_report(g: Graph, cone, mode: str = STRONG,
                       opts: Optional[SolverOptions] = None) -> dict:
    """Both computations of ``alpha^K`` (``mode='strong'``) or ``alpha_K``
    (``mode='weak'``): the integer part of theta, and the largest ``n`` with
    ``K_n -> complement(g)``."""
    cone = ConeTag.parse(cone)
    mode = _mode(mode)
    _check_mode_cone(cone, mode)
    if g.n == 0:
        raise ParameterError("graph has no vertices")
    th = theta(g, cone, opts).value
    nearest = round(th)
    guarded = abs(th - nearest) <= ALPHA_GUARD
    by_theta = None if guarded else math.floor(th)
    target = complement(g)
    start = alpha_exact(g)
    n = start
    decisions = {}
    while True:
        d = decide_hom(complete(n + 1), target, cone, mode, opts) if n + 1 <= g.n else None
        if d is None:
            break
        decisions[n + 1] = d.verdict
        if d.verdict == INCONCLUSIVE:
            raise InconclusiveError(f"K_{n + 1} -> complement undecided",
                                    {"theta": th, "decisions": decisions})
        if d.verdict == NO:
            break
        n += 1
    by_search = n
    if guarded:
        ok = by_search in (nearest - 1, nearest)
    else:
        ok = by_search == by_theta
    report = {"theta": th, "by_theta": by_theta,
              "theta_candidates": [nearest - 1, nearest] if guarded else [by_theta], "by_search": by_search,
              "guarded": guarded, "decisions": decisions, "agree": ok}
    if not ok:
        raise InconclusiveError("integer part of theta and the K_n search disagree", report)
    return report


def conic_alpha(g: Graph, cone, mode: str = STRONG, opts: Optional[SolverOptions] = None) -> int:
    return conic_alpha_report(g, cone, mode, opts)["by_search"]


# -- miscellaneous constructions and checks --------------------------------------------------

def lemma_gram_check(h, nx: int, ny: int, tol: float = WITNESS_TOL) -> bool:
    """For PSD ``h``: are all block sums one, i.e. is the block contraction ``J``?"""
    a = as_array(h)
    if a.shape != (nx * ny, nx * ny):
        raise ParameterError("matrix does not match the labelling")
    if psd_violation(a) > tol * max(1.0, abs(float(np.trace(a)))):
        return False
    return bool(np.abs(block_sums(a, nx, ny) - 1.0).max(initial=0.0) <= tol)


def degenerate_weak_splus_witness(n: int, gamma: Optional[float] = None) -> SymMatrix:
    """``H = J_n (x) N / 2 + gamma I_n (x) M`` with ``M = [[1,-1],[-1,1]]`` and
    ``N = [[0,1],[1,0]]``: a weak S+ witness from any graph on ``n`` vertices
    to ``K2``.

    Its eigenvalues are ``n/2``, ``2 gamma - n/2``, ``2 gamma`` and ``0``, so
    it is PSD exactly for ``gamma >= n/4``; the default is ``max(1, n/4)``.
    """
    if n < 1:
        raise ParameterError("n must be positive")
    if gamma is None:
        gamma = max(1.0, n / 4.0)
    m = np.array([[1.0, -1.0], [-1.0, 1.0]])
    nn = np.array([[0.0, 1.0], [1.0, 0.0]])
    h = 0.5 * np.kron(np.ones((n, n)), nn) + gamma * np.kron(np.eye(n), m)
    return SymMatrix(h, VertexPairIndex(n, 2))


def nonsignalling_check(h, nx: int, ny: int, tol: float = WITNESS_TOL) -> bool:
    """Is ``sum_{y'} H[xy, x'y']`` independent of ``x'`` for every ``(x, y)``?
    By symmetry this covers both parties."""
    a = as_array(h).reshape(nx, ny, nx, ny)
    marg = a.sum(axis=3)  # indexed (x, y, x')
    spread = marg.max(axis=2) - marg.min(axis=2)
    return bool(spread.max(initial=0.0) <= tol)


def clique_cover_witness(m, g: Graph, cover=None, cone=ConeTag.SPLUS) -> HomWitness:
    """``K_k -> complement(g)`` from a theta solution ``M`` of value ``k`` and
    a cover of ``g`` by ``k`` cliques ``S_1..S_k``:
    ``H[ix, jx'] = k M[x, x']`` for ``x in S_i``, ``x' in S_j``."""
    a = as_array(m)
    if cover is None:
        cover = clique_cover(g)
    k = len(cover)
    owner = np.full(g.n, -1)
    for i, s in enumerate(cover):
        owner[list(s)] = i
    if np.any(owner < 0):
        raise ParameterError("cover does not include every vertex")
    ind = np.zeros((k, g.n))
    ind[owner, np.arange(g.n)] = 1.0
    h = k * ind[:, :, None, None] * ind[None, None, :, :] * a[None, :, None, :]
    h = h.reshape(k * g.n, k * g.n)
    target = complement(g)
    cone = ConeTag.parse(cone)
    kk = complete(k)
    h = _polish(h, kk, target, cone, STRONG)
    return make_witness(h, kk, target, cone, STRONG)


def weak_alpha_embedding(w: HomWitness) -> HomWitness:
    """From a weak witness ``X -> Y``, a weak witness
    ``K_n -> complement(X ⋉ Y)`` (``n = |V(X)|``) with
    ``H'[x1 (x2,y), x1' (x2',y')] = H[x2 y, x2' y']`` when ``x1 = x2`` and
    ``x1' = x2'``, zero otherwise."""
    nx, ny = w.x.n, w.y.n
    size = nx * ny
    idx = [x1 * size + x1 * ny + y for x1 in range(nx) for y in range(ny)]
    h = np.zeros((nx * size, nx * size))
    h[np.ix_(idx, idx)] = w.h.data
    return make_witness(h, complete(nx), complement(homomorphic_product(w.x, w.y)), w.cone, WEAK)
