"""The theta programs ``theta^K`` and ``Theta^K`` over the cones CP, DNN and S+.

``theta^K(G)``::

    maximize <M, J>  s.t.  tr M = 1,  M_xx' = 0 for x ~ x',  M in K

``Theta^K(G)``::

    minimize t  s.t.  N_xx = t,  N_xx' = 0 for x ~ x',  N - J PSD,  N in K

For S+ these are Lovasz's theta and the theta of the complement, for DNN the
Schrijver and (complemented) Szegedy variants. The CP values are the
independence number and the fractional chromatic number; they are computed
combinatorially and never handed to the conic solver.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NumericalError, ParameterError, PreconditionError
from .exact import exact_cover_weights, fractional_colouring, maximum_independent_set
from .graph import Graph, automorphisms, DEFAULT_AUTOMORPHISM_LIMIT
from .linalg import SymMatrix, as_array, dnn_violation, permute, psd_violation
from .solver import ConicProgram, ProgramBuilder, SolveReport, SolverOptions, solve


class ConeTag(enum.Enum):
    CP = "cp"
    DNN = "dnn"
    SPLUS = "splus"

    @property
    def rank(self) -> int:
        """Position in the inclusion chain CP < DNN < S+."""
        return _RANK[self]

    @property
    def nonnegative(self) -> bool:
        return self is not ConeTag.SPLUS

    def __le__(self, other: "ConeTag") -> bool:
        return self.rank <= other.rank

    def __lt__(self, other: "ConeTag") -> bool:
        return self.rank < other.rank

    @classmethod
    def parse(cls, text) -> "ConeTag":
        if isinstance(text, ConeTag):
            return text
        key = str(text).strip().lower().replace("+", "plus").replace("s_plus", "splus")
        for tag in cls:
            if tag.value == key or tag.name.lower() == key:
                return tag
        raise ParameterError(f"unknown cone {text!r}; expected one of cp, dnn, splus")


_RANK = {ConeTag.CP: 0, ConeTag.DNN: 1, ConeTag.SPLUS: 2}

THETA = "theta"
BIG_THETA = "big_theta"


@dataclass(frozen=True)
class ThetaResult:
    value: float
    solution: SymMatrix
    cone: ConeTag
    kind: str
    report: Optional[SolveReport] = None
    provenance: str = "conic-solver"

    @property
    def gap(self) -> float:
        return 0.0 if self.report is None else float(self.report.gap)

    @property
    def attained(self) -> bool:
        return self.report is None or self.report.usable

    def to_json(self) -> dict:
        return {"parameter": self.kind, "cone": self.cone.value, "value": self.value,
                "gap": self.gap, "attained": self.attained}


def cone_violation(m, cone: ConeTag) -> float:
    """Distance-like violation of membership in ``cone``.

    CP membership is not numerically decidable; the DNN violation (a
    necessary condition) is reported for it, and CP matrices produced here
    are CP by construction.
    """
    cone = ConeTag.parse(cone)
    if cone is ConeTag.SPLUS:
        return psd_violation(m)
    return dnn_violation(m)


# -- program builders -------------------------------------------------------------

def theta_program(g: Graph, cone) -> ConicProgram:
    """``theta^K`` as a maximisation over one PSD block (plus, for DNN,
    one slack per non-adjacent pair)."""
    cone = ConeTag.parse(cone)
    if cone is ConeTag.CP:
        raise ParameterError("the CP program is not solved numerically")
    n = g.n
    pb = ProgramBuilder()
    blk = pb.add_psd_block(n)
    pb.add_constraint(psd_terms=[(blk, i, i, 1.0) for i in range(n)], rhs=1.0)
    for u, v in g.sorted_edges():
        pb.add_constraint(psd_terms=[(blk, u, v, 1.0)], rhs=0.0)
    if cone is ConeTag.DNN:
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if not g.adj[u, v]]
        s0 = pb.add_nonneg(len(pairs))
        for k, (u, v) in enumerate(pairs):
            pb.add_constraint(psd_terms=[(blk, u, v, 1.0)], lp_terms=[(s0 + k, -1.0)], rhs=0.0)
    pb.set_psd_objective(blk, np.ones((n, n)))
    return pb.build("max")


def big_theta_program(g: Graph, cone) -> ConicProgram:
    """``Theta^K`` in the variable ``P = N - J``, which is PSD exactly when
    ``N - J`` is, and makes ``N = P + J`` PSD for free."""
    cone = ConeTag.parse(cone)
    if cone is ConeTag.CP:
        raise ParameterError("the CP program is not solved numerically")
    n = g.n
    pb = ProgramBuilder()
    blk = pb.add_psd_block(n)
    for i in range(n - 1):
        pb.add_constraint(psd_terms=[(blk, i, i, 1.0), (blk, i + 1, i + 1, -1.0)], rhs=0.0)
    for u, v in g.sorted_edges():
        pb.add_constraint(psd_terms=[(blk, u, v, 1.0)], rhs=-1.0)
    if cone is ConeTag.DNN:
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if not g.adj[u, v]]
        s0 = pb.add_nonneg(len(pairs))
        for k, (u, v) in enumerate(pairs):
            pb.add_constraint(psd_terms=[(blk, u, v, 1.0)], lp_terms=[(s0 + k, -1.0)], rhs=-1.0)
    pb.set_psd_objective(blk, np.eye(n) / n)
    return pb.build("min", offset=1.0)


# -- evaluators ------------------------------------------------------------------

def _check_graph(g: Graph):
    if g.n == 0:
        raise ParameterError("theta programs need at least one vertex")


def _solve_or_raise(p: ConicProgram, opts: Optional[SolverOptions]) -> SolveReport:
    report = solve(p, opts or SolverOptions())
    if not report.usable:
        raise NumericalError(f"conic solver ended with status {report.status}: {report.message}")
    return report


def theta(g: Graph, cone, opts: Optional[SolverOptions] = None) -> ThetaResult:
    cone = ConeTag.parse(cone)
    _check_graph(g)
    if g.n == 1:
        return ThetaResult(1.0, SymMatrix([[1.0]]), cone, THETA, None, "single vertex")
    if cone is ConeTag.CP:
        s = maximum_independent_set(g)
        ind = np.zeros(g.n)
        ind[s] = 1.0
        m = np.outer(ind, ind) / len(s)
        return ThetaResult(float(len(s)), SymMatrix(m), cone, THETA, None,
                           "exact: maximum independent set")
    report = _solve_or_raise(theta_program(g, cone), opts)
    return ThetaResult(float(report.primal_value), SymMatrix(report.psd_solution[0]), cone, THETA, report)


def big_theta(g: Graph, cone, opts: Optional[SolverOptions] = None) -> ThetaResult:
    cone = ConeTag.parse(cone)
    _check_graph(g)
    if g.n == 1:
        return ThetaResult(1.0, SymMatrix([[1.0]]), cone, BIG_THETA, None, "single vertex")
    if cone is ConeTag.CP:
        value, weighted = fractional_colouring(g)
        cover = exact_cover_weights(g.n, weighted)
        factor = np.zeros((len(cover), g.n))
        for k, (s, w) in enumerate(cover):
            factor[k, s] = np.sqrt(value * w)
        n_mat = factor.T @ factor
        return ThetaResult(value, SymMatrix(n_mat), cone, BIG_THETA, None,
                           "exact: fractional colouring LP")
    report = _solve_or_raise(big_theta_program(g, cone), opts)
    p = report.psd_solution[0]
    return ThetaResult(float(report.primal_value), SymMatrix(p + 1.0), cone, BIG_THETA, report)


# -- feasibility checks of solutions ------------------------------------------------

def theta_residual(m, g: Graph, cone) -> float:
    """Worst violation of the ``theta^K`` constraints at ``m``."""
    a = as_array(m)
    edge = float(np.abs(a[g.adj]).max(initial=0.0))
    return max(abs(float(np.trace(a)) - 1.0), edge, cone_violation(a, cone))


def big_theta_residual(n_mat, g: Graph, cone) -> float:
    """Worst violation of the ``Theta^K`` constraints at ``n_mat``."""
    a = as_array(n_mat)
    d = a.diagonal()
    edge = float(np.abs(a[g.adj]).max(initial=0.0))
    return max(float(d.max() - d.min()), edge, cone_violation(a, cone),
               psd_violation(a - 1.0))


# -- symmetrisation and scaling ------------------------------------------------------

def symmetrize(m, g: Graph, limit: int = DEFAULT_AUTOMORPHISM_LIMIT) -> SymMatrix:
    """Average of ``P^T M P`` over the automorphism group of ``g``."""
    a = as_array(m)
    if a.shape[0] != g.n:
        raise ParameterError(f"matrix of dimension {a.shape[0]} for a graph on {g.n} vertices")
    group = automorphisms(g, limit)
    acc = np.zeros_like(a)
    for perm in group:
        acc += permute(a, perm).data
    return SymMatrix(acc / len(group))


def theta_to_big_theta_scaling(m_bar, g: Graph, tol: float = 1e-7) -> SymMatrix:
    """``N = (n^2 / t) M`` for a symmetrised ``theta`` solution of value ``t``.

    Needs constant diagonal and constant row sums (the vertex-transitive
    situation); the result then has value ``n / t``.
    """
    a = as_array(m_bar)
    n = g.n
    d = a.diagonal()
    rows = a.sum(axis=1)
    scale = max(1.0, float(np.abs(a).max(initial=0.0)))
    if float(d.max() - d.min()) > tol * scale or float(rows.max() - rows.min()) > tol * scale * n:
        raise PreconditionError("scaling needs a matrix with constant diagonal and constant row sums")
    t = float(a.sum())
    if t <= 0:
        raise PreconditionError("theta solution has nonpositive value")
    return SymMatrix((n * n / t) * a)


def big_theta_to_theta_scaling(n_mat, g: Graph, tol: float = 1e-7) -> SymMatrix:
    """``M = N / (t n)`` where ``t`` is the common diagonal value of ``N``."""
    a = as_array(n_mat)
    d = a.diagonal()
    if float(d.max() - d.min()) > tol * max(1.0, float(d.max())):
        raise PreconditionError("Theta solution does not have a constant diagonal")
    t = float(d.mean())
    if t <= 0:
        raise PreconditionError("Theta solution has nonpositive diagonal")
    return SymMatrix(a / (t * g.n))
