"""Primal-dual interior-point method for small dense linear conic programs.

Standard form, over a product of PSD blocks and one nonnegative orthant::

    minimize    sum_b <C_b, X_b> + c . x
    subject to  sum_b <A_kb, X_b> + a_k . x = b_k      (k = 1..m)
                X_b PSD,  x >= 0

with dual ``maximize b.y  s.t.  C - A^T y = Z`` in the same cone.

The iteration is Mehrotra predictor-corrector on the Nesterov-Todd direction
with a dense Schur complement. Each block is scaled through
``X = L L^T``, ``L^T Z L = U D U^T``, ``G = L U D^(-1/4)`` so that
``G^-1 X G^-T = G^T Z G = D^(1/2)`` is diagonal and ``W = G G^T`` is the NT
scaling point.
"""

from __future__ import annotations

import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .errors import CapabilityError, ParameterError

DEFAULT_MAX_PSD_DIM = 400
OPTIMAL = "optimal"
INFEASIBLE = "infeasible-certificate"
NUMERICAL_FAILURE = "numerical-failure"
ITERATION_LIMIT = "iteration-limit"
NEAR_OPTIMAL = "near-optimal"
NEAR_FACTOR = 100.0


def max_psd_dim() -> int:
    env = os.environ.get("CONICHOM_MAX_PSD_DIM")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ParameterError(f"CONICHOM_MAX_PSD_DIM must be an integer, got {env!r}")
    return DEFAULT_MAX_PSD_DIM


@dataclass(frozen=True)
class SolverOptions:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    max_iter: int = 200
    step: float = 0.98
    verbose: bool = False

    def __post_init__(self):
        if self.feas_tol <= 0 or self.gap_tol <= 0 or self.max_iter <= 0:
            raise ParameterError("solver tolerances and iteration limit must be positive")


@dataclass(frozen=True)
class ConicProgram:
    """A linear conic program in the standard form above.

    ``psd_rows[b]`` is a sparse ``m x d_b^2`` matrix acting on the row-major
    vectorisation of ``X_b``; each row is the vectorisation of a symmetric
    coefficient matrix. Use :class:`ProgramBuilder` rather than filling these
    in directly.
    """

    psd_dims: tuple
    lp_dim: int
    psd_rows: tuple
    lp_rows: sp.csr_matrix
    rhs: np.ndarray
    psd_objective: tuple
    lp_objective: np.ndarray
    sense: str = "min"
    offset: float = 0.0

    def __post_init__(self):
        m = self.rhs.shape[0]
        if self.sense not in ("min", "max"):
            raise ParameterError(f"sense must be 'min' or 'max', got {self.sense!r}")
        if len(self.psd_rows) != len(self.psd_dims) or len(self.psd_objective) != len(self.psd_dims):
            raise ParameterError("block count mismatch between dimensions, constraints and objective")
        for d, rows, obj in zip(self.psd_dims, self.psd_rows, self.psd_objective):
            if rows.shape != (m, d * d):
                raise ParameterError(f"constraint block has shape {rows.shape}, expected {(m, d * d)}")
            if obj.shape != (d, d):
                raise ParameterError(f"objective block has shape {obj.shape}, expected {(d, d)}")
            if np.abs(obj - obj.T).max(initial=0.0) > 1e-12 * max(1.0, np.abs(obj).max(initial=0.0)):
                raise ParameterError("objective block is not symmetric")
        if self.lp_rows.shape != (m, self.lp_dim):
            raise ParameterError(f"orthant constraint block has shape {self.lp_rows.shape}")
        if self.lp_objective.shape != (self.lp_dim,):
            raise ParameterError("orthant objective has the wrong length")

    @property
    def num_constraints(self) -> int:
        return self.rhs.shape[0]

    def apply(self, xs: Sequence[np.ndarray], x_lp: np.ndarray) -> np.ndarray:
        """``A(X)``."""
        out = self.lp_rows @ x_lp if self.lp_dim else np.zeros(self.num_constraints)
        for rows, xb in zip(self.psd_rows, xs):
            out = out + rows @ xb.ravel()
        return out

    def adjoint(self, y: np.ndarray):
        """``A^T y`` as (list of PSD blocks, orthant vector)."""
        blocks = [(rows.T @ y).reshape(d, d) for d, rows in zip(self.psd_dims, self.psd_rows)]
        return blocks, (self.lp_rows.T @ y if self.lp_dim else np.zeros(0))

    def objective_value(self, xs, x_lp) -> float:
        val = sum(float(np.vdot(c, x)) for c, x in zip(self.psd_objective, xs))
        if self.lp_dim:
            val += float(self.lp_objective @ x_lp)
        return val


class ProgramBuilder:
    """Incremental construction of a :class:`ConicProgram`.

    Constraint terms are ``(block, i, j, value)`` meaning ``value * X_b[i, j]``
    (the entry, not the symmetric pair) and ``("lp", k, value)`` meaning
    ``value * x[k]``.
    """

    def __init__(self):
        self.psd_dims: list[int] = []
        self.lp_dim = 0
        self._psd_entries: list[tuple[list, list, list]] = []
        self._lp_entries: tuple[list, list, list] = ([], [], [])
        self._rhs: list[float] = []
        self._psd_obj: list[np.ndarray] = []
        self._lp_obj: list[float] = []

    def add_psd_block(self, dim: int) -> int:
        if dim <= 0:
            raise ParameterError("PSD block dimension must be positive")
        self.psd_dims.append(int(dim))
        self._psd_entries.append(([], [], []))
        self._psd_obj.append(np.zeros((dim, dim)))
        return len(self.psd_dims) - 1

    def add_nonneg(self, count: int) -> int:
        start = self.lp_dim
        self.lp_dim += int(count)
        self._lp_obj.extend([0.0] * int(count))
        return start

    def add_constraint(self, psd_terms=(), lp_terms=(), rhs: float = 0.0) -> int:
        row = len(self._rhs)
        for b, i, j, v in psd_terms:
            d = self.psd_dims[b]
            if not (0 <= i < d and 0 <= j < d):
                raise ParameterError(f"entry ({i}, {j}) outside block {b} of size {d}")
            rr, cc, vv = self._psd_entries[b]
            if i == j:
                rr.append(row)
                cc.append(i * d + i)
                vv.append(float(v))
            else:
                rr.extend((row, row))
                cc.extend((i * d + j, j * d + i))
                vv.extend((0.5 * v, 0.5 * v))
        rr, cc, vv = self._lp_entries
        for k, v in lp_terms:
            if not 0 <= k < self.lp_dim:
                raise ParameterError(f"orthant index {k} out of range")
            rr.append(row)
            cc.append(k)
            vv.append(float(v))
        self._rhs.append(float(rhs))
        return row

    def set_psd_objective(self, block: int, matrix) -> None:
        c = np.array(matrix, dtype=float)
        self._psd_obj[block] = 0.5 * (c + c.T)

    def set_lp_objective(self, k: int, value: float) -> None:
        self._lp_obj[k] = float(value)

    def build(self, sense: str = "min", offset: float = 0.0) -> ConicProgram:
        m = len(self._rhs)
        rows = []
        for d, (rr, cc, vv) in zip(self.psd_dims, self._psd_entries):
            rows.append(sp.csr_matrix((vv, (rr, cc)), shape=(m, d * d)))
        rr, cc, vv = self._lp_entries
        lp = sp.csr_matrix((vv, (rr, cc)), shape=(m, self.lp_dim))
        return ConicProgram(
            psd_dims=tuple(self.psd_dims),
            lp_dim=self.lp_dim,
            psd_rows=tuple(rows),
            lp_rows=lp,
            rhs=np.array(self._rhs, dtype=float),
            psd_objective=tuple(self._psd_obj),
            lp_objective=np.array(self._lp_obj, dtype=float),
            sense=sense,
            offset=float(offset),
        )


@dataclass
class SolveReport:
    status: str
    primal_value: float
    dual_value: float
    gap: float
    primal_feas: float
    dual_feas: float
    iterations: int
    psd_solution: list = field(default_factory=list)
    lp_solution: np.ndarray = field(default_factory=lambda: np.zeros(0))
    dual_solution: np.ndarray = field(default_factory=lambda: np.zeros(0))
    psd_dual_slack: list = field(default_factory=list)
    lp_dual_slack: np.ndarray = field(default_factory=lambda: np.zeros(0))
    certificate: Optional[np.ndarray] = None
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL

    @property
    def usable(self) -> bool:
        """Optimal, or the best iterate is within ``NEAR_FACTOR`` of the tolerances."""
        return self.status in (OPTIMAL, NEAR_OPTIMAL)


# -- helpers --------------------------------------------------------------------

def _sym(a):
    return 0.5 * (a + a.T)


def _finite(*parts) -> bool:
    for part in parts:
        items = part if isinstance(part, list) else [part]
        if not all(np.all(np.isfinite(a)) for a in items):
            return False
    return True


def _max_step(x_chol, dx) -> float:
    """Largest ``alpha`` with ``X + alpha dX`` PSD, given ``X = L L^T``."""
    t = sla.solve_triangular(x_chol, dx, lower=True)
    t = sla.solve_triangular(x_chol, t.T, lower=True)
    lam = np.linalg.eigvalsh(_sym(t))[0]
    return math.inf if lam >= 0 else -1.0 / lam


def _max_step_lp(x, dx) -> float:
    neg = dx < 0
    if not np.any(neg):
        return math.inf
    return float(np.min(-x[neg] / dx[neg]))


class _Block:
    """NT scaling data for one PSD block."""

    def __init__(self, x, z):
        self.lx = np.linalg.cholesky(x)
        s = _sym(self.lx.T @ z @ self.lx)
        d, u = np.linalg.eigh(s)
        d = np.maximum(d, 1e-300)
        self.lam = np.sqrt(d)
        self.g = self.lx @ (u * d ** -0.25)
        self.g_inv = (u * d ** 0.25).T @ sla.solve_triangular(self.lx, np.eye(x.shape[0]), lower=True)
        self.w = self.g @ self.g.T
        self.lz = np.linalg.cholesky(z)

    def complementarity_rhs(self, target, dx=None, dz=None):
        """``G L_V^{-1}(target I - V^2 - sym(dX^ dZ^)) G^T``."""
        rhs = -np.diag(self.lam ** 2)
        rhs[np.diag_indices_from(rhs)] += target
        if dx is not None:
            sx = self.g_inv @ dx @ self.g_inv.T
            sz = self.g.T @ dz @ self.g
            rhs -= _sym(sx @ sz)
        lyap = 2.0 * rhs / (self.lam[:, None] + self.lam[None, :])
        return self.g @ lyap @ self.g.T


def _schur_psd(rows: sp.csr_matrix, w: np.ndarray) -> np.ndarray:
    d = w.shape[0]
    m = rows.shape[0]
    if d <= 48:
        t = rows @ np.kron(w, w)
        return np.asarray((rows @ t.T).T)
    csc = rows.tocsr()
    out = np.empty((m, d * d))
    for k in range(m):
        start, stop = csc.indptr[k], csc.indptr[k + 1]
        idx = csc.indices[start:stop]
        vals = csc.data[start:stop]
        r, c = np.divmod(idx, d)
        out[k] = ((w[:, r] * vals) @ w[c, :]).ravel()
    return np.asarray((rows @ out.T).T)


def _factor(m: np.ndarray):
    diag = np.abs(np.diag(m))
    scale = float(diag.max()) if diag.size else 1.0
    reg = 0.0
    for _ in range(8):
        try:
            return sla.cho_factor(m + reg * np.eye(m.shape[0]), lower=True, check_finite=False), reg
        except (np.linalg.LinAlgError, sla.LinAlgError):
            reg = max(reg * 100.0, 1e-14 * max(scale, 1.0))
    return None, reg


def _independent_rows(p: ConicProgram):
    """Rows to keep, plus a certificate ``y`` with ``A^T y = 0, b.y = -1`` when
    the dependent rows are inconsistent."""
    parts = list(p.psd_rows)
    if p.lp_dim:
        parts.append(p.lp_rows)
    a = sp.hstack(parts).tocsr() if parts else sp.csr_matrix((p.num_constraints, 0))
    m = a.shape[0]
    if m == 0:
        return np.arange(0), None
    gram = (a @ a.T).toarray()
    try:
        c = np.linalg.cholesky(gram)
        if np.min(np.diag(c)) > 1e-9 * max(1.0, np.sqrt(np.max(np.diag(gram)))):
            return np.arange(m), None
    except np.linalg.LinAlgError:
        pass
    dense = a.toarray()
    _, r, piv = sla.qr(dense.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = 1e-9 * max(1.0, diag[0] if diag.size else 1.0)
    rank = int(np.sum(diag > tol))
    keep = np.sort(piv[:rank])
    drop = np.sort(piv[rank:])
    # express dropped rows in terms of kept ones; inconsistency gives a certificate
    coeffs, *_ = np.linalg.lstsq(dense[keep].T, dense[drop].T, rcond=None)
    mismatch = p.rhs[drop] - coeffs.T @ p.rhs[keep]
    bad = np.argmax(np.abs(mismatch)) if drop.size else 0
    if drop.size and abs(mismatch[bad]) > 1e-9 * max(1.0, np.abs(p.rhs).max()):
        y = np.zeros(m)
        y[drop[bad]] = 1.0
        y[keep] = -coeffs[:, bad]
        y /= -(p.rhs @ y)
        return keep, y
    return keep, None


def _restrict(p: ConicProgram, keep: np.ndarray) -> ConicProgram:
    return ConicProgram(
        psd_dims=p.psd_dims,
        lp_dim=p.lp_dim,
        psd_rows=tuple(r[keep] for r in p.psd_rows),
        lp_rows=p.lp_rows[keep],
        rhs=p.rhs[keep],
        psd_objective=p.psd_objective,
        lp_objective=p.lp_objective,
        sense=p.sense,
        offset=p.offset,
    )


def _check_caps(p: ConicProgram):
    total = sum(p.psd_dims)
    cap = max_psd_dim()
    if total > cap:
        raise CapabilityError(f"total PSD dimension {total} exceeds cap {cap} (CONICHOM_MAX_PSD_DIM)")


# -- main loop -------------------------------------------------------------------

def solve(p: ConicProgram, opts: Optional[SolverOptions] = None, **kwargs) -> SolveReport:
    """Solve ``p``. Slow progress is reported through ``status``, not raised."""
    if opts is None:
        opts = SolverOptions(**kwargs)
    elif kwargs:
        raise ParameterError("pass either an options object or keyword options, not both")
    _check_caps(p)
    keep, cert = _independent_rows(p)
    if cert is not None:
        return SolveReport(INFEASIBLE, math.inf, math.inf, math.inf, math.inf, 0.0, 0,
                           certificate=cert, message="inconsistent linear constraints")
    full_m = p.num_constraints
    reduced = p if keep.size == full_m else _restrict(p, keep)
    report = _ipm(reduced, opts)
    if keep.size != full_m:
        y = np.zeros(full_m)
        y[keep] = report.dual_solution
        report.dual_solution = y
        if report.certificate is not None:
            c = np.zeros(full_m)
            c[keep] = report.certificate
            report.certificate = c
    return report


def _ipm(p: ConicProgram, opts: SolverOptions) -> SolveReport:
    sign = -1.0 if p.sense == "max" else 1.0
    cs = [sign * c for c in p.psd_objective]
    c_lp = sign * p.lp_objective
    b = p.rhs
    m = b.shape[0]
    dims = p.psd_dims
    nu = sum(dims) + p.lp_dim
    out = sys.stderr

    # starting point
    norm_b = np.linalg.norm(b)
    norm_c = math.sqrt(sum(float(np.sum(c * c)) for c in cs) + float(c_lp @ c_lp))
    xs, zs = [], []
    for d, rows, c in zip(dims, p.psd_rows, cs):
        row_norms = np.sqrt(np.asarray(rows.multiply(rows).sum(axis=1)).ravel())
        xi = max(10.0, math.sqrt(d), d * float(np.max((1.0 + np.abs(b)) / (1.0 + row_norms), initial=0.0)))
        eta = max(10.0, math.sqrt(d), float(row_norms.max(initial=0.0)), float(np.linalg.norm(c)))
        xs.append(xi * np.eye(d))
        zs.append(eta * np.eye(d))
    if p.lp_dim:
        lp_norms = np.sqrt(np.asarray(p.lp_rows.multiply(p.lp_rows).sum(axis=0)).ravel())
        xi = max(10.0, float(np.max((1.0 + np.abs(b)).max() / (1.0 + lp_norms), initial=1.0)))
        eta = max(10.0, float(np.abs(c_lp).max(initial=0.0)), float(lp_norms.max(initial=0.0)))
        x = np.full(p.lp_dim, xi)
        z = np.full(p.lp_dim, eta)
    else:
        x = z = np.zeros(0)
    y = np.zeros(m)
    lp_t = p.lp_rows.T.tocsr()

    def residuals(xs, x, y, zs, z):
        rp = b - p.apply(xs, x)
        aty, aty_lp = p.adjoint(y)
        rds = [c - a - zz for c, a, zz in zip(cs, aty, zs)]
        rd_lp = c_lp - aty_lp - z if p.lp_dim else np.zeros(0)
        return rp, rds, rd_lp

    status = ITERATION_LIMIT
    message = ""
    certificate = None
    it = 0
    prev_pinf = prev_dinf = math.inf
    stall = 0
    best = None
    best_score = math.inf
    for it in range(1, opts.max_iter + 1):
        rp, rds, rd_lp = residuals(xs, x, y, zs, z)
        pobj = sum(float(np.vdot(c, xx)) for c, xx in zip(cs, xs)) + (float(c_lp @ x) if p.lp_dim else 0.0)
        dobj = float(b @ y)
        mu = (sum(float(np.vdot(xx, zz)) for xx, zz in zip(xs, zs)) + float(x @ z)) / max(nu, 1)
        pinf = np.linalg.norm(rp) / (1.0 + norm_b)
        dinf = math.sqrt(sum(float(np.sum(r * r)) for r in rds) + float(rd_lp @ rd_lp)) / (1.0 + norm_c)
        rel_gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        if opts.verbose:
            print(f"it {it:3d}  pobj {sign * pobj: .10e}  dobj {sign * dobj: .10e}  "
                  f"pinf {pinf:.2e}  dinf {dinf:.2e}  gap {rel_gap:.2e}  mu {mu:.2e}", file=out)
        if pinf <= opts.feas_tol and dinf <= opts.feas_tol and rel_gap <= opts.gap_tol:
            status = OPTIMAL
            break
        score = max(pinf / opts.feas_tol, dinf / opts.feas_tol, rel_gap / opts.gap_tol)
        if score < best_score:
            best_score = score
            best = ([xx.copy() for xx in xs], x.copy(), y.copy(), [zz.copy() for zz in zs], z.copy())
        # infeasibility detection from diverging iterates
        aty, aty_lp = p.adjoint(y)
        if dobj > 0:
            ray = math.sqrt(sum(float(np.sum((a + zz) ** 2)) for a, zz in zip(aty, zs))
                            + float(np.sum((aty_lp + z) ** 2)))
            if ray / dobj < opts.feas_tol and dobj > 1e6:
                status = INFEASIBLE
                certificate = -y / dobj
                message = "primal infeasible"
                break
        if pobj < 0:
            ray = np.linalg.norm(p.apply(xs, x))
            if ray / -pobj < opts.feas_tol and -pobj > 1e6:
                status = INFEASIBLE
                message = "dual infeasible (primal unbounded)"
                break

        try:
            blocks = [_Block(xx, zz) for xx, zz in zip(xs, zs)]
        except np.linalg.LinAlgError:
            status = NUMERICAL_FAILURE
            message = "lost positive definiteness"
            break
        schur = np.zeros((m, m))
        for rows, blk in zip(p.psd_rows, blocks):
            schur += _schur_psd(rows, blk.w)
        if p.lp_dim:
            ratio = x / z
            schur += (p.lp_rows.multiply(ratio[None, :]) @ lp_t).toarray()
        schur = _sym(schur)
        factor, reg = _factor(schur)
        if factor is None:
            status = NUMERICAL_FAILURE
            message = "Schur complement is singular"
            break

        def direction(rcs, rc_lp):
            h = rp.copy()
            for rows, blk, rc, rd in zip(p.psd_rows, blocks, rcs, rds):
                h -= rows @ (rc - blk.w @ rd @ blk.w).ravel()
            if p.lp_dim:
                h -= p.lp_rows @ (rc_lp - ratio * rd_lp)
            dy = sla.cho_solve(factor, h, check_finite=False)
            aty, aty_lp = p.adjoint(dy)
            dzs = [_sym(rd - a) for rd, a in zip(rds, aty)]
            dxs = [_sym(rc - blk.w @ dz @ blk.w) for rc, blk, dz in zip(rcs, blocks, dzs)]
            if p.lp_dim:
                dz_lp = rd_lp - aty_lp
                dx_lp = rc_lp - ratio * dz_lp
            else:
                dz_lp = dx_lp = np.zeros(0)
            return dxs, dx_lp, dy, dzs, dz_lp

        def steps(dxs, dx_lp, dzs, dz_lp):
            ap = min([_max_step(blk.lx, dx) for blk, dx in zip(blocks, dxs)]
                     + [_max_step_lp(x, dx_lp) if p.lp_dim else math.inf])
            ad = min([_max_step(blk.lz, dz) for blk, dz in zip(blocks, dzs)]
                     + [_max_step_lp(z, dz_lp) if p.lp_dim else math.inf])
            return ap, ad

        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            # predictor
            rcs = [-xx for xx in xs]
            rc_lp = -x
            dxs, dx_lp, dy, dzs, dz_lp = direction(rcs, rc_lp)
            if not _finite(dxs, dzs, dy, dx_lp, dz_lp):
                status = NUMERICAL_FAILURE
                message = "non-finite predictor direction"
                break
            ap, ad = steps(dxs, dx_lp, dzs, dz_lp)
            ap, ad = min(1.0, ap), min(1.0, ad)
            mu_aff = (sum(float(np.vdot(xx + ap * dx, zz + ad * dz)) for xx, dx, zz, dz in zip(xs, dxs, zs, dzs))
                      + float((x + ap * dx_lp) @ (z + ad * dz_lp))) / max(nu, 1)
            sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3 if mu > 0 else 0.0

            # corrector
            target = sigma * mu
            rcs = [blk.complementarity_rhs(target, dx, dz) for blk, dx, dz in zip(blocks, dxs, dzs)]
            if p.lp_dim:
                rc_lp = (target - x * z - dx_lp * dz_lp) / z
            dxs, dx_lp, dy, dzs, dz_lp = direction(rcs, rc_lp)
            if not _finite(dxs, dzs, dy, dx_lp, dz_lp):
                status = NUMERICAL_FAILURE
                message = "non-finite corrector direction"
                break
            ap, ad = steps(dxs, dx_lp, dzs, dz_lp)
        ap = min(1.0, opts.step * ap)
        ad = min(1.0, opts.step * ad)
        if max(ap, ad) < 1e-12:
            status = NUMERICAL_FAILURE
            message = "step length collapsed"
            break
        xs = [_sym(xx + ap * dx) for xx, dx in zip(xs, dxs)]
        zs = [_sym(zz + ad * dz) for zz, dz in zip(zs, dzs)]
        y = y + ad * dy
        if p.lp_dim:
            x = x + ap * dx_lp
            z = z + ad * dz_lp
        if mu < 1e-14 * (1.0 + abs(pobj)) and pinf > 0.9 * prev_pinf and dinf > 0.9 * prev_dinf:
            stall += 1
            if stall > 10:
                status = NUMERICAL_FAILURE
                message = "no progress near the boundary"
                break
        prev_pinf, prev_dinf = pinf, dinf

    if status in (NUMERICAL_FAILURE, ITERATION_LIMIT) and best is not None and best_score <= NEAR_FACTOR:
        # late iterations can lose accuracy; fall back to the best point seen
        xs, x, y, zs, z = best
        message = f"{status} ({message or 'no message'}); returning best iterate"
        status = NEAR_OPTIMAL
    rp, rds, rd_lp = residuals(xs, x, y, zs, z)
    pobj = sum(float(np.vdot(c, xx)) for c, xx in zip(cs, xs)) + (float(c_lp @ x) if p.lp_dim else 0.0)
    dobj = float(b @ y)
    pinf = np.linalg.norm(rp) / (1.0 + norm_b)
    dinf = math.sqrt(sum(float(np.sum(r * r)) for r in rds) + float(rd_lp @ rd_lp)) / (1.0 + norm_c)
    rel_gap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
    if opts.verbose:
        print(f"status {status} after {it} iterations {message}", file=out)
    return SolveReport(
        status=status,
        primal_value=sign * pobj + p.offset,
        dual_value=sign * dobj + p.offset,
        gap=rel_gap,
        primal_feas=pinf,
        dual_feas=dinf,
        iterations=it,
        psd_solution=xs,
        lp_solution=x,
        dual_solution=y,
        psd_dual_slack=zs,
        lp_dual_slack=z,
        certificate=certificate,
        message=message,
    )


# -- feasibility -------------------------------------------------------------------

FEASIBLE = "feasible"
INFEASIBLE_VERDICT = "infeasible"
INCONCLUSIVE = "inconclusive"


@dataclass
class FeasibilityResult:
    verdict: str
    psd_solution: list = field(default_factory=list)
    lp_solution: np.ndarray = field(default_factory=lambda: np.zeros(0))
    certificate: Optional[np.ndarray] = None
    violation: float = 0.0
    residual: float = math.inf
    report: Optional[SolveReport] = None

    @property
    def feasible(self) -> bool:
        return self.verdict == FEASIBLE


def _phase_program(p: ConicProgram) -> ConicProgram:
    """``min t  s.t.  A(X) + t r = b`` with ``r = b - A(I)``: the identity
    point with ``t = 1`` is feasible, and ``t* = 0`` iff ``p`` is feasible."""
    ident = [np.eye(d) for d in p.psd_dims]
    r = p.rhs - p.apply(ident, np.ones(p.lp_dim))
    lp_rows = sp.hstack([p.lp_rows, sp.csr_matrix(r.reshape(-1, 1))]).tocsr()
    lp_obj = np.zeros(p.lp_dim + 1)
    lp_obj[-1] = 1.0
    return ConicProgram(
        psd_dims=p.psd_dims,
        lp_dim=p.lp_dim + 1,
        psd_rows=p.psd_rows,
        lp_rows=lp_rows,
        rhs=p.rhs,
        psd_objective=tuple(np.zeros((d, d)) for d in p.psd_dims),
        lp_objective=lp_obj,
        sense="min",
    )


def constraint_residual(p: ConicProgram, xs, x_lp) -> float:
    """Max absolute equality violation plus cone violation of a candidate point."""
    eq = float(np.abs(p.apply(xs, x_lp) - p.rhs).max(initial=0.0))
    cone = 0.0
    for xb in xs:
        cone = max(cone, -float(np.linalg.eigvalsh(_sym(xb))[0]))
    if p.lp_dim:
        cone = max(cone, -float(x_lp.min()))
    return max(eq, cone)


def certificate_violation(p: ConicProgram, y: np.ndarray):
    """For ``y`` scaled to unit max-norm: (``-b.y``, cone violation of ``A^T y``).

    ``A^T y`` in the cone and ``b.y < 0`` together contradict feasibility.
    """
    scale = float(np.abs(y).max(initial=0.0))
    if scale == 0:
        return 0.0, math.inf
    y = y / scale
    blocks, lp = p.adjoint(y)
    cone = 0.0
    for blk in blocks:
        cone = max(cone, -float(np.linalg.eigvalsh(_sym(blk))[0]))
    if p.lp_dim:
        cone = max(cone, -float(lp.min()))
    return -float(p.rhs @ y), cone


def feasibility(p: ConicProgram, opts: Optional[SolverOptions] = None, **kwargs) -> FeasibilityResult:
    """Decide ``{A(X) = b, X in K}`` through the auxiliary program above.

    ``feasible`` carries a point meeting every constraint within ``feas_tol``;
    ``infeasible`` carries ``y`` with ``A^T y`` in the cone and
    ``-b.y >= 10 feas_tol``; anything in between is ``inconclusive``.
    """
    if opts is None:
        opts = SolverOptions(**kwargs)
    elif kwargs:
        raise ParameterError("pass either an options object or keyword options, not both")
    if any(np.any(c) for c in p.psd_objective) or np.any(p.lp_objective):
        raise ParameterError("feasibility expects a program with zero objective")
    _check_caps(p)
    tol = opts.feas_tol
    keep, cert = _independent_rows(p)
    if cert is not None:
        viol, cone = certificate_violation(p, cert)
        return FeasibilityResult(INFEASIBLE_VERDICT, certificate=cert, violation=viol)
    reduced = p if keep.size == p.num_constraints else _restrict(p, keep)
    phase = _phase_program(reduced)
    report = _ipm(phase, opts)
    xs = report.psd_solution
    x_lp = report.lp_solution[:-1] if report.lp_solution.size else np.zeros(0)
    residual = constraint_residual(p, xs, x_lp) if xs or p.lp_dim else math.inf
    scale = max(1.0, float(np.abs(p.rhs).max(initial=0.0)))
    if residual <= tol * scale:
        return FeasibilityResult(FEASIBLE, xs, x_lp, residual=residual, report=report)
    if report.usable and report.primal_value >= 10 * tol:
        y = np.zeros(p.num_constraints)
        y[keep] = -report.dual_solution
        viol, cone = certificate_violation(p, y)
        if viol >= 10 * tol and cone <= tol:
            return FeasibilityResult(INFEASIBLE_VERDICT, certificate=y, violation=viol,
                                     residual=residual, report=report)
    return FeasibilityResult(INCONCLUSIVE, xs, x_lp, residual=residual, report=report)
