"""Dense symmetric matrices and the cone-closure operations.

The operations here (principal submatrix, Kronecker product, permutation
conjugation, contraction) are the ones under which CP, DNN and PSD are all
closed; the witness constructions in :mod:`conichom.homomorphisms` are built
from them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import CapabilityError, NumericalError, ParameterError
from .graph import VertexPairIndex

DEFAULT_PSD_RTOL = 1e-8
DEFAULT_KRON_CAP = 4096
_SYM_RTOL = 1e-9


class SymMatrix:
    """Real symmetric matrix, stored exactly symmetric and read-only.

    ``labels`` optionally records that rows are pairs ``(x, y)`` in x-major
    order. Near-symmetric input (relative asymmetry below ``1e-9``) is
    symmetrised; anything worse is rejected.
    """

    __slots__ = ("data", "labels")

    def __init__(self, data, labels: Optional[VertexPairIndex] = None):
        a = np.array(data, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ParameterError(f"expected a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ParameterError("matrix has non-finite entries")
        if a.size:
            scale = max(1.0, float(np.abs(a).max()))
            if float(np.abs(a - a.T).max()) > _SYM_RTOL * scale:
                raise ParameterError("matrix is not symmetric")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        if labels is not None and labels.size != a.shape[0]:
            raise ParameterError(f"labels of size {labels.size} do not match dimension {a.shape[0]}")
        self.data = a
        self.labels = labels

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __getitem__(self, key):
        return self.data[key]

    def with_labels(self, labels: Optional[VertexPairIndex]) -> "SymMatrix":
        return SymMatrix(self.data, labels)

    def trace(self) -> float:
        return float(np.trace(self.data))

    def total(self) -> float:
        """``<M, J>``, the sum of all entries."""
        return float(self.data.sum())

    def __repr__(self):
        return f"SymMatrix(dim={self.dim}, labels={self.labels})"


def as_array(m) -> np.ndarray:
    return m.data if isinstance(m, SymMatrix) else np.asarray(m, dtype=float)


def identity(n: int) -> SymMatrix:
    return SymMatrix(np.eye(n))


def ones(n: int) -> SymMatrix:
    return SymMatrix(np.ones((n, n)))


@dataclass(frozen=True)
class Partition:
    blocks: tuple

    @classmethod
    def of(cls, blocks: Sequence[Sequence[int]]) -> "Partition":
        return cls(tuple(tuple(int(i) for i in b) for b in blocks))

    def validate(self, dim: int) -> None:
        seen = []
        for b in self.blocks:
            if not b:
                raise ParameterError("partition has an empty block")
            seen.extend(b)
        if sorted(seen) != list(range(dim)):
            raise ParameterError(f"blocks do not partition [0, {dim})")

    def indicator(self, dim: int) -> np.ndarray:
        self.validate(dim)
        s = np.zeros((dim, len(self.blocks)))
        for j, b in enumerate(self.blocks):
            s[list(b), j] = 1.0
        return s


# -- eigendecomposition -------------------------------------------------------

def _householder_tridiagonal(a: np.ndarray):
    """Orthogonal ``Q`` with ``Q.T @ a @ Q`` tridiagonal."""
    a = a.copy()
    n = a.shape[0]
    q = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1:, k]
        norm = np.linalg.norm(x)
        if norm == 0.0:
            continue
        alpha = -math.copysign(norm, x[0])
        v = x.copy()
        v[0] -= alpha
        vnorm = np.linalg.norm(v)
        if vnorm == 0.0:
            continue
        v /= vnorm
        a[k + 1:, :] -= 2.0 * np.outer(v, v @ a[k + 1:, :])
        a[:, k + 1:] -= 2.0 * np.outer(a[:, k + 1:] @ v, v)
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, v)
    d = a.diagonal().copy()
    e = np.zeros(n)
    e[:-1] = a.diagonal(1) if n > 1 else e[:-1]
    return d, e, q


def _implicit_ql(d: np.ndarray, e: np.ndarray, z: np.ndarray, max_sweeps: int):
    """Tridiagonal QL with implicit Wilkinson-type shifts, accumulating into ``z``."""
    n = d.shape[0]
    eps = np.finfo(float).eps
    total = 0
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            total += 1
            if sweeps > max_sweeps:
                raise NumericalError(
                    f"implicit QL did not converge for eigenvalue {l} after {sweeps} sweeps "
                    f"({total} in total)")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = z[:, i].copy()
                z[:, i] = c * zi - s * z[:, i + 1]
                z[:, i + 1] = s * zi + c * z[:, i + 1]
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, z


def eig_sym(m, max_sweeps: int = 60):
    """Eigenvalues (descending) and orthonormal eigenvectors (columns).

    Householder reduction to tridiagonal form followed by implicit QL;
    deterministic for a given input.
    """
    a = as_array(m)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    d, e, q = _householder_tridiagonal(a)
    d, q = _implicit_ql(d, e, q, max_sweeps)
    order = np.argsort(-d, kind="stable")
    return d[order], q[:, order]


def min_eigenvalue(m) -> float:
    a = as_array(m)
    if a.shape[0] == 0:
        return 0.0
    return float(eig_sym(a)[0][-1])


# -- cone membership -----------------------------------------------------------

def default_psd_tol(m) -> float:
    return DEFAULT_PSD_RTOL * max(1.0, abs(float(np.trace(as_array(m)))))


def is_psd(m, tol: Optional[float] = None) -> bool:
    if tol is None:
        tol = default_psd_tol(m)
    if tol < 0:
        raise ParameterError("tolerance must be nonnegative")
    return min_eigenvalue(m) >= -tol


def is_dnn(m, tol: Optional[float] = None) -> bool:
    if tol is None:
        tol = default_psd_tol(m)
    a = as_array(m)
    if a.size and float(a.min()) < -tol:
        return False
    return is_psd(a, tol)


def psd_violation(m) -> float:
    return max(0.0, -min_eigenvalue(m))


def dnn_violation(m) -> float:
    a = as_array(m)
    neg = max(0.0, -float(a.min())) if a.size else 0.0
    return max(neg, psd_violation(a))


def cp_gram_certificate(p) -> SymMatrix:
    """``P.T @ P`` for an entrywise nonnegative ``P``: a certified CP matrix
    (the Gram matrix of the columns of ``P``)."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 2:
        raise ParameterError("factor must be a 2-d array")
    if p.size and float(p.min()) < 0:
        raise ParameterError("CP certificate factor has a negative entry")
    return SymMatrix(p.T @ p)


# -- closure operations ---------------------------------------------------------

def kron(a, b, cap: int = DEFAULT_KRON_CAP) -> SymMatrix:
    aa, bb = as_array(a), as_array(b)
    dim = aa.shape[0] * bb.shape[0]
    if dim > cap:
        raise CapabilityError(f"Kronecker product of dimension {dim} exceeds cap {cap}")
    return SymMatrix(np.kron(aa, bb))


def contract(m, partition) -> SymMatrix:
    """Block sums ``N[i, j] = sum_{l in P_i, k in P_j} M[l, k]``."""
    a = as_array(m)
    if not isinstance(partition, Partition):
        partition = Partition.of(partition)
    s = partition.indicator(a.shape[0])
    return SymMatrix(s.T @ a @ s)


def principal_submatrix(m, indices: Sequence[int]) -> SymMatrix:
    a = as_array(m)
    idx = [int(i) for i in indices]
    if len(set(idx)) != len(idx):
        raise ParameterError("principal submatrix indices must be distinct")
    if any(i < 0 or i >= a.shape[0] for i in idx):
        raise ParameterError(f"index out of range for dimension {a.shape[0]}")
    return SymMatrix(a[np.ix_(idx, idx)])


def permute(m, perm: Sequence[int]) -> SymMatrix:
    """``P.T @ M @ P`` for the permutation matrix with ``P[perm[j], j] = 1``,
    i.e. entry ``(i, j)`` of the result is ``M[perm[i], perm[j]]``."""
    a = as_array(m)
    p = [int(i) for i in perm]
    if sorted(p) != list(range(a.shape[0])):
        raise ParameterError("not a permutation of the matrix indices")
    return SymMatrix(a[np.ix_(p, p)])


is_cp_gram_certificate = cp_gram_certificate
