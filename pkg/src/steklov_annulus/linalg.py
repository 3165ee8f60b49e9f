"""Dense symmetric linear algebra for the Galerkin solver: Cholesky,
triangular solves, cyclic Jacobi eigensolver, and the SPD generalized
reduction built from them.

Two interchangeable backends compute the same algorithms:

  numba  - scalar kernels under @njit (default when numba imports)
  numpy  - the same sweeps with vectorized row/column updates

Select with STEKLOV_ANNULUS_BACKEND=numba|numpy (read once at import).
The flag changes the execution engine only; each backend satisfies the
same residual contracts, and a fixed backend is deterministic run to run.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotSPD, NumericalError

_MAX_SWEEPS = 30
_OFF_TOL = 1e-12  # times ||A||_F
_PIVOT_TOL = 1e-13  # times ||A||_F
_ROT_SKIP = 1e-300  # skip rotations on denormal pivots


def _pick_backend():
    choice = os.environ.get("STEKLOV_ANNULUS_BACKEND", "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ImportError(
            f"STEKLOV_ANNULUS_BACKEND must be 'numba' or 'numpy', got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
        return "numba"
    except ImportError:
        if choice == "numba":
            raise
        return "numpy"


_BACKEND = _pick_backend()


def active_backend() -> str:
    return _BACKEND


# ---------------------------------------------------------------- kernels

if _BACKEND == "numba":
    from numba import njit

    @njit(cache=True, nogil=True)
    def _jacobi_kernel(A, V, norm_a):
        d = A.shape[0]
        for _ in range(_MAX_SWEEPS):
            off = 0.0
            for i in range(d - 1):
                for j in range(i + 1, d):
                    off += A[i, j] * A[i, j]
            if math.sqrt(2.0 * off) <= _OFF_TOL * norm_a:
                return 0
            for p in range(d - 1):
                for q in range(p + 1, d):
                    apq = A[p, q]
                    if abs(apq) < _ROT_SKIP:
                        continue
                    tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                    if tau >= 0.0:
                        t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    for i in range(d):
                        aip = A[i, p]
                        aiq = A[i, q]
                        A[i, p] = c * aip - s * aiq
                        A[i, q] = s * aip + c * aiq
                    for j in range(d):
                        apj = A[p, j]
                        aqj = A[q, j]
                        A[p, j] = c * apj - s * aqj
                        A[q, j] = s * apj + c * aqj
                    for i in range(d):
                        vip = V[i, p]
                        viq = V[i, q]
                        V[i, p] = c * vip - s * viq
                        V[i, q] = s * vip + c * viq
        off = 0.0
        for i in range(d - 1):
            for j in range(i + 1, d):
                off += A[i, j] * A[i, j]
        if math.sqrt(2.0 * off) <= _OFF_TOL * norm_a:
            return 0
        return 1

    @njit(cache=True, nogil=True)
    def _cholesky_kernel(A, L, norm_a):
        d = A.shape[0]
        for j in range(d):
            acc = A[j, j]
            for k in range(j):
                acc -= L[j, k] * L[j, k]
            if acc <= _PIVOT_TOL * norm_a:
                return 1
            ljj = math.sqrt(acc)
            L[j, j] = ljj
            for i in range(j + 1, d):
                acc = A[i, j]
                for k in range(j):
                    acc -= L[i, k] * L[j, k]
                L[i, j] = acc / ljj
        return 0

    @njit(cache=True, nogil=True)
    def _forward_solve_kernel(L, B):
        # overwrite B with L^{-1} B
        d = L.shape[0]
        m = B.shape[1]
        for i in range(d):
            for k in range(i):
                lik = L[i, k]
                for j in range(m):
                    B[i, j] -= lik * B[k, j]
            lii = L[i, i]
            for j in range(m):
                B[i, j] /= lii
        return B

    @njit(cache=True, nogil=True)
    def _back_solve_kernel(L, B):
        # overwrite B with L^{-T} B
        d = L.shape[0]
        m = B.shape[1]
        for i in range(d - 1, -1, -1):
            lii = L[i, i]
            for j in range(m):
                B[i, j] /= lii
            for k in range(i):
                lik = L[i, k]
                for j in range(m):
                    B[k, j] -= lik * B[i, j]
        return B

else:

    def _jacobi_kernel(A, V, norm_a):
        d = A.shape[0]
        for _ in range(_MAX_SWEEPS):
            off2 = np.sum(np.triu(A, 1) ** 2)
            if math.sqrt(2.0 * off2) <= _OFF_TOL * norm_a:
                return 0
            for p in range(d - 1):
                for q in range(p + 1, d):
                    apq = A[p, q]
                    if abs(apq) < _ROT_SKIP:
                        continue
                    tau = (A[q, q] - A[p, p]) / (2.0 * apq)
                    if tau >= 0.0:
                        t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    s = t * c
                    ap = A[:, p].copy()
                    aq = A[:, q].copy()
                    A[:, p] = c * ap - s * aq
                    A[:, q] = s * ap + c * aq
                    ap = A[p, :].copy()
                    aq = A[q, :].copy()
                    A[p, :] = c * ap - s * aq
                    A[q, :] = s * ap + c * aq
                    vp = V[:, p].copy()
                    vq = V[:, q].copy()
                    V[:, p] = c * vp - s * vq
                    V[:, q] = s * vp + c * vq
        off2 = np.sum(np.triu(A, 1) ** 2)
        if math.sqrt(2.0 * off2) <= _OFF_TOL * norm_a:
            return 0
        return 1

    def _cholesky_kernel(A, L, norm_a):
        d = A.shape[0]
        for j in range(d):
            acc = A[j, j] - np.dot(L[j, :j], L[j, :j])
            if acc <= _PIVOT_TOL * norm_a:
                return 1
            ljj = math.sqrt(acc)
            L[j, j] = ljj
            if j + 1 < d:
                L[j + 1:, j] = (A[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / ljj
        return 0

    def _forward_solve_kernel(L, B):
        d = L.shape[0]
        for i in range(d):
            if i:
                B[i, :] -= L[i, :i] @ B[:i, :]
            B[i, :] /= L[i, i]
        return B

    def _back_solve_kernel(L, B):
        d = L.shape[0]
        for i in range(d - 1, -1, -1):
            B[i, :] /= L[i, i]
            if i:
                B[:i, :] -= np.outer(L[i, :i], B[i, :])
        return B


# ---------------------------------------------------------------- public API

@dataclass(frozen=True)
class SymMatrix:
    """Symmetric matrix with packed lower-triangular storage.

    data[i*(i+1)//2 + j] holds entry (i, j) for i >= j; symmetry is
    structural, the upper triangle is never stored.
    """

    d: int
    data: np.ndarray

    def __post_init__(self):
        expect = self.d * (self.d + 1) // 2
        if self.data.shape != (expect,):
            raise DomainError(
                f"packed length {self.data.shape} does not match d={self.d}"
            )
        if not np.all(np.isfinite(self.data)):
            raise DomainError("matrix entries must be finite")

    @classmethod
    def from_dense(cls, A) -> "SymMatrix":
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DomainError(f"need a square matrix, got shape {A.shape}")
        d = A.shape[0]
        idx = np.tril_indices(d)
        return cls(d, A[idx].copy())

    def to_dense(self) -> np.ndarray:
        A = np.zeros((self.d, self.d))
        idx = np.tril_indices(self.d)
        A[idx] = self.data
        A = A + A.T
        A[np.diag_indices(self.d)] /= 2.0
        return A


def _as_dense_sym(A) -> np.ndarray:
    if isinstance(A, SymMatrix):
        return A.to_dense()
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"need a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix entries must be finite")
    # structural symmetry: only the lower triangle is trusted
    return SymMatrix.from_dense(A).to_dense()


def cholesky(A) -> np.ndarray:
    """Lower factor L with L L^T = A, or NotSPD on pivot breakdown."""
    Ad = _as_dense_sym(A)
    norm_a = float(np.linalg.norm(Ad))
    L = np.zeros_like(Ad)
    if _cholesky_kernel(Ad, L, norm_a):
        raise NotSPD(f"Cholesky pivot at or below {_PIVOT_TOL:g} * ||A||")
    return L


def jacobi_eigen(A) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthogonal eigenvectors (columns) of a
    symmetric matrix, by cyclic-by-row Jacobi rotations."""
    Ad = _as_dense_sym(A)
    d = Ad.shape[0]
    norm_a = float(np.linalg.norm(Ad))
    V = np.eye(d)
    if norm_a == 0.0:
        return np.zeros(d), V
    work = Ad.copy()
    if _jacobi_kernel(work, V, norm_a):
        raise NumericalError(
            f"Jacobi failed to converge in {_MAX_SWEEPS} sweeps"
        )
    w = np.diag(work).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def forward_solve(L, B) -> np.ndarray:
    """X with L X = B (L lower triangular)."""
    X = np.array(B, dtype=float, copy=True)
    vec = X.ndim == 1
    if vec:
        X = X.reshape(-1, 1)
    _forward_solve_kernel(np.asarray(L, dtype=float), X)
    return X[:, 0] if vec else X


def back_solve(L, B) -> np.ndarray:
    """X with L^T X = B (L lower triangular)."""
    X = np.array(B, dtype=float, copy=True)
    vec = X.ndim == 1
    if vec:
        X = X.reshape(-1, 1)
    _back_solve_kernel(np.asarray(L, dtype=float), X)
    return X[:, 0] if vec else X


def generalized_eigh(K, M) -> tuple[np.ndarray, np.ndarray]:
    """Solve K x = w M x for symmetric K, SPD M.

    Cholesky M = L L^T reduces to the standard problem C = L^{-1} K L^{-T};
    eigenvectors are mapped back through L^{-T} (M-orthonormal columns).
    """
    Kd = _as_dense_sym(K)
    L = cholesky(M)
    C = forward_solve(L, Kd)
    C = forward_solve(L, np.ascontiguousarray(C.T))
    C = 0.5 * (C + C.T)  # symmetrize roundoff before Jacobi
    w, Q = jacobi_eigen(C)
    X = back_solve(L, Q)
    return w, X


def warmup() -> None:
    """Force kernel compilation (no-op on the numpy backend)."""
    A = np.array([[2.0, 1.0], [1.0, 3.0]])
    M = np.array([[1.0, 0.2], [0.2, 1.0]])
    generalized_eigh(A, M)
