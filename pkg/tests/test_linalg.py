"""Dense symmetric kernels against LAPACK oracles, plus backend parity.

numpy.linalg implements different algorithms (Householder tridiagonal QR,
outer-product Cholesky), which makes it an independent oracle for the
Jacobi/Cholesky kernels here.
"""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from steklov_annulus import linalg
from steklov_annulus.errors import NotSPD, NumericalError
from steklov_annulus.linalg import (
    SymMatrix,
    active_backend,
    back_solve,
    cholesky,
    forward_solve,
    generalized_eigh,
    jacobi_eigen,
)


def _rand_sym(rng, d, scale=1.0):
    a = rng.standard_normal((d, d)) * scale
    return 0.5 * (a + a.T)


def _rand_spd(rng, d, shift=0.5):
    a = rng.standard_normal((d, d))
    return a @ a.T + shift * np.eye(d)


# ---------------------------------------------------------------- SymMatrix

def test_symmatrix_roundtrip(rng):
    a = _rand_sym(rng, 7)
    m = SymMatrix.from_dense(a)
    assert m.d == 7
    assert len(m.data) == 7 * 8 // 2
    np.testing.assert_array_equal(m.to_dense(), a)


def test_symmatrix_validates():
    with pytest.raises(Exception):
        SymMatrix(3, np.zeros(5))  # wrong packed length
    with pytest.raises(Exception):
        SymMatrix(2, np.array([1.0, np.nan, 2.0]))


def test_symmatrix_accepted_by_solvers(rng):
    a = _rand_spd(rng, 6)
    w1, _ = jacobi_eigen(SymMatrix.from_dense(a))
    w2, _ = jacobi_eigen(a)
    np.testing.assert_allclose(w1, w2, rtol=0, atol=0)


# ----------------------------------------------------------------- cholesky

@pytest.mark.parametrize("d", [1, 2, 5, 24, 80])
def test_cholesky_matches_numpy(rng, d):
    a = _rand_spd(rng, d)
    L = cholesky(a)
    np.testing.assert_allclose(L, np.linalg.cholesky(a), rtol=1e-10,
                               atol=1e-12)
    # exact reconstruction within roundoff
    np.testing.assert_allclose(L @ L.T, a, rtol=1e-12, atol=1e-12)


def test_cholesky_rejects_indefinite(rng):
    a = _rand_sym(rng, 6)
    a[0, 0] = -5.0
    with pytest.raises(NotSPD):
        cholesky(a)


def test_cholesky_rejects_semidefinite():
    # rank-1 matrix: pivot collapses at the second column
    v = np.array([[1.0], [2.0], [3.0]])
    with pytest.raises(NotSPD):
        cholesky(v @ v.T)


# ------------------------------------------------------------- jacobi_eigen

@pytest.mark.parametrize("d", [1, 2, 3, 10, 40, 130])
def test_jacobi_matches_lapack(rng, d):
    a = _rand_sym(rng, d)
    w, V = jacobi_eigen(a)
    w_ref = np.linalg.eigvalsh(a)
    scale = max(1.0, float(np.abs(w_ref).max()))
    np.testing.assert_allclose(w, w_ref, rtol=0, atol=1e-12 * scale)
    # eigenpairs: A V = V diag(w), V orthonormal
    np.testing.assert_allclose(a @ V, V * w, atol=1e-10 * scale)
    np.testing.assert_allclose(V.T @ V, np.eye(d), atol=1e-12)


def test_jacobi_sorted_ascending(rng):
    w, _ = jacobi_eigen(_rand_sym(rng, 17))
    assert np.all(np.diff(w) >= 0)


def test_jacobi_zero_matrix():
    w, V = jacobi_eigen(np.zeros((4, 4)))
    np.testing.assert_array_equal(w, np.zeros(4))
    np.testing.assert_array_equal(V, np.eye(4))


def test_jacobi_diagonal_matrix():
    w, V = jacobi_eigen(np.diag([3.0, -1.0, 2.0]))
    np.testing.assert_allclose(w, [-1.0, 2.0, 3.0], atol=0)
    np.testing.assert_allclose(np.abs(V), np.eye(3)[:, [1, 2, 0]], atol=0)


def test_jacobi_degenerate_eigenvalues(rng):
    # clustered spectrum: Q diag(1,1,1,2) Q^T
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    a = q @ np.diag([1.0, 1.0, 1.0, 2.0]) @ q.T
    w, V = jacobi_eigen(0.5 * (a + a.T))
    np.testing.assert_allclose(w, [1.0, 1.0, 1.0, 2.0], atol=1e-12)
    np.testing.assert_allclose(V.T @ V, np.eye(4), atol=1e-12)


# ----------------------------------------------------------------- solves

def test_triangular_solves(rng):
    d = 9
    a = _rand_spd(rng, d)
    L = cholesky(a)
    b = rng.standard_normal(d)
    B = rng.standard_normal((d, 3))
    np.testing.assert_allclose(forward_solve(L, b),
                               np.linalg.solve(L, b), rtol=1e-11, atol=1e-13)
    np.testing.assert_allclose(back_solve(L, B),
                               np.linalg.solve(L.T, B), rtol=1e-11, atol=1e-13)


# ---------------------------------------------------------- generalized_eigh

@pytest.mark.parametrize("d", [2, 6, 30])
def test_generalized_eigh(rng, d):
    K = _rand_spd(rng, d, shift=0.0)
    K = 0.5 * (K + K.T)
    Mm = _rand_spd(rng, d, shift=1.0)
    w, X = generalized_eigh(K, Mm)
    scale = max(1.0, float(np.abs(w).max()))
    # K X = M X diag(w), X^T M X = I
    np.testing.assert_allclose(K @ X, Mm @ X @ np.diag(w),
                               atol=1e-9 * scale)
    np.testing.assert_allclose(X.T @ Mm @ X, np.eye(d), atol=1e-10)
    assert np.all(np.diff(w) >= 0)


def test_generalized_eigh_rejects_indefinite_mass(rng):
    K = _rand_spd(rng, 4)
    M_bad = np.diag([1.0, -1.0, 1.0, 1.0])
    with pytest.raises(NotSPD):
        generalized_eigh(K, M_bad)


# ----------------------------------------------------------------- backends

_CHILD = r"""
import json, sys
import numpy as np
from steklov_annulus import linalg

rng = np.random.default_rng(7)
a = rng.standard_normal((40, 40))
a = 0.5 * (a + a.T)
w, _ = linalg.jacobi_eigen(a)
m = rng.standard_normal((12, 12))
spd = m @ m.T + 0.5 * np.eye(12)
L = linalg.cholesky(spd)
print(json.dumps({
    "backend": linalg.active_backend(),
    "w": w.tolist(),
    "l_trace": float(np.trace(L)),
}))
"""


def _run_child(backend):
    env = dict(os.environ, STEKLOV_ANNULUS_BACKEND=backend)
    out = subprocess.run([sys.executable, "-c", _CHILD], env=env,
                         capture_output=True, text=True)
    return out


def test_active_backend_reports():
    assert active_backend() in ("numba", "numpy")


def test_numpy_backend_agrees_with_numba():
    got = {}
    for backend in ("numpy", "numba"):
        out = _run_child(backend)
        assert out.returncode == 0, out.stderr
        got[backend] = json.loads(out.stdout)
        assert got[backend]["backend"] == backend
    w_np = np.array(got["numpy"]["w"])
    w_nb = np.array(got["numba"]["w"])
    np.testing.assert_allclose(w_np, w_nb, rtol=0, atol=1e-13 * 40)
    assert got["numpy"]["l_trace"] == pytest.approx(
        got["numba"]["l_trace"], rel=1e-14)


def test_invalid_backend_rejected():
    out = _run_child("fortran")
    assert out.returncode != 0
    assert "STEKLOV_ANNULUS_BACKEND" in out.stderr


def test_in_process_backend_consistency(rng):
    # whatever backend is active in this process must satisfy the same
    # contracts the oracles above check; spot-check one mixed pipeline
    a = _rand_spd(rng, 20)
    w, X = generalized_eigh(a, np.eye(20))
    w_ref, _ = jacobi_eigen(a)
    np.testing.assert_allclose(w, w_ref, atol=1e-11 * max(1.0, w_ref.max()))
