"""Critical free-boundary minimal surfaces attached to the eigenvalue
suprema: n-catenoids in R³, n-Möbius bands and embedded annuli in R⁴.

Sampling, free-boundary orthogonality and discrete minimality residuals,
and OBJ / JSON mesh export. The Möbius identification X(t,θ) = X(−t,θ+π)
is not quotiented: the immersed double cover is what gets sampled.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .crossings import t20_of_one, tk1_of_one
from .errors import DomainError, NumericalError
from .spectral import eigenfunction_offsets, shape

KINDS = ("catenoid", "mobius", "embedded")

_MIN_GRID = 8


@dataclass(frozen=True, eq=False)
class SurfaceSample:
    kind: str
    n: int
    ambient_dim: int
    t: np.ndarray
    theta: np.ndarray
    positions: np.ndarray  # (nt, ntheta, dim)
    t_tangent: np.ndarray  # analytic dX/dt on the same grid
    theta_tangent: np.ndarray  # analytic dX/dθ
    t_range: tuple
    critical: bool  # True when t_range is the free-boundary-critical one


def critical_half_range(kind: str, n: int) -> float:
    """Half-width T* of the critical parameter interval [−T*, T*]."""
    if kind == "catenoid":
        return t20_of_one() / n
    if kind == "mobius":
        return tk1_of_one(2 * n) / 2.0
    if kind == "embedded":
        return tk1_of_one(n) / 2.0
    raise DomainError(f"unknown surface kind {kind!r}; expected one of {KINDS}")


def _validate_kind(kind: str, n: int) -> None:
    if kind not in KINDS:
        raise DomainError(f"unknown surface kind {kind!r}; expected one of {KINDS}")
    if kind == "embedded":
        # the (m,1) crossing only exists for odd m >= 3
        if n < 3 or n % 2 == 0:
            raise DomainError(
                f"embedded kind needs an odd index m >= 3, got {n}"
            )
    elif n < 1:
        raise DomainError(f"cover index n must be >= 1, got {n}")


def sample_surface(kind: str, n: int, nt: int = 64, ntheta: int = 64,
                   t_half_range: float | None = None) -> SurfaceSample:
    """Sample a surface on an (nt x ntheta) grid.

    t runs over [−T*, T*] with the critical T* by default (override
    t_half_range for truncated negative controls); θ over [0, 2π) without
    the duplicate seam column."""
    _validate_kind(kind, n)
    if nt < _MIN_GRID or ntheta < _MIN_GRID:
        raise DomainError(f"grid must be at least 8x8, got {nt}x{ntheta}")
    t_star = critical_half_range(kind, n)
    critical = t_half_range is None
    if not critical:
        t_star = float(t_half_range)
        if not (t_star > 0.0 and math.isfinite(t_star)):
            raise DomainError(f"t_half_range must be positive, got {t_half_range}")
    t = np.linspace(-t_star, t_star, nt)
    theta = np.linspace(0.0, 2.0 * math.pi, ntheta, endpoint=False)
    tt, th = np.meshgrid(t, theta, indexing="ij")

    if kind == "catenoid":
        ch, sh = np.cosh(n * tt), np.sinh(n * tt)
        c, s = np.cos(n * th), np.sin(n * th)
        X = np.stack([n * tt, ch * c, ch * s], axis=-1)
        dXt = np.stack([np.full_like(tt, float(n)), n * sh * c, n * sh * s],
                       axis=-1)
        dXq = np.stack([np.zeros_like(tt), -n * ch * s, n * ch * c], axis=-1)
    else:
        k = 2 * n if kind == "mobius" else n
        c, s = np.cos(th), np.sin(th)
        C, S = np.cos(k * th), np.sin(k * th)
        ch, sh = np.cosh(k * tt), np.sinh(k * tt)
        sht, cht = np.sinh(tt), np.cosh(tt)
        X = np.stack([k * sht * c, k * sht * s, ch * C, ch * S], axis=-1)
        dXt = np.stack([k * cht * c, k * cht * s, k * sh * C, k * sh * S],
                       axis=-1)
        dXq = np.stack([-k * sht * s, k * sht * c, -k * ch * S, k * ch * C],
                       axis=-1)
    return SurfaceSample(kind, n, X.shape[-1], t, theta, X, dXt, dXq,
                         (-t_star, t_star), critical)


def free_boundary_residual(sample: SurfaceSample) -> float:
    """max |sin(angle between X and ∂X/∂t)| over both boundary circles.

    Zero angle means the surface meets the sphere through its boundary
    orthogonally (position vector parallel to the outward tangent)."""
    worst = 0.0
    for row in (0, -1):
        X = sample.positions[row]
        Tt = sample.t_tangent[row]
        nx = np.linalg.norm(X, axis=-1)
        nt2 = np.sum(Tt * Tt, axis=-1)
        if nx.min() < 1e-300 or nt2.min() < 1e-300:
            raise NumericalError("degenerate boundary tangent or position")
        # |sin| via the rejection of X off the tangent line; the naive
        # sqrt(1 - cos^2) cannot resolve angles below sqrt(eps)
        coef = np.sum(X * Tt, axis=-1) / nt2
        rej = X - coef[..., None] * Tt
        worst = max(worst, float((np.linalg.norm(rej, axis=-1) / nx).max()))
    return worst


def boundary_sphere_radii(sample: SurfaceSample) -> np.ndarray:
    """Distances from the origin of every boundary grid point."""
    pts = sample.positions[[0, -1]].reshape(-1, sample.ambient_dim)
    return np.linalg.norm(pts, axis=-1)


def discrete_minimality_residual(sample: SurfaceSample) -> float:
    """max norm of the tangent-projected second-order FD mean-curvature
    vector over interior grid points; O(h²) small iff the surface is
    discretely minimal."""
    X = sample.positions
    nt = X.shape[0]
    if nt < 3:
        raise DomainError("need at least 3 t-rows for interior differences")
    ht = float(sample.t[1] - sample.t[0])
    hq = float(sample.theta[1] - sample.theta[0])

    mid = X[1:-1]
    up, dn = X[2:], X[:-2]
    lf, rt = np.roll(mid, 1, axis=1), np.roll(mid, -1, axis=1)
    # first derivatives are analytic sample data; only the second
    # derivatives are differenced, so the error is O(h^2) of those alone
    Xu = sample.t_tangent[1:-1]
    Xv = sample.theta_tangent[1:-1]
    Xuu = (up - 2.0 * mid + dn) / (ht * ht)
    Xvv = (rt - 2.0 * mid + lf) / (hq * hq)
    Xuv = (np.roll(up, -1, axis=1) - np.roll(up, 1, axis=1)
           - np.roll(dn, -1, axis=1) + np.roll(dn, 1, axis=1)) / (4.0 * ht * hq)

    E = np.sum(Xu * Xu, axis=-1)
    F = np.sum(Xu * Xv, axis=-1)
    G = np.sum(Xv * Xv, axis=-1)
    det = E * G - F * F
    if float(det.min()) <= 0.0:
        raise NumericalError("degenerate first fundamental form on the grid")
    H = (G[..., None] * Xuu - 2.0 * F[..., None] * Xuv
         + E[..., None] * Xvv) / (2.0 * det[..., None])

    # project out the tangent plane: solve the 2x2 Gram system
    hu = np.sum(H * Xu, axis=-1)
    hv = np.sum(H * Xv, axis=-1)
    a = (G * hu - F * hv) / det
    b = (E * hv - F * hu) / det
    Hperp = H - a[..., None] * Xu - b[..., None] * Xv
    return float(np.linalg.norm(Hperp, axis=-1).max())


def immersion_consistency(n: int, nt: int = 33, ntheta: int = 32) -> dict:
    """Pointwise match between the critical n-catenoid coordinates and the
    first-band eigenfunctions of the symmetric cylinder with α = 1,
    T = T_{n,0}(1), under the affine shift t ↦ t − T/2."""
    sample = sample_surface("catenoid", n, nt, ntheta)
    T = 2.0 * t20_of_one() / n
    s = shape(1.0, T)
    tau, _ = eigenfunction_offsets(s, n)
    t_cyl = sample.t + 0.5 * T
    tt, th = np.meshgrid(t_cyl, sample.theta, indexing="ij")
    # mean-zero linear profile; its offset T/(1+α) is T/2 at α = 1
    z0 = tt - 0.5 * T
    prof = np.cosh(n * (tt - tau))
    xn = prof * np.cos(n * th)
    yn = prof * np.sin(n * th)
    expected = np.stack([n * z0, xn, yn], axis=-1)
    mismatch = float(np.abs(sample.positions - expected).max())
    return {"n": n, "T": T, "tau": tau, "max_mismatch": mismatch}


# -------------------------------------------------------------------- export

def export_mesh(sample: SurfaceSample, fmt: str | None = None, path=None):
    """Write the sample to disk.

    OBJ: triangulated quads, θ-seam welded; for R⁴ kinds the first three
    coordinates are written and the file is marked '# projection: true'
    (lossy; the JSON grid is the canonical artifact there). JSON: the
    full-dimensional grid, round-trips bit-exactly."""
    if path is None:
        raise DomainError("export_mesh needs an output path")
    if fmt is None:
        fmt = "obj" if sample.ambient_dim == 3 else "json"
    if fmt not in ("obj", "json"):
        raise DomainError(f"format must be 'obj' or 'json', got {fmt!r}")
    if fmt == "obj":
        _write_obj(sample, path)
    else:
        _write_json(sample, path)
    return path


def _write_obj(sample: SurfaceSample, path) -> None:
    nt = sample.positions.shape[0]
    nq = sample.positions.shape[1]
    lines = [f"# {sample.kind} n={sample.n} grid={nt}x{nq}"]
    if sample.ambient_dim == 4:
        lines.append("# projection: true")
    pts = sample.positions[..., :3].reshape(-1, 3)
    for p in pts:
        lines.append(f"v {float(p[0])!r} {float(p[1])!r} {float(p[2])!r}")
    for i in range(nt - 1):
        for j in range(nq):
            jn = (j + 1) % nq
            a = i * nq + j + 1
            b = i * nq + jn + 1
            c = (i + 1) * nq + jn + 1
            d = (i + 1) * nq + j + 1
            lines.append(f"f {a} {b} {c}")
            lines.append(f"f {a} {c} {d}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))
        fh.write("\n")


def _write_json(sample: SurfaceSample, path) -> None:
    payload = {
        "kind": sample.kind,
        "n": sample.n,
        "t_range": [sample.t_range[0], sample.t_range[1]],
        "grid": sample.positions.tolist(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_mesh_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
