"""Closed-form normalized Steklov eigenvalue branches of rotationally
symmetric conformal metrics on the annulus [0, T] x S^1, and their merge
into the ordered spectrum.

A rotationally symmetric metric is determined up to scale by the boundary
length ratio alpha >= 1 and the conformal length T; everything here is
expressed through beta = 4 alpha / (1 + alpha)^2 in (0, 1]. Values are
normalized eigenvalues sigma * L(boundary), dimensionless.

Two branch families:

  Lambda_n = 4 n pi / (coth(nT) + sqrt(coth(nT)^2 - beta)),  n >= 1
  Mu_0     = 8 pi / (T beta)
  Mu_n     = (4 n pi / beta) (coth(nT) + sqrt(coth(nT)^2 - beta)),  n >= 1

Lambda_n is the rationalized form of (4 n pi / beta)(coth - sqrt(...)):
identical algebraically, stable when coth(nT)^2 - beta is tiny. Lambda
increases in T and beta, Mu decreases; Lambda_n Mu_n = 16 n^2 pi^2 / beta
exactly. Multiplicity 2 for n >= 1 in either family, 1 for Mu_0 and for
the trivial Lambda_0 = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ._hyper import coth, csch, sqrt_coth2_minus
from .errors import DomainError, NumericalError

# Symbolic "T = infinity". A first-class value because the even supremum
# M_2 = 4 pi is approached, not attained, exactly in this limit.
INFINITE_T = math.inf


class Family(Enum):
    LAMBDA = "lambda"
    MU = "mu"


@dataclass(frozen=True)
class MetricShape:
    """Invariants (alpha, beta, T) of a rotationally symmetric metric.

    alpha >= 1 always: construction normalizes alpha < 1 to 1/alpha (the two
    orientations of the annulus are isometric). beta is derived, never free.
    """

    alpha: float
    beta: float
    T: float

    def __post_init__(self):
        if not (self.alpha >= 1.0 and math.isfinite(self.alpha)):
            raise DomainError(f"alpha must be finite and >= 1, got {self.alpha}")
        if not (0.0 < self.beta <= 1.0):
            raise DomainError(f"beta must lie in (0, 1], got {self.beta}")
        if not (self.T > 0.0):
            raise DomainError(f"T must be positive, got {self.T}")

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.T)

    @property
    def sqrt_one_minus_beta(self) -> float:
        # exact: 1 - beta = ((alpha-1)/(alpha+1))^2
        return (self.alpha - 1.0) / (self.alpha + 1.0)


def shape(alpha: float, T: float) -> MetricShape:
    """Build a MetricShape from the boundary ratio; alpha < 1 is flipped."""
    if not (alpha > 0.0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be positive and finite, got {alpha}")
    if not (T > 0.0):
        raise DomainError(f"T must be positive, got {T}")
    if alpha < 1.0:
        alpha = 1.0 / alpha
    # the ratio can round a hair above 1 when alpha is within ulps of 1
    beta = min(4.0 * alpha / ((1.0 + alpha) * (1.0 + alpha)), 1.0)
    return MetricShape(alpha=alpha, beta=beta, T=T)


def shape_from_boundary_lengths(L0: float, L1: float, T: float) -> MetricShape:
    """Shape from the two boundary lengths; orientation is normalized away."""
    for name, v in (("L0", L0), ("L1", L1), ("T", T)):
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0.0):
            raise DomainError(f"{name} must be positive and finite, got {v}")
    return shape(L0 / L1, T)


@dataclass(frozen=True)
class BranchValue:
    family: Family
    n: int
    value: float
    multiplicity: int


@dataclass(frozen=True)
class SpectrumEntry:
    k: int
    value: float
    source: BranchValue


def _check_branch_n(n, minimum):
    if not isinstance(n, int) or n < minimum:
        raise DomainError(f"branch index must be an integer >= {minimum}, got {n}")


def eval_lambda(s: MetricShape, n: int) -> BranchValue:
    """Lambda_n, the branch increasing in T. n >= 1; Lambda_0 = 0 appears
    only as the trivial head of enumerate_spectrum."""
    _check_branch_n(n, 1)
    if s.is_infinite:
        value = 2.0 * n * math.pi * (1.0 + s.alpha) / s.alpha
    else:
        r = sqrt_coth2_minus(n * s.T, s.beta, s.sqrt_one_minus_beta)
        value = 4.0 * n * math.pi / (coth(n * s.T) + r)
    return BranchValue(Family.LAMBDA, n, value, 2)


def eval_mu(s: MetricShape, n: int) -> BranchValue:
    """Mu_n, the branch decreasing in T. n = 0 is the single-multiplicity
    8 pi / (T beta) mode; it degenerates at T = infinity and is rejected."""
    _check_branch_n(n, 0)
    if n == 0:
        if s.is_infinite:
            raise DomainError("Mu_0 is not defined at T = infinity")
        return BranchValue(Family.MU, 0, 8.0 * math.pi / (s.T * s.beta), 1)
    if s.is_infinite:
        value = 2.0 * n * math.pi * (1.0 + s.alpha)
    else:
        r = sqrt_coth2_minus(n * s.T, s.beta, s.sqrt_one_minus_beta)
        value = (4.0 * n * math.pi / s.beta) * (coth(n * s.T) + r)
    return BranchValue(Family.MU, n, value, 2)


def branch_derivative_T(s: MetricShape, family: Family, n: int) -> float:
    """d/dT of the branch value. Positive for Lambda, negative for Mu."""
    if s.is_infinite:
        raise DomainError("derivative requires finite T")
    if family is Family.LAMBDA:
        _check_branch_n(n, 1)
        lam = eval_lambda(s, n).value
        r = sqrt_coth2_minus(n * s.T, s.beta, s.sqrt_one_minus_beta)
        sh = csch(n * s.T)
        return n * lam * sh * sh / r
    _check_branch_n(n, 0)
    if n == 0:
        return -8.0 * math.pi / (s.T * s.T * s.beta)
    mu = eval_mu(s, n).value
    r = sqrt_coth2_minus(n * s.T, s.beta, s.sqrt_one_minus_beta)
    sh = csch(n * s.T)
    return -n * mu * sh * sh / r


def branch_derivative_beta(s: MetricShape, family: Family, n: int) -> float:
    """d/dbeta of the branch value. Positive for Lambda, negative for Mu."""
    if s.is_infinite:
        raise DomainError("derivative requires finite T")
    if family is Family.LAMBDA:
        _check_branch_n(n, 1)
        lam = eval_lambda(s, n).value
        r = sqrt_coth2_minus(n * s.T, s.beta, s.sqrt_one_minus_beta)
        denom = coth(n * s.T) + r
        return lam / (2.0 * r * denom)
    _check_branch_n(n, 0)
    if n == 0:
        return -8.0 * math.pi / (s.T * s.beta * s.beta)
    mu = eval_mu(s, n).value
    r = sqrt_coth2_minus(n * s.T, s.beta, s.sqrt_one_minus_beta)
    # coth - sqrt cancels for large nT; use (coth - r) = beta / (coth + r)
    diff = s.beta / (coth(n * s.T) + r)
    return -mu / (2.0 * r * diff)


def enumerate_spectrum(s: MetricShape, count: int) -> list[SpectrumEntry]:
    """Entries sigma~_0 .. sigma~_count of the merged ordered spectrum.

    Both families are generated in increasing n and merged. Generation may
    stop at index N only once min(Lambda_N, Mu_N) exceeds the current
    count-th smallest candidate: both families grow at least linearly in n
    (Lambda_n >= n Lambda_1 since its denominator decreases in n), so no
    later branch can sneak below. Ties (a crossing T) order Lambda first;
    with both multiplicities present the sigma~_k values are identical
    either way, only the provenance is pinned down deterministically.
    """
    if s.is_infinite:
        raise DomainError("enumerate_spectrum requires finite T")
    if not isinstance(count, int) or count < 1:
        raise DomainError(f"count must be an integer >= 1, got {count}")

    # (value, family_rank, n, BranchValue); family_rank makes Lambda sort first
    candidates = [(eval_mu(s, 0).value, 1, 0, eval_mu(s, 0))]
    n = 1
    needed = count  # nonzero values needed (with multiplicity)
    while True:
        lam = eval_lambda(s, n)
        mu = eval_mu(s, n)
        candidates.append((lam.value, 0, n, lam))
        candidates.append((mu.value, 1, n, mu))
        # multiplicities accumulated so far
        total = sum(bv.multiplicity for _, _, _, bv in candidates)
        if total >= needed:
            candidates.sort()
            acc = 0
            kth_value = None
            for v, _, _, bv in candidates:
                acc += bv.multiplicity
                if acc >= needed:
                    kth_value = v
                    break
            # next Lambda is the smaller of the next pair; strict exceedance
            # required so equal values at a crossing are never dropped
            if eval_lambda(s, n + 1).value > kth_value:
                break
        n += 1
        if n > 4 * count + 64:
            raise NumericalError("spectrum merge failed to terminate")

    candidates.sort()
    zero = BranchValue(Family.LAMBDA, 0, 0.0, 1)
    entries = [SpectrumEntry(0, 0.0, zero)]
    k = 1
    for _, _, _, bv in candidates:
        for _ in range(bv.multiplicity):
            if k > count:
                return entries
            entries.append(SpectrumEntry(k, bv.value, bv))
            k += 1
    return entries


def raw_sigma(normalized_value: float, boundary_length: float) -> float:
    """Undo the normalization: sigma = sigma~ / L(boundary)."""
    if not (boundary_length > 0.0):
        raise DomainError("boundary length must be positive")
    return normalized_value / boundary_length


def sigma_k_grid(k: int, alphas, Ts):
    """Vectorized sigma~_k over a parameter grid.

    Returns an array of shape (len(alphas), len(Ts)) whose (i, j) entry
    equals enumerate_spectrum(shape(alphas[i], Ts[j]), k)[k].value; that
    equivalence is property-tested. Exists because grid scans over tens of
    thousands of shapes are too slow through the scalar entry path.
    """
    import numpy as np

    if not isinstance(k, int) or k < 1:
        raise DomainError(f"k must be an integer >= 1, got {k}")
    al = np.asarray(alphas, dtype=float).reshape(-1, 1)
    ts = np.asarray(Ts, dtype=float).reshape(1, -1)
    if np.any(al < 1.0) or np.any(~np.isfinite(al)):
        raise DomainError("alphas must be finite and >= 1")
    if np.any(ts <= 0.0) or np.any(~np.isfinite(ts)):
        raise DomainError("Ts must be positive and finite")
    beta = 4.0 * al / (1.0 + al) ** 2
    g = (al - 1.0) / (al + 1.0)

    # k nonzero values suffice; each n >= 1 contributes 4 (two families x
    # multiplicity 2) and Mu_0 one more, so n up to k//2 + 1 always covers
    nmax = k // 2 + 1
    vals = np.empty((al.shape[0], ts.shape[1], 4 * nmax + 1))
    vals[:, :, 0] = 8.0 * math.pi / (ts * beta)
    # np.where evaluates both lanes; the unused one overflows harmlessly
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, nmax + 1):
            x = n * ts
            cth = np.where(x > 0.5, 1.0 + 2.0 / np.expm1(2.0 * x),
                           np.cosh(x) / np.sinh(x))
            e = np.exp(-x)
            csh = 2.0 * e / (1.0 - e * e)
            r = np.hypot(g, csh)
            lam = 4.0 * n * math.pi / (cth + r)
            mu = (4.0 * n * math.pi / beta) * (cth + r)
            base = 1 + 4 * (n - 1)
            vals[:, :, base] = lam
            vals[:, :, base + 1] = lam
            vals[:, :, base + 2] = mu
            vals[:, :, base + 3] = mu
    vals.sort(axis=2)
    return vals[:, :, k - 1]


def eigenfunction_offsets(s: MetricShape, n: int) -> tuple[float, float]:
    """Offsets (tau_n, xi_n) placing the separated eigenfunctions:

      Lambda-branch:  cosh(n(t - tau_n)) {cos, sin}(n theta)
      Mu-branch:      sinh(n(t - xi_n)) {cos, sin}(n theta)

    tanh(n tau_n) = ((1+alpha)/2)(coth(nT) - sqrt(coth(nT)^2 - beta))
    coth(n xi_n)  = ((1+alpha)/2)(coth(nT) + sqrt(coth(nT)^2 - beta))

    Direct inverse-hyperbolic evaluation; alpha = 1 gives T/2 for both.
    """
    _check_branch_n(n, 1)
    if s.is_infinite:
        raise DomainError("eigenfunction offsets require finite T")
    c = coth(n * s.T)
    r = sqrt_coth2_minus(n * s.T, s.beta, s.sqrt_one_minus_beta)
    half = 0.5 * (1.0 + s.alpha)
    # c - r cancels for small nT (both ~ csch); c^2 - r^2 = beta exactly
    t_arg = half * s.beta / (c + r)
    x_arg = half * (c + r)
    if not (0.0 < t_arg < 1.0):
        raise NumericalError(f"artanh argument {t_arg} outside (0, 1)")
    if not (x_arg > 1.0):
        raise NumericalError(f"arcoth argument {x_arg} outside (1, inf)")
    tau = math.atanh(t_arg) / n
    xi = math.atanh(1.0 / x_arg) / n  # arcoth(y) = artanh(1/y)
    return tau, xi
