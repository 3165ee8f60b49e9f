"""Crossing times of the two eigenvalue branch families.

T_{k,l}(beta) is the unique T at which Lambda_k(beta, T) = Mu_l(beta, T).
Dividing out the common 4 pi / beta, the equation in the unnormalized
branch values is

    a (coth(aT) - sqrt(coth(aT)^2 - beta))
        = b (coth(bT) + sqrt(coth(bT)^2 - beta))     (b > 0)
    a (coth(aT) - sqrt(coth(aT)^2 - beta)) = 2 / T    (b = 0)

The left side increases strictly in T, the right side decreases, so the
difference has at most one root; a root exists iff alpha < a/b
(equivalently beta > 4ab/(a+b)^2), always for b = 0. The parameters a, b
may be real (a > b > 0); b = 0 is meaningful only for integer branch
indices and is a separate code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from ._hyper import coth, sqrt_coth2_minus
from .errors import DomainError, NoCrossing, NumericalError

_GROW = 4.0
_MAX_GROW = 60
_BISECT_WIDTH = 1e-6
_REL_TOL = 1e-13


def alpha_from_beta(beta: float) -> float:
    """The alpha >= 1 with beta = 4 alpha/(1+alpha)^2."""
    if not (0.0 < beta <= 1.0):
        raise DomainError(f"beta must lie in (0, 1], got {beta}")
    return (2.0 - beta + 2.0 * math.sqrt(1.0 - beta)) / beta


@dataclass(frozen=True)
class CrossingQuery:
    a: float
    b: float
    beta: float = 1.0

    def __post_init__(self):
        if not (self.a > 0.0 and math.isfinite(self.a)):
            raise DomainError(f"a must be positive and finite, got {self.a}")
        if not (self.a >= self.b >= 0.0):
            raise DomainError(f"need a >= b >= 0, got a={self.a}, b={self.b}")
        if not (0.0 < self.beta <= 1.0):
            raise DomainError(f"beta must lie in (0, 1], got {self.beta}")
        if self.b == 0.0 and self.a != int(self.a):
            raise DomainError(
                f"b = 0 requires an integer branch index a, got a={self.a}"
            )

    def time(self) -> float:
        return crossing_time(self.a, self.b, self.beta)

    def value(self) -> float:
        return crossing_value(self.a, self.b, self.beta)

    def residual(self, T: float) -> float:
        return crossing_residual(self.a, self.b, self.beta, T)


def _branch_lo(a, x, beta):
    # a (coth(ax) - sqrt(coth(ax)^2 - beta)), rationalized
    return a * beta / (coth(a * x) + sqrt_coth2_minus(a * x, beta))


def _branch_hi(b, x, beta):
    return b * (coth(b * x) + sqrt_coth2_minus(b * x, beta))


def _difference(a, b, beta):
    if b == 0.0:
        return lambda x: _branch_lo(a, x, beta) - 2.0 / x
    return lambda x: _branch_lo(a, x, beta) - _branch_hi(b, x, beta)


def _check_exists(a, b, beta):
    if b == 0.0:
        return
    alpha = alpha_from_beta(beta)
    if not (alpha < a / b):
        raise NoCrossing(
            f"branches never meet: requires alpha < a/b, "
            f"but alpha = {alpha:.6g} >= {a:.6g}/{b:.6g}"
        )


def crossing_time(a: float, b: float, beta: float = 1.0) -> float:
    """The unique root T of the crossing equation, or NoCrossing."""
    q = CrossingQuery(a, b, beta)  # validates
    _check_exists(q.a, q.b, q.beta)
    d = _difference(q.a, q.b, q.beta)

    lo, hi = 1e-8, 1.0
    flo = d(lo)
    if flo >= 0.0:
        # root below the initial bracket; shrink (cannot happen for sane
        # parameters, the difference tends to -inf at 0+)
        for _ in range(_MAX_GROW):
            hi, lo = lo, lo / _GROW
            flo = d(lo)
            if flo < 0.0:
                break
        else:
            raise NumericalError("failed to bracket the crossing from below")
    fhi = d(hi)
    grows = 0
    while fhi <= 0.0:
        grows += 1
        if grows > _MAX_GROW:
            raise NumericalError(
                f"failed to bracket the crossing after {_MAX_GROW} expansions"
            )
        lo, flo = hi, fhi
        hi *= _GROW
        fhi = d(hi)

    # bisection to a narrow interval
    while hi - lo > _BISECT_WIDTH:
        mid = 0.5 * (lo + hi)
        fm = d(mid)
        if fm < 0.0:
            lo, flo = mid, fm
        elif fm > 0.0:
            hi, fhi = mid, fm
        else:
            return mid

    # secant polish inside the bracket
    x0, f0, x1, f1 = lo, flo, hi, fhi
    for _ in range(60):
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not (lo <= x2 <= hi):
            x2 = 0.5 * (lo + hi)
        f2 = d(x2)
        if f2 < 0.0:
            lo = x2
        elif f2 > 0.0:
            hi = x2
        else:
            return x2
        if abs(x2 - x1) <= _REL_TOL * abs(x2):
            return x2
        x0, f0, x1, f1 = x1, f1, x2, f2
    return x1


def crossing_value(a: float, b: float, beta: float = 1.0) -> float:
    """The common unnormalized branch value u(a, b) at the crossing time.

    The normalized eigenvalue there is 4 pi u / beta.
    """
    t = crossing_time(a, b, beta)
    return _branch_lo(a, t, beta)


def crossing_residual(a: float, b: float, beta: float, T: float) -> float:
    """Absolute residual of the defining crossing equation at T."""
    q = CrossingQuery(a, b, beta)  # validates
    if not (math.isfinite(T) and T > 0.0):
        raise DomainError(f"T must be positive and finite, got {T}")
    return abs(_difference(q.a, q.b, q.beta)(T))


@lru_cache(maxsize=None)
def t20_of_one() -> float:
    """T_{2,0}(1), the root of s = coth(s); about 1.19968."""
    return crossing_time(2, 0, 1.0)


@lru_cache(maxsize=None)
def tk1_of_one(k: int) -> float:
    """T_{k,1}(1), the root of k tanh(ks/2) = coth(s/2), k >= 2."""
    if not isinstance(k, int) or k < 2:
        raise DomainError(f"need integer k >= 2, got {k}")
    return crossing_time(k, 1, 1.0)


def f_beta_monotone_witness(beta: float, t: float) -> float:
    """f_beta(t) = t^{-2} (sinh^2(t) sqrt(coth(t)^2 - beta) - t).

    Strictly increasing in t for every beta in [0, 1]; exposed for the
    property suite. Equals (sinh(t) sqrt(1 + (1-beta) sinh(t)^2) - t)/t^2;
    the direct form cancels near 0, so below t = 1e-3 a series in
    g = 1 - beta takes over:

      (1/6 + g/2) t + (1/120 + g/4 - g^2/8) t^3
          + (1/5040 + 13g/240 - 5g^2/48 + g^3/16) t^5
    """
    if not (t > 0.0):
        raise DomainError(f"t must be positive, got {t}")
    if not (0.0 <= beta <= 1.0):
        raise DomainError(f"beta must lie in [0, 1], got {beta}")
    g = 1.0 - beta
    if t < 1e-3:
        t2 = t * t
        return t * (
            (1.0 / 6.0 + g / 2.0)
            + t2 * ((1.0 / 120.0 + g / 4.0 - g * g / 8.0)
                    + t2 * (1.0 / 5040.0 + 13.0 * g / 240.0
                            - 5.0 * g * g / 48.0 + g ** 3 / 16.0))
        )
    if t > 350.0:
        return math.inf  # overflows float; still monotone-consistent
    s = math.sinh(t)
    return (s * math.sqrt(1.0 + g * s * s) - t) / (t * t)
