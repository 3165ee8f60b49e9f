"""Suprema M_k of the k-th normalized eigenvalue over all rotationally
symmetric metrics, their attaining configurations, and the piecewise
upper-bound certificates behind them.

Closed forms, with T20 = T_{2,0}(1) (root of s = coth s) and T_{k,1}(1)
(root of k tanh(ks/2) = coth(s/2)):

  M_{2m-1} = 4 m pi / T20,             attained at alpha=1, T = 2 T20 / m
  M_2      = 4 pi,                     approached (alpha=1, T -> infinity),
                                       never attained
  M_{2m}   = 4 m pi tanh(m T_{m,1}(1)/2)  (m >= 2)
           = 4 pi coth(T_{m,1}(1)/2),  attained at alpha=1, T = T_{m,1}(1)

The two M_{2m} expressions are computed independently and must agree; the
solver self-checks this on every call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .crossings import crossing_time, t20_of_one, tk1_of_one
from .errors import DomainError, NumericalError
from .spectral import (INFINITE_T, MetricShape, eval_lambda, shape,
                       sigma_k_grid)


@dataclass(frozen=True)
class SupremumResult:
    k: int
    value: float
    attained: bool
    maximizer: MetricShape


@dataclass(frozen=True)
class PartitionCase:
    """One row of the piecewise upper-bound table: on [t_lo, t_hi) the
    eigenvalue is bounded by `bound`, realized by branch Lambda_{source_n}
    frozen at T = source_T (source_T = INFINITE_T for limit rows, None when
    the bound is the branch value at the queried T itself)."""

    j: Optional[int]
    t_lo: float
    t_hi: float
    bound: float
    source_n: int
    source_T: Optional[float]


def supremum(k: int) -> SupremumResult:
    if not isinstance(k, int) or k < 1:
        raise DomainError(f"k must be an integer >= 1 (rank 0 is trivially 0), got {k}")
    if k % 2 == 1:
        m = (k + 1) // 2
        t20 = t20_of_one()
        value = 4.0 * m * math.pi / t20
        return SupremumResult(k, value, True, shape(1.0, 2.0 * t20 / m))
    if k == 2:
        return SupremumResult(
            2, 4.0 * math.pi, False,
            MetricShape(alpha=1.0, beta=1.0, T=INFINITE_T),
        )
    m = k // 2
    t = tk1_of_one(m)
    v_tanh = 4.0 * m * math.pi * math.tanh(0.5 * m * t)
    v_coth = 4.0 * math.pi / math.tanh(0.5 * t)
    if abs(v_tanh - v_coth) > 1e-10 * v_tanh:
        raise NumericalError(
            f"even-supremum self-check failed: {v_tanh} vs {v_coth}"
        )
    return SupremumResult(k, v_tanh, True, shape(1.0, t))


def _largest_s(k: int, alpha: float) -> int:
    # largest s >= 0 with (k-s)/s > alpha ((k-0)/0 counts as infinity)
    s = 0
    while k - (s + 1) > (s + 1) * alpha:
        s += 1
    return s


def _lam_at(beta_shape: MetricShape, n: int, T: Optional[float]) -> float:
    if n == 0:
        return 0.0  # Lambda_0 is identically zero
    if T is None or math.isinf(T):
        frozen = MetricShape(beta_shape.alpha, beta_shape.beta, INFINITE_T)
    else:
        frozen = MetricShape(beta_shape.alpha, beta_shape.beta, T)
    return eval_lambda(frozen, n).value


def sigma_upper_bound(k: int, parity: str, s_: MetricShape) -> tuple[float, PartitionCase]:
    """Piecewise upper bound for sigma~_{2k-1} (parity "odd") or
    sigma~_{2k} (parity "even") at the given shape.

    The T-axis is tiled by crossing times; each tile carries a bound of the
    form Lambda_{n}(beta, T_cross) or a T -> infinity limit. The even k=1
    row is exact: sigma~_2 = Lambda_1(beta, T).
    """
    if not isinstance(k, int) or k < 1:
        raise DomainError(f"k must be an integer >= 1, got {k}")
    if parity not in ("odd", "even"):
        raise DomainError(f'parity must be "odd" or "even", got {parity!r}')
    if s_.is_infinite:
        raise DomainError("bound certificates require finite T")
    alpha, beta, T = s_.alpha, s_.beta, s_.T
    s = _largest_s(k, alpha)
    ct = lambda a, b: crossing_time(a, b, beta)

    if parity == "even":
        if k == 1:
            bound = eval_lambda(s_, 1).value
            return bound, PartitionCase(None, 0.0, math.inf, bound, 1, None)
        t_k0 = ct(k, 0)
        if T < t_k0:
            return (_lam_at(s_, k, t_k0),
                    PartitionCase(None, 0.0, t_k0, _lam_at(s_, k, t_k0), k, t_k0))
        if s == 0:
            # single tail [T_{k,0}, inf); the subcase split is alpha vs k
            if alpha < k:
                t_k1 = ct(k, 1)
                return (_lam_at(s_, k, t_k1),
                        PartitionCase(None, t_k0, math.inf,
                                      _lam_at(s_, k, t_k1), k, t_k1))
            return (_lam_at(s_, k, INFINITE_T),
                    PartitionCase(None, t_k0, math.inf,
                                  _lam_at(s_, k, INFINITE_T), k, INFINITE_T))
        for j in range(0, s):
            lo = ct(k - j, j) if j > 0 else t_k0
            hi = ct(k - j - 1, j + 1)  # j = s-1 gives the tail start T_{k-s,s}
            if lo <= T < hi:
                t_src = ct(k - j, j + 1)
                return (_lam_at(s_, k - j, t_src),
                        PartitionCase(j, lo, hi, _lam_at(s_, k - j, t_src),
                                      k - j, t_src))
        lo = ct(k - s, s)
        if k - s > (s + 1) * alpha:
            t_src = ct(k - s, s + 1)
            return (_lam_at(s_, k - s, t_src),
                    PartitionCase(s, lo, math.inf,
                                  _lam_at(s_, k - s, t_src), k - s, t_src))
        return (_lam_at(s_, k - s, INFINITE_T),
                PartitionCase(s, lo, math.inf,
                              _lam_at(s_, k - s, INFINITE_T), k - s, INFINITE_T))

    # odd parity: sigma~_{2k-1}
    if k == 1:
        # T_{0,0} is infinite: one interval, bound Lambda_1 frozen at T_{1,0}
        t_src = ct(1, 0)
        return (_lam_at(s_, 1, t_src),
                PartitionCase(None, 0.0, math.inf, _lam_at(s_, 1, t_src), 1, t_src))
    t_head = ct(k - 1, 0)
    if T < t_head:
        t_src = ct(k, 0)
        return (_lam_at(s_, k, t_src),
                PartitionCase(None, 0.0, t_head, _lam_at(s_, k, t_src), k, t_src))
    if s == 0:
        return (_lam_at(s_, k - 1, INFINITE_T),
                PartitionCase(None, t_head, math.inf,
                              _lam_at(s_, k - 1, INFINITE_T), k - 1, INFINITE_T))
    for j in range(1, s):
        lo = ct(k - j, j - 1)
        hi = ct(k - j - 1, j)
        if lo <= T < hi:
            t_src = ct(k - j, j)
            return (_lam_at(s_, k - j, t_src),
                    PartitionCase(j, lo, hi, _lam_at(s_, k - j, t_src),
                                  k - j, t_src))
    lo = ct(k - s, s - 1)
    v_cross = _lam_at(s_, k - s, ct(k - s, s))
    v_limit = _lam_at(s_, k - s - 1, INFINITE_T)
    if v_cross >= v_limit:
        return (v_cross,
                PartitionCase(s, lo, math.inf, v_cross, k - s, ct(k - s, s)))
    return (v_limit,
            PartitionCase(s, lo, math.inf, v_limit, k - s - 1, INFINITE_T))


# corroboration grid defaults: alpha 1..4 step 0.05, T log-spaced
DEFAULT_ALPHA_GRID = np.round(np.arange(1.0, 4.0 + 1e-9, 0.05), 10)
DEFAULT_T_GRID = np.geomspace(0.05, 12.0, 256)


def scan_suprema(k: int, alpha_grid=None, T_grid=None) -> dict:
    """Grid corroboration of supremum(k): evaluates sigma~_k over the grid
    (vectorized equivalent of enumerate_spectrum's k-th entry) and reports
    max, argmax and margin to M_k. A grid value above M_k + 1e-9 would
    falsify the closed form and raises NumericalError.
    """
    res = supremum(k)
    alphas = DEFAULT_ALPHA_GRID if alpha_grid is None else np.asarray(alpha_grid, float)
    Ts = DEFAULT_T_GRID if T_grid is None else np.asarray(T_grid, float)
    values = sigma_k_grid(k, alphas, Ts)
    flat = int(np.argmax(values))
    i, j = divmod(flat, values.shape[1])
    vmax = float(values[i, j])
    if vmax > res.value + 1e-9:
        raise NumericalError(
            f"grid value {vmax} exceeds M_{k} = {res.value} at "
            f"alpha={alphas[i]}, T={Ts[j]}"
        )
    return {
        "k": k,
        "M_k": res.value,
        "attained": res.attained,
        "grid_max": vmax,
        "argmax_alpha": float(alphas[i]),
        "argmax_T": float(Ts[j]),
        "margin": res.value - vmax,
        "grid_shape": [int(len(alphas)), int(len(Ts))],
    }
