"""Stable scalar hyperbolic helpers.

Everything downstream reduces to coth, csch and the combination
sqrt(coth(x)^2 - beta). The naive forms overflow near x = 700 and cancel
catastrophically for large x with beta near 1, so:

  coth(x) = 1 + 2/expm1(2x)            for x > 0.5 (exact limit behavior)
  csch(x) = 2 e^{-x} / (1 - e^{-2x})    (never overflows for x > 0)
  sqrt(coth(x)^2 - beta) = hypot(sqrt(1-beta), csch(x))

The last identity uses coth^2 - 1 = csch^2, so
coth^2 - beta = (1 - beta) + csch^2, a sum of squares: no cancellation.
"""

import math


def coth(x):
    if x <= 0.0:
        raise ValueError("coth requires x > 0")
    if x > 354.0:
        # expm1(2x) overflows there; the correction is below subnormal
        return 1.0
    if x > 0.5:
        return 1.0 + 2.0 / math.expm1(2.0 * x)
    return math.cosh(x) / math.sinh(x)


def csch(x):
    if x <= 0.0:
        raise ValueError("csch requires x > 0")
    if x > 700.0:
        # 2e^{-x} underflows gracefully; denominator is 1 to machine precision
        return 2.0 * math.exp(-x)
    e = math.exp(-x)
    return 2.0 * e / (1.0 - e * e)


def sqrt_coth2_minus(x, beta, sqrt1mb=None):
    """sqrt(coth(x)^2 - beta) for x > 0, beta in [0, 1], no cancellation.

    When the caller knows alpha, pass sqrt1mb = (alpha-1)/(alpha+1), which
    equals sqrt(1-beta) exactly and avoids recomputing it with roundoff.
    """
    if sqrt1mb is None:
        sqrt1mb = math.sqrt(max(1.0 - beta, 0.0))
    return math.hypot(sqrt1mb, csch(x))
