"""Log-domain multivariate gamma functions and relatives.

All gamma quantities here are positive under their preconditions, so only
logarithms are returned.  The one exception, the reflected Pochhammer
symbol used to cross-check the type II gamma, returns ``(sign, log|.|)``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from .errors import DomainError
from .hwv import as_weight

LOG_PI = math.log(math.pi)


def _check_beta(beta):
    if beta not in (1, 2, 4, 8):
        raise DomainError(f"beta must be one of 1, 2, 4, 8, got {beta}")


def lgamma_m(a: float, beta: int, m: int) -> float:
    """``log Gamma_m^beta[a] = m(m-1)beta/4 log(pi) + sum_i log Gamma(a - (i-1)beta/2)``."""
    _check_beta(beta)
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    if not a > (m - 1) * beta / 2:
        raise DomainError(f"multivariate gamma needs a > (m-1)beta/2 = {(m - 1) * beta / 2}, got a={a}")
    i = np.arange(m)
    return float(m * (m - 1) * beta / 4 * LOG_PI + gammaln(a - i * beta / 2).sum())


def lgamma_m_weighted(a: float, kappa, beta: int, m: int | None = None, sign: int = +1) -> float:
    """Generalized gamma of weight ``kappa``.

    ``sign=+1``: ``pi^{m(m-1)beta/4} prod Gamma(a + k_i - (i-1)beta/2)``, which
    needs ``a + k_m > (m-1)beta/2``.

    ``sign=-1``: ``pi^{m(m-1)beta/4} prod Gamma(a - k_i - (m-i)beta/2)``, the
    gamma integral against ``q_kappa(A^{-1})``; needs ``a - k_1 > (m-1)beta/2``.
    """
    _check_beta(beta)
    k = as_weight(kappa, m).array()
    m = len(k)
    i = np.arange(1, m + 1)
    if sign > 0:
        args = a + k - (i - 1) * beta / 2
        cond = "a + k_m > (m-1)beta/2"
    else:
        args = a - k - (m - i) * beta / 2
        cond = "a - k_1 > (m-1)beta/2"
    bad = np.flatnonzero(~(args > 0))
    if bad.size:
        j = int(bad[0]) + 1
        raise DomainError(
            f"weighted gamma (sign {'+' if sign > 0 else '-'}) requires {cond}; "
            f"factor i={j} has argument {args[j - 1]:g} <= 0")
    return float(m * (m - 1) * beta / 4 * LOG_PI + gammaln(args).sum())


def log_gen_pochhammer(a: float, kappa, beta: int) -> float:
    """``log [a]_kappa^beta = log Gamma_m[a, kappa] - log Gamma_m[a]``."""
    k = as_weight(kappa)
    m = len(k)
    return lgamma_m_weighted(a, k, beta, m, +1) - lgamma_m(a, beta, m)


def signed_gen_pochhammer(b: float, kappa, beta: int) -> tuple[int, float]:
    """``[b]_kappa^beta = prod_i (b - (i-1)beta/2)_{k_i}`` for integer ``kappa``.

    Evaluated as an explicit product so that negative ``b`` is allowed;
    returns ``(sign, log|value|)`` and ``(0, -inf)`` when a factor vanishes.
    """
    k = as_weight(kappa).array()
    if np.any(k != np.round(k)) or np.any(k < 0):
        raise DomainError("explicit Pochhammer product needs a nonnegative integer weight")
    sign, logabs = 1, 0.0
    for i, ki in enumerate(k.astype(int)):
        base = b - i * beta / 2
        for j in range(ki):
            f = base + j
            if f == 0:
                return 0, -math.inf
            sign *= 1 if f > 0 else -1
            logabs += math.log(abs(f))
    return sign, logabs


def lgamma_m_weighted_reflected(a: float, kappa, beta: int) -> tuple[int, float]:
    """``(-1)^{|kappa|} Gamma_m[a] / [-a + (m-1)beta/2 + 1]_kappa`` as ``(sign, log|.|)``.

    For integer weights this equals ``Gamma_m[a, -kappa]``.
    """
    k = as_weight(kappa)
    m = len(k)
    s, lp = signed_gen_pochhammer(-a + (m - 1) * beta / 2 + 1, k, beta)
    if s == 0:
        raise DomainError("reflected Pochhammer symbol vanishes")
    parity = -1 if int(round(k.total)) % 2 else 1
    return parity * s, lgamma_m(a, beta, m) - lp


def log_stiefel_volume(n: int, m: int, beta: int) -> float:
    """``log Vol(V_{m,n}^beta) = log(2^m pi^{mn beta/2} / Gamma_m^beta[n beta/2])``."""
    if not (n >= m >= 1):
        raise DomainError(f"Stiefel volume needs n >= m >= 1, got n={n}, m={m}")
    return m * math.log(2) + m * n * beta / 2 * LOG_PI - lgamma_m(n * beta / 2, beta, m)


def log_sphere_area(dim: int) -> float:
    """``log`` of the surface area of the unit sphere in ``R^dim``."""
    return math.log(2) + dim / 2 * LOG_PI - math.lgamma(dim / 2)


def log_pi_varrho(beta: int, m: int) -> float:
    """``log pi^varrho`` in the singular value Jacobian.

    ``pi^varrho = (Gamma(beta/2) / pi^{beta/2})^m`` removes the phase group
    ``S^{beta-1}`` carried by each singular vector pair: 1, ``pi^-m`` and
    ``pi^-2m`` for beta = 1, 2, 4.  For beta = 8 this gives ``(6/pi^4)^m``.
    """
    _check_beta(beta)
    return m * (math.lgamma(beta / 2) - beta / 2 * LOG_PI)
