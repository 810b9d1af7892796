"""Zonal spherical polynomials ``C_tau^beta`` (Jack polynomials, ``alpha = 2/beta``).

Monomial coefficients of the monic Jack polynomial ``P_tau`` come from the
eigen-equation of the Laplace-Beltrami type operator

    D = (alpha/2) sum x_i^2 d_i^2 + sum_{i != j} x_i^2 / (x_i - x_j) d_i,

which is upper triangular in dominance order on monomial symmetric
functions.  Writing ``rho_tau = sum t_i (t_i - 1 - (2/alpha)(i - 1))``,

    c[tau][lam] = 2/(alpha (rho_tau - rho_lam))
                  * sum_{i<j, t>=1} (lam_i - lam_j + 2t) c[tau][mu],

where ``mu`` is ``lam`` with ``(lam_i, lam_j) -> (lam_i + t, lam_j - t)``.
The C-normalization is then fixed by ``sum_{|tau|=k} C_tau = (sum x_i)^k``.
Coefficients are exact rationals.
"""

from __future__ import annotations

import json
import math
import threading
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import hwv, linalg
from .errors import TooManyParts, UnsupportedAlgebra, WeightTooLarge

K_MAX = 10


@lru_cache(maxsize=None)
def partitions(k: int) -> tuple[tuple[int, ...], ...]:
    """Partitions of ``k`` in decreasing lexicographic order."""
    out = []

    def rec(rest, cap, prefix):
        if rest == 0:
            out.append(tuple(prefix))
            return
        for p in range(min(rest, cap), 0, -1):
            rec(rest - p, p, prefix + [p])

    rec(k, k, [])
    return tuple(out)


def dominates(a, b) -> bool:
    """``a >= b`` in dominance order (same weight assumed)."""
    sa = sb = 0
    for i in range(max(len(a), len(b))):
        sa += a[i] if i < len(a) else 0
        sb += b[i] if i < len(b) else 0
        if sa < sb:
            return False
    return True


def _rho(p, alpha: Fraction) -> Fraction:
    return sum((Fraction(t * (t - 1)) - Fraction(2) / alpha * i * t for i, t in enumerate(p)),
               Fraction(0))


def _raise_moves(lam):
    """Partitions ``mu`` reached by moving ``t`` boxes from row j to row i < j."""
    lam = list(lam)
    for i in range(len(lam)):
        for j in range(i + 1, len(lam)):
            for t in range(1, lam[j] + 1):
                mu = lam.copy()
                mu[i] += t
                mu[j] -= t
                mu = tuple(sorted((x for x in mu if x), reverse=True))
                yield mu, lam[i] - lam[j] + 2 * t


def _monic_coeffs(tau, alpha: Fraction) -> dict:
    k = sum(tau)
    rho_tau = _rho(tau, alpha)
    c = {tau: Fraction(1)}
    for lam in partitions(k):
        if lam == tau or not dominates(tau, lam):
            continue
        acc = Fraction(0)
        for mu, w in _raise_moves(lam):
            if mu in c:
                acc += w * c[mu]
        if acc:
            c[lam] = Fraction(2) / alpha * acc / (rho_tau - _rho(lam, alpha))
    return c


def _multinomial(k, mu) -> int:
    out = math.factorial(k)
    for p in mu:
        out //= math.factorial(p)
    return out


class JackTable:
    """Monomial coefficients of ``C_tau`` for every partition of one weight."""

    def __init__(self, weight: int, alpha: Fraction):
        self.weight = weight
        self.alpha = alpha
        parts = partitions(weight)
        monic = {tau: _monic_coeffs(tau, alpha) for tau in parts}
        # sum rule, solved top-down in lexicographic order (c[mu][mu] = 1)
        scale = {}
        for mu in parts:
            s = Fraction(_multinomial(weight, mu))
            for tau, sc in scale.items():
                s -= sc * monic[tau].get(mu, 0)
            scale[mu] = s
        self.coeffs = {tau: {mu: scale[tau] * c for mu, c in monic[tau].items()}
                       for tau in parts}

    def to_json(self) -> dict:
        key = lambda p: ",".join(map(str, p))
        return {
            "alpha": float(self.alpha),
            "weight": self.weight,
            "coeffs": {key(t): {key(mu): float(c) for mu, c in row.items()}
                       for t, row in self.coeffs.items()},
        }


_tables: dict = {}
_lock = threading.Lock()


def jack_table(weight: int, beta: int) -> JackTable:
    alpha = Fraction(2, beta)
    key = (weight, alpha)
    table = _tables.get(key)
    if table is None:
        with _lock:
            table = _tables.get(key)
            if table is None:
                table = JackTable(weight, alpha)
                _tables[key] = table
    return table


def dump_table(weight: int, beta: int) -> str:
    return json.dumps(jack_table(weight, beta).to_json(), sort_keys=True)


@lru_cache(maxsize=None)
def _distinct_perms(mu: tuple, m: int) -> np.ndarray:
    """Distinct rearrangements of ``mu`` padded with zeros to length ``m``."""
    padded = list(mu) + [0] * (m - len(mu))
    out = []

    def rec(remaining, prefix):
        if not remaining:
            out.append(prefix)
            return
        for v in sorted(set(remaining), reverse=True):
            rest = remaining.copy()
            rest.remove(v)
            rec(rest, prefix + [v])

    rec(padded, [])
    return np.array(out, dtype=float).reshape(-1, m)


def monomial(mu, x) -> np.ndarray:
    """Monomial symmetric function ``m_mu`` evaluated on the last axis of ``x``."""
    x = np.asarray(x, dtype=float)
    m = x.shape[-1]
    mu = tuple(p for p in mu if p)
    if len(mu) > m:
        return np.zeros(x.shape[:-1])
    e = _distinct_perms(mu, m)
    return np.prod(x[..., None, :] ** e, axis=-1).sum(axis=-1)


def _as_partition(tau) -> hwv.Partition:
    return tau if isinstance(tau, hwv.Partition) else hwv.Partition(tau)


def jack_C(tau, eigenvalues, beta: int, k_max: int = K_MAX) -> np.ndarray:
    """C-normalized Jack polynomial with ``alpha = 2/beta`` at the given eigenvalues.

    ``eigenvalues`` may carry batch axes in front; the last axis has length m.
    """
    tau = _as_partition(tau)
    x = np.asarray(eigenvalues, dtype=float)
    m = x.shape[-1]
    if tau.weight > k_max:
        raise WeightTooLarge(f"|tau| = {tau.weight} exceeds k_max = {k_max}")
    if len(tau) > m:
        raise TooManyParts(f"partition {tau.parts} has more than m = {m} parts")
    if tau.weight == 0:
        return np.ones(x.shape[:-1])
    row = jack_table(tau.weight, beta).coeffs[tau.parts]
    return sum(float(c) * monomial(mu, x) for mu, c in row.items() if len(mu) <= m)


def jack_C_identity(tau, m: int, beta: int, k_max: int = K_MAX) -> float:
    """``C_tau^beta(I_m)``; zero when ``tau`` has more than ``m`` parts."""
    tau = _as_partition(tau)
    if len(tau) > m:
        if tau.weight > k_max:
            raise WeightTooLarge(f"|tau| = {tau.weight} exceeds k_max = {k_max}")
        return 0.0
    return float(jack_C(tau, np.ones(m), beta, k_max))


def spherical_average_q(rng: np.random.Generator, tau, L, beta: int, N: int,
                        chunk: int = 50_000) -> tuple[float, float]:
    """Monte Carlo mean of ``q_tau(H L H*)`` over Haar ``H``; returns ``(mean, stderr)``.

    Converges to ``C_tau(eig L) / C_tau(I_m)``.
    """
    if beta not in (1, 2, 4):
        raise UnsupportedAlgebra(f"Haar sampling is not available for beta={beta}")
    if N < 1:
        raise ValueError("N must be positive")
    L, beta = linalg.as_native(L, beta)
    m = linalg.native_shape(L, beta)[0]
    w = _as_partition(tau).as_weight(m)
    total = total_sq = 0.0
    done = 0
    while done < N:
        size = min(chunk, N - done)
        h = linalg.haar_stiefel(rng, m, m, beta, size)
        a = linalg.hermitize(h @ L @ linalg.adjoint(h))
        v = np.exp(hwv.log_q_kappa(a, w, beta))
        total += v.sum()
        total_sq += (v * v).sum()
        done += size
    mean = total / N
    var = max(total_sq / N - mean * mean, 0.0)
    return float(mean), float(math.sqrt(var / N))
