"""Highest weight vectors (generalized powers) of positive definite matrices.

``q_kappa(A) = |A_m|^{k_m} prod_i |A_i|^{k_i - k_{i+1}}`` where ``A_i`` is the
leading ``i x i`` block.  Equivalently ``q_kappa(A) = prod_i lambda_i^{k_i}``
with ``lambda`` the pivots of ``A = L* D L`` (``L`` unit upper triangular).

The starred companion ``q*_kappa`` is built the same way from *trailing*
principal minors, which makes ``q_kappa(A^{-1}) = q*_{-kappa*}(A)`` hold for
every positive definite ``A``.  All functions return logarithms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg


@dataclass(frozen=True)
class WeightVector:
    """Real, weakly decreasing weight ``(k_1 >= ... >= k_m)``."""

    entries: tuple

    def __init__(self, entries):
        vals = tuple(float(k) for k in np.atleast_1d(np.asarray(entries, dtype=float)))
        if not vals:
            raise ValueError("weight vector must have at least one entry")
        if not all(np.isfinite(vals)):
            raise ValueError(f"weight entries must be finite, got {vals}")
        if any(a < b for a, b in zip(vals, vals[1:])):
            raise ValueError(f"weight must be weakly decreasing, got {vals}")
        object.__setattr__(self, "entries", vals)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __add__(self, other):
        other = as_weight(other, len(self))
        return WeightVector(np.add(self.entries, other.entries))

    @property
    def total(self) -> float:
        return float(sum(self.entries))

    def reversed_negated(self) -> "WeightVector":
        """``-kappa* = (-k_m, ..., -k_1)``, again weakly decreasing."""
        return WeightVector([-k for k in reversed(self.entries)])

    def array(self) -> np.ndarray:
        return np.asarray(self.entries)

    @property
    def is_zero(self) -> bool:
        return all(k == 0 for k in self.entries)


@dataclass(frozen=True)
class Partition:
    """Integer partition ``t_1 >= ... >= t_m >= 0`` (trailing zeros dropped)."""

    parts: tuple

    def __init__(self, parts):
        vals = [int(p) for p in np.atleast_1d(parts)]
        if any(int(p) != float(p) for p in np.atleast_1d(parts)):
            raise ValueError(f"partition parts must be integers, got {parts}")
        if any(p < 0 for p in vals):
            raise ValueError(f"partition parts must be nonnegative, got {vals}")
        if any(a < b for a, b in zip(vals, vals[1:])):
            raise ValueError(f"partition must be weakly decreasing, got {vals}")
        while vals and vals[-1] == 0:
            vals.pop()
        object.__setattr__(self, "parts", tuple(vals))

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def padded(self, m: int) -> tuple:
        if len(self.parts) > m:
            raise ValueError(f"partition {self.parts} has more than {m} parts")
        return self.parts + (0,) * (m - len(self.parts))

    def as_weight(self, m: int) -> WeightVector:
        return WeightVector(self.padded(m))


def as_weight(kappa, m: int | None = None) -> WeightVector:
    if isinstance(kappa, Partition):
        if m is None:
            m = len(kappa)
        return kappa.as_weight(m)
    w = kappa if isinstance(kappa, WeightVector) else WeightVector(kappa)
    if m is not None and len(w) != m:
        raise ValueError(f"weight has {len(w)} entries, matrix dimension is {m}")
    return w


def _dim(a, beta):
    a, beta = linalg.as_native(a, beta)
    return a, beta, linalg.native_shape(a, beta)[0]


def log_q_kappa(a, kappa, beta: int | None = None) -> np.ndarray:
    """``log q_kappa(A) = sum_i k_i log lambda_i`` over the LDL pivots of ``A``."""
    a, beta, m = _dim(a, beta)
    k = as_weight(kappa, m).array()
    return np.log(linalg.ldl_pivots(a, beta)) @ k


def log_q_star_kappa(a, kappa, beta: int | None = None) -> np.ndarray:
    """``log q*_kappa(A) = sum_i k_{m-i+1} log d_i`` over trailing-minor pivots ``d``."""
    a, beta, m = _dim(a, beta)
    k = as_weight(kappa, m).array()
    return np.log(linalg.trailing_pivots(a, beta)) @ k[::-1]


def log_q_kappa_inv(a, kappa, beta: int | None = None) -> np.ndarray:
    """``log q_kappa(A^{-1})`` computed as ``log q*_{-kappa*}(A)``; no inverse is formed."""
    a, beta, m = _dim(a, beta)
    return log_q_star_kappa(a, as_weight(kappa, m).reversed_negated(), beta)


def log_q_minors(a, kappa, beta: int | None = None) -> np.ndarray:
    """Principal-minor form ``|A_m|^{k_m} prod |A_i|^{k_i - k_{i+1}}`` (reference path)."""
    a, beta, m = _dim(a, beta)
    k = as_weight(kappa, m).array()
    b = linalg.block_size(beta)
    expo = np.append(k[:-1] - k[1:], k[-1])
    total = 0.0
    for i in range(1, m + 1):
        sub = a[..., : b * i, : b * i]
        sign, ld = np.linalg.slogdet(sub)
        total = total + expo[i - 1] * np.real(ld) / b
    return total


def masked_log_pivots(a, beta: int, trailing: bool = False):
    """Log pivots and validity mask; invalid (non-PD) entries give NaN pivots.

    Any strictly positive pivot counts as valid: ill-conditioned points are
    still inside the cone.
    """
    src = linalg.flip(a) if trailing else a
    t, ok = linalg.cholesky_masked(src, beta, rtol=0.0)
    d = np.real(np.diagonal(t, axis1=-2, axis2=-1))[..., :: linalg.block_size(beta)]
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = 2.0 * np.log(d)
    if trailing:
        logs = logs[..., ::-1]
    return logs, ok
