"""Validated parameter bundles for the Riesz family.

Every bundle checks the existence condition of its distribution at
construction and raises :class:`DomainError` naming the violated condition.
Matrix parameters are stored in native form (see :mod:`riesz_lab.linalg`);
``None`` means the identity (or zero for a location).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DomainError, ShapeMismatch
from .hwv import WeightVector, as_weight

VARIANTS = ("I", "II")


def _variant(v: str) -> str:
    v = str(v).upper()
    if v not in VARIANTS:
        raise DomainError(f"variant must be 'I' or 'II', got {v!r}")
    return v


def _square(x, beta, dim, name):
    if x is None:
        return linalg.identity(dim, beta)
    x, _ = linalg.as_native(x, beta)
    if linalg.native_shape(x, beta) != (dim, dim):
        raise ShapeMismatch(f"{name} must be {dim}x{dim}")
    x = linalg.hermitize(x)
    linalg.cholesky_upper(x, beta)
    return x


def _location(x, beta, n, m):
    if x is None:
        b = linalg.block_size(beta)
        return np.zeros((b * n, b * m), dtype=float if beta == 1 else complex)
    x, _ = linalg.as_native(x, beta)
    if linalg.native_shape(x, beta) != (n, m):
        raise ShapeMismatch(f"mu must be {n}x{m}")
    return x


@dataclass
class RieszParams:
    """Riesz law on ``P_m``: shape ``a``, weight ``kappa``, scale ``Xi``."""

    a: float
    kappa: WeightVector
    Xi: np.ndarray | None = None
    beta: int = 1
    variant: str = "I"

    def __post_init__(self):
        self.variant = _variant(self.variant)
        self.kappa = as_weight(self.kappa)
        m = len(self.kappa)
        b = self.beta
        if self.variant == "I" and not self.a > (m - 1) * b / 2 - self.kappa[-1]:
            raise DomainError(
                f"Riesz type I requires a > (m−1)β/2 − k_m; got a={self.a}, m={m}, β={b}, "
                f"k_m={self.kappa[-1]}")
        if self.variant == "II" and not self.a > (m - 1) * b / 2 + self.kappa[0]:
            raise DomainError(
                f"Riesz type II requires a > (m−1)β/2 + k_1; got a={self.a}, m={m}, β={b}, "
                f"k_1={self.kappa[0]}")
        linalg.require_matrix_algebra(b)
        self.Xi = _square(self.Xi, b, m, "Xi")

    @property
    def m(self) -> int:
        return len(self.kappa)


def _check_kr(n, m, w, beta, variant, label="t"):
    if n < m:
        raise DomainError(f"need n >= m, got n={n}, m={m}")
    if variant == "I" and not n * beta / 2 > (m - 1) * beta / 2 - w[-1]:
        raise DomainError(
            f"type I requires nβ/2 > (m−1)β/2 − {label}_m; got n={n}, m={m}, β={beta}, "
            f"{label}_m={w[-1]}")
    if variant == "II" and not n * beta / 2 > (m - 1) * beta / 2 + w[0]:
        raise DomainError(
            f"type II requires nβ/2 > (m−1)β/2 + {label}_1; got n={n}, m={m}, β={beta}, "
            f"{label}_1={w[0]}")


def _check_mixing(nu, k, rho, beta, variant):
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}")
    if variant == "I" and not nu * beta / 2 + k > 0:
        raise DomainError(f"type I requires νβ/2 + k > 0; got ν={nu}, k={k}, β={beta}")
    if variant == "II" and not nu * beta / 2 - k > 0:
        raise DomainError(f"type II requires νβ/2 − k > 0; got ν={nu}, k={k}, β={beta}")


@dataclass
class KotzRieszParams:
    """Kotz-Riesz law on ``n x m`` matrices (``Theta`` n x n rows, ``Sigma`` m x m columns)."""

    n: int
    kappa: WeightVector
    beta: int = 1
    variant: str = "I"
    mu: np.ndarray | None = None
    Theta: np.ndarray | None = None
    Sigma: np.ndarray | None = None

    def __post_init__(self):
        self.variant = _variant(self.variant)
        self.kappa = as_weight(self.kappa)
        linalg.require_matrix_algebra(self.beta)
        _check_kr(self.n, self.m, self.kappa, self.beta, self.variant, "k")
        self.mu = _location(self.mu, self.beta, self.n, self.m)
        self.Theta = _square(self.Theta, self.beta, self.n, "Theta")
        self.Sigma = _square(self.Sigma, self.beta, self.m, "Sigma")

    @property
    def m(self) -> int:
        return len(self.kappa)


@dataclass
class TRieszParams:
    """Matrix T-Riesz law ``T = S^{-1/2} Y + mu``.

    ``nu`` and ``k`` parameterize the scalar Riesz mixing variable ``S``;
    ``tau`` is the Kotz-Riesz weight of ``Y``; ``rho`` the scalar scale.
    For ``beta = 8`` the matrix parameters must stay ``None`` and only the
    scalar formulas (singular value and eigenvalue densities) apply.
    """

    n: int
    nu: float
    k: float
    tau: WeightVector
    rho: float = 1.0
    beta: int = 1
    variant: str = "I"
    mu: np.ndarray | None = None
    Theta: np.ndarray | None = None
    Sigma: np.ndarray | None = None
    standard: bool = field(init=False, default=True)

    def __post_init__(self):
        self.variant = _variant(self.variant)
        self.tau = as_weight(self.tau)
        linalg.algebra(self.beta)
        _check_mixing(self.nu, self.k, self.rho, self.beta, self.variant)
        _check_kr(self.n, self.m, self.tau, self.beta, self.variant)
        self.standard = self.mu is None and self.Theta is None and self.Sigma is None
        if self.beta == 8:
            if not self.standard:
                raise DomainError("beta=8 supports only mu=0, Theta=I, Sigma=I")
            return
        self.mu = _location(self.mu, self.beta, self.n, self.m)
        self.Theta = _square(self.Theta, self.beta, self.n, "Theta")
        self.Sigma = _square(self.Sigma, self.beta, self.m, "Sigma")

    @property
    def m(self) -> int:
        return len(self.tau)

    def kotz_riesz(self) -> KotzRieszParams:
        """Parameters of the ``Y`` factor (centred)."""
        return KotzRieszParams(self.n, self.tau, self.beta, self.variant,
                               None, self.Theta, self.Sigma)


def is_partition(w) -> bool:
    return all(t >= 0 and float(t).is_integer() for t in w)


@dataclass
class BetaRieszParams:
    """Law of ``F = T* T`` for ``T`` T-Riesz with ``mu = 0``, ``Theta = I``."""

    n: int
    nu: float
    k: float
    tau: WeightVector
    rho: float = 1.0
    beta: int = 1
    variant: str = "I"
    Sigma: np.ndarray | None = None

    def __post_init__(self):
        self.variant = _variant(self.variant)
        self.tau = as_weight(self.tau)
        linalg.require_matrix_algebra(self.beta)
        _check_mixing(self.nu, self.k, self.rho, self.beta, self.variant)
        _check_kr(self.n, self.m, self.tau, self.beta, self.variant)
        self.Sigma = _square(self.Sigma, self.beta, self.m, "Sigma")

    @property
    def m(self) -> int:
        return len(self.tau)

    def t_riesz(self) -> TRieszParams:
        return TRieszParams(self.n, self.nu, self.k, self.tau, self.rho, self.beta,
                            self.variant, None, None, self.Sigma)
