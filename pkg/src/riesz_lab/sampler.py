"""Constructive samplers for the Riesz family.

Every sampler takes an explicit random source (a :class:`RngStream` or a
``numpy.random.Generator``) and an optional ``size``; with ``size=None`` one
draw is returned without a batch axis.

Riesz matrices use Bartlett-type triangular factors.  Type I draws an upper
``T`` with ``t_ii^2 ~ Gamma(a + k_i - (i-1) beta/2, rate beta)`` and returns
``u(Xi)* T* T u(Xi)``.  Type II draws a *lower* ``L`` with
``l_ii^2 ~ Gamma(a - k_i - (m-i) beta/2, rate beta)`` and returns
``B* L* L B`` with ``B`` the lower factor of ``Xi``.  In both cases the
off-diagonal real coordinates are ``normal(0, 1/(2 beta))``.  The type II
factor must be lower triangular: ``q_k(V^{-1})`` is a product of powers of
trailing-minor pivots, which are exactly the squared diagonal of ``L``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DomainError
from .params import BetaRieszParams, KotzRieszParams, RieszParams, TRieszParams


@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream keyed by ``(seed, stream)``.

    Distinct stream ids give statistically independent generators, so
    parallel jobs can each take their own stream.
    """

    seed: int
    stream: int = 0

    def generator(self, chunk: int | None = None) -> np.random.Generator:
        """Generator for this stream, or for one numbered chunk of it.

        Chunked generators let a long run be split across workers while the
        output stays a function of ``(seed, stream)`` alone.
        """
        key = (self.stream,) if chunk is None else (self.stream, chunk)
        ss = np.random.SeedSequence(self.seed, spawn_key=key)
        return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _batch(size) -> tuple:
    return () if size is None else tuple(np.atleast_1d(size))


def sample_riesz_scalar(rng, nu: float, k: float, rho: float, beta: int = 1,
                        variant: str = "I", size=None):
    """Scalar Riesz variable: gamma with shape ``nu beta/2 ± k`` and rate ``beta/rho``."""
    rng = as_generator(rng)
    shape = nu * beta / 2 + (k if str(variant).upper() == "I" else -k)
    if not shape > 0:
        raise DomainError(f"scalar Riesz needs a positive gamma shape, got {shape:g}")
    if not rho > 0:
        raise DomainError(f"rho must be positive, got {rho}")
    return rng.gamma(shape, rho / beta, size=size)


def _bartlett(rng, a, k, beta, m, variant, batch):
    i = np.arange(m)
    if variant == "I":
        shapes = a + k - i * beta / 2
    else:
        shapes = a - k - (m - 1 - i) * beta / 2
    coords = rng.standard_normal(batch + (beta, m, m)) / np.sqrt(2 * beta)
    diag = np.sqrt(rng.gamma(shapes, 1.0 / beta, size=batch + (m,)))
    mask = np.triu(np.ones((m, m), bool), 1)
    if variant == "II":
        mask = mask.T
    coords = coords * mask
    coords[..., 0, i, i] = diag
    return linalg.from_coords(coords, beta)


def sample_riesz_matrix(rng, p: RieszParams, size=None) -> np.ndarray:
    """Riesz type I / II matrix in native form."""
    rng = as_generator(rng)
    t = _bartlett(rng, p.a, p.kappa.array(), p.beta, p.m, p.variant, _batch(size))
    f = linalg.tri_factor(p.Xi, p.beta, p.variant)
    w = linalg.adjoint(t) @ t
    return linalg.hermitize(linalg.adjoint(f) @ w @ f)


def sample_kotzriesz(rng, p: KotzRieszParams, size=None) -> np.ndarray:
    """Kotz-Riesz matrix ``u(Theta)* H R F + mu`` in native form.

    ``H`` is Haar on the Stiefel manifold, ``R`` the Bartlett factor of a Riesz
    ``(n beta/2, kappa, I)`` matrix and ``F`` the variant's factor of ``Sigma``.
    Any ``R`` with ``R* R`` of the right law works, since ``H`` absorbs the
    unitary ambiguity.
    """
    rng = as_generator(rng)
    batch = _batch(size)
    r = _bartlett(rng, p.n * p.beta / 2, p.kappa.array(), p.beta, p.m, p.variant, batch)
    h = linalg.haar_stiefel(rng, p.n, p.m, p.beta, size)
    left = linalg.adjoint(linalg.cholesky_upper(p.Theta, p.beta))
    right = linalg.tri_factor(p.Sigma, p.beta, p.variant)
    return left @ h @ r @ right + p.mu


def sample_triesz(rng, p: TRieszParams, size=None) -> np.ndarray:
    """Matrix T-Riesz draw ``S^{-1/2} Y + mu`` with independent ``S`` and ``Y``."""
    rng = as_generator(rng)
    linalg.require_matrix_algebra(p.beta)
    y = sample_kotzriesz(rng, p.kotz_riesz(), size)
    s = sample_riesz_scalar(rng, p.nu, p.k, p.rho, p.beta, p.variant, size)
    return np.asarray(s)[..., None, None] ** -0.5 * y + p.mu


def sample_beta_riesz(rng, p: BetaRieszParams, size=None) -> np.ndarray:
    """``F = T* T`` with ``T`` T-Riesz (``mu = 0``, ``Theta = I``)."""
    t = sample_triesz(rng, p.t_riesz(), size)
    return linalg.hermitize(linalg.adjoint(t) @ t)


def eigen_descending(f, beta: int) -> np.ndarray:
    """Eigenvalues of Hermitian native matrices, largest first (one per algebra eigenvalue)."""
    ev = np.linalg.eigvalsh(f)[..., ::-1]
    return ev[..., :: linalg.block_size(beta)]


def singular_descending(t, beta: int) -> np.ndarray:
    """Singular values of native matrices, largest first."""
    sv = np.linalg.svd(t, compute_uv=False)
    return sv[..., :: linalg.block_size(beta)]


SAMPLERS = {
    "riesz": sample_riesz_matrix,
    "kotzriesz": sample_kotzriesz,
    "triesz": sample_triesz,
    "beta-riesz": sample_beta_riesz,
}

__all__ = ["RngStream", "as_generator", "sample_riesz_scalar",
           "sample_riesz_matrix", "sample_kotzriesz", "sample_triesz",
           "sample_beta_riesz", "eigen_descending", "singular_descending"]
