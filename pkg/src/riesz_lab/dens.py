"""Log-densities of the Riesz, Kotz-Riesz, T-Riesz and beta-Riesz families.

All functions accept a batch of points (leading axes) and return
log-density values with the batch shape; a single point gives a float.
Points outside the support, or on its measure-zero boundary (singular
matrices, tied singular values), give ``-inf``.

Type II weights use the *lower* triangular factor ``B`` of the scale matrix
(``Sigma = B* B``).  With that factor every type II statement holds for a
general scale: the Gram matrix of a Kotz-Riesz II matrix is Riesz II with
the same scale, and the beta-Riesz II density carries ``q_tau(Sigma^{-1})``.
Type I uses the usual upper Cholesky factor.  For diagonal scales the two
factors coincide.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

from . import hwv, jack, linalg
from .errors import DomainError, ShapeMismatch, UnorderedInput, UnsupportedAlgebra
from .params import (BetaRieszParams, KotzRieszParams, RieszParams, TRieszParams,
                     is_partition)
from .specfun import LOG_PI, lgamma_m, lgamma_m_weighted, log_pi_varrho


def _finish(values):
    values = np.asarray(values, dtype=float)
    return float(values) if values.ndim == 0 else values


def _log_q_masked(a, w: hwv.WeightVector, beta: int, inverse: bool):
    """``log q_w(a)`` (or of ``a^{-1}``) plus a PD mask; zero weight short-circuits."""
    k = w.array()
    logs, ok = hwv.masked_log_pivots(a, beta, trailing=inverse)
    if w.is_zero:
        return np.zeros(ok.shape), ok
    sign = -1.0 if inverse else 1.0
    with np.errstate(invalid="ignore"):
        terms = np.where(k == 0, 0.0, sign * k * logs)
    return terms.sum(axis=-1), ok


def _log_q_param(a, w, beta, variant):
    """Scale-matrix weight factor: ``q_w(A)`` for type I, ``q_w(A^{-1})`` for type II."""
    if variant == "I":
        return float(hwv.log_q_kappa(a, w, beta))
    return float(hwv.log_q_kappa_inv(a, w, beta))


def _whiten(x, mu, Theta, Sigma, beta, variant):
    """``W = u(Theta)^{-*} (x - mu) R^{-1}`` with ``R`` the variant's factor of ``Sigma``.

    Then ``W* W = R^{-*} (x-mu)* Theta^{-1} (x-mu) R^{-1}`` and
    ``tr W* W = tr Sigma^{-1} (x-mu)* Theta^{-1} (x-mu)``.
    """
    left = np.linalg.inv(linalg.adjoint(linalg.cholesky_upper(Theta, beta)))
    right = np.linalg.inv(linalg.tri_factor(Sigma, beta, variant))
    return left @ (x - mu) @ right


def _sq_norm(w, beta):
    return np.sum(np.abs(w) ** 2, axis=(-2, -1)) / linalg.block_size(beta)


# ---------------------------------------------------------------------------
# Riesz
# ---------------------------------------------------------------------------

def riesz_log_norm(p: RieszParams) -> float:
    """Log normalizing constant of the Riesz density."""
    m, b, a = p.m, p.beta, p.a
    tot = p.kappa.total
    if p.variant == "I":
        out = (a * m + tot) * math.log(b) - lgamma_m_weighted(a, p.kappa, b, m, +1)
    else:
        out = (a * m - tot) * math.log(b) - lgamma_m_weighted(a, p.kappa, b, m, -1)
    out -= a * float(linalg.logdet_pd(p.Xi, b))
    out -= _log_q_param(p.Xi, p.kappa, b, p.variant)
    return out


def riesz_logpdf(V, p: RieszParams):
    """Riesz type I / II log-density at ``V`` in the cone of PD matrices.

    Type I::

        beta^{am + |k|} / (Gamma_m[a, k] |Xi|^a q_k(Xi))
            etr(-beta Xi^{-1} V) |V|^{a - (m-1)beta/2 - 1} q_k(V)

    Type II replaces ``q_k(.)`` by ``q_k((.)^{-1})``, ``|k|`` by ``-|k|`` and
    ``Gamma_m[a, k]`` by ``Gamma_m[a, -k]``.
    """
    V, b = linalg.as_native(V, p.beta)
    V = linalg.hermitize(V)
    m = p.m
    logs, ok = hwv.masked_log_pivots(V, b)
    logdet = logs.sum(axis=-1)
    lq, okq = _log_q_masked(V, p.kappa, b, p.variant == "II")
    tr = linalg.real_trace(np.linalg.solve(p.Xi, V), b)
    val = (riesz_log_norm(p) - b * tr + (p.a - (m - 1) * b / 2 - 1) * logdet + lq)
    return _finish(np.where(ok & okq, val, -np.inf))


# ---------------------------------------------------------------------------
# Kotz-Riesz
# ---------------------------------------------------------------------------

def kotzriesz_log_norm(p: KotzRieszParams) -> float:
    n, m, b = p.n, p.m, p.beta
    sgn = 1 if p.variant == "I" else -1
    out = (m * n * b / 2 + sgn * p.kappa.total) * math.log(b)
    out += lgamma_m(n * b / 2, b, m) - m * n * b / 2 * LOG_PI
    out -= lgamma_m_weighted(n * b / 2, p.kappa, b, m, sgn)
    out -= n * b / 2 * float(linalg.logdet_pd(p.Sigma, b))
    out -= m * b / 2 * float(linalg.logdet_pd(p.Theta, b))
    return out


def kotzriesz_logpdf(Y, p: KotzRieszParams):
    """Kotz-Riesz type I / II log-density at ``n x m`` matrices ``Y``.

    The Gaussian kernel ``etr(-beta Sigma^{-1} (Y-mu)* Theta^{-1} (Y-mu))``
    is modulated by ``q_k`` (type I) of ``u(Sigma)^{-*} (Y-mu)* Theta^{-1}
    (Y-mu) u(Sigma)^{-1}``, or by ``q_k`` of its inverse (type II).
    """
    Y, b = linalg.as_native(Y, p.beta)
    if linalg.native_shape(Y, b) != (p.n, p.m):
        raise ShapeMismatch(f"Y must be {p.n}x{p.m}, got {linalg.native_shape(Y, b)}")
    w = _whiten(Y, p.mu, p.Theta, p.Sigma, b, p.variant)
    gram = linalg.hermitize(linalg.adjoint(w) @ w)
    lq, ok = _log_q_masked(gram, p.kappa, b, p.variant == "II")
    val = kotzriesz_log_norm(p) - b * _sq_norm(w, b) + lq
    if not p.kappa.is_zero:
        val = np.where(ok, val, -np.inf)
    return _finish(val)


# ---------------------------------------------------------------------------
# T-Riesz
# ---------------------------------------------------------------------------

def _mixing(p):
    """Exponent ``A`` and ``rho`` power for the T-Riesz family."""
    m, n, b = p.m, p.n, p.beta
    sgn = 1 if p.variant == "I" else -1
    expo = (p.nu + m * n) * b / 2 + sgn * (p.k + p.tau.total)
    rho_pow = b * m * n / 2 + sgn * p.tau.total
    if not expo > 0:
        raise DomainError(f"density exponent {(p.nu + m * n) * b / 2}±(k+Σt) must be positive")
    return sgn, expo, rho_pow


def triesz_log_norm(p: TRieszParams) -> float:
    m, n, b = p.m, p.n, p.beta
    sgn, expo, rho_pow = _mixing(p)
    out = lgamma_m(n * b / 2, b, m) + gammaln(expo) + rho_pow * math.log(p.rho)
    out -= b * m * n / 2 * LOG_PI
    out -= lgamma_m_weighted(n * b / 2, p.tau, b, m, sgn)
    out -= gammaln(p.nu * b / 2 + sgn * p.k)
    if b != 8:
        out -= b * n / 2 * float(linalg.logdet_pd(p.Sigma, b))
        out -= b * m / 2 * float(linalg.logdet_pd(p.Theta, b))
    return out


def triesz_logpdf(T, p: TRieszParams):
    """Matrix T-Riesz type I / II log-density at ``n x m`` matrices ``T``.

    ``[1 + rho tr Sigma^{-1}(T-mu)* Theta^{-1}(T-mu)]^{-A} q_tau(...)`` with
    ``A = (nu + mn) beta/2 ± (k + sum t_i)``.
    """
    if p.beta == 8:
        raise UnsupportedAlgebra("matrix densities are not available for beta=8")
    T, b = linalg.as_native(T, p.beta)
    if linalg.native_shape(T, b) != (p.n, p.m):
        raise ShapeMismatch(f"T must be {p.n}x{p.m}, got {linalg.native_shape(T, b)}")
    _, expo, _ = _mixing(p)
    w = _whiten(T, p.mu, p.Theta, p.Sigma, b, p.variant)
    gram = linalg.hermitize(linalg.adjoint(w) @ w)
    lq, ok = _log_q_masked(gram, p.tau, b, p.variant == "II")
    val = triesz_log_norm(p) - expo * np.log1p(p.rho * _sq_norm(w, b)) + lq
    if not p.tau.is_zero:
        val = np.where(ok, val, -np.inf)
    return _finish(val)


# ---------------------------------------------------------------------------
# beta-Riesz (F = T* T)
# ---------------------------------------------------------------------------

def beta_riesz_log_norm(p: BetaRieszParams) -> float:
    m, n, b = p.m, p.n, p.beta
    sgn, expo, rho_pow = _mixing(p)
    out = gammaln(expo) + rho_pow * math.log(p.rho)
    out -= lgamma_m_weighted(n * b / 2, p.tau, b, m, sgn)
    out -= gammaln(p.nu * b / 2 + sgn * p.k)
    out -= n * b / 2 * float(linalg.logdet_pd(p.Sigma, b))
    out -= _log_q_param(p.Sigma, p.tau, b, p.variant)
    return out


def beta_riesz_logpdf(F, p: BetaRieszParams):
    """c-beta-Riesz (type I) or k-beta-Riesz (type II) log-density at PD ``F``.

    ``|F|^{(n-m+1)beta/2 - 1} (1 + rho tr Sigma^{-1} F)^{-A} q_tau(F)`` for
    type I, ``q_tau(F^{-1})`` for type II.
    """
    F, b = linalg.as_native(F, p.beta)
    F = linalg.hermitize(F)
    m, n = p.m, p.n
    _, expo, _ = _mixing(p)
    logs, ok = hwv.masked_log_pivots(F, b)
    logdet = logs.sum(axis=-1)
    lq, okq = _log_q_masked(F, p.tau, b, p.variant == "II")
    tr = linalg.real_trace(np.linalg.solve(p.Sigma, F), b)
    with np.errstate(invalid="ignore"):
        val = (beta_riesz_log_norm(p) + ((n - m + 1) * b / 2 - 1) * logdet
               - expo * np.log1p(p.rho * tr) + lq)
    return _finish(np.where(ok & okq, val, -np.inf))


# ---------------------------------------------------------------------------
# singular values and eigenvalues
# ---------------------------------------------------------------------------

def _check_standard(p: TRieszParams):
    if not p.standard:
        if not (np.allclose(p.mu, 0) and np.allclose(p.Theta, linalg.identity(p.n, p.beta))
                and np.allclose(p.Sigma, linalg.identity(p.m, p.beta))):
            raise DomainError("singular value densities need mu = 0, Theta = I, Sigma = I")
    if not is_partition(p.tau):
        raise DomainError(
            f"singular value densities need an integer partition tau, got {tuple(p.tau)}")


def sv_log_norm(p: TRieszParams) -> float:
    m, n, b = p.m, p.n, p.beta
    sgn, expo, rho_pow = _mixing(p)
    out = m * math.log(2) + b * m * m / 2 * LOG_PI + log_pi_varrho(b, m)
    out += gammaln(expo) + rho_pow * math.log(p.rho)
    out -= lgamma_m(b * m / 2, b, m)
    out -= lgamma_m_weighted(n * b / 2, p.tau, b, m, sgn)
    out -= gammaln(p.nu * b / 2 + sgn * p.k)
    return out


def _ordered(x, name):
    x = np.asarray(x, dtype=float)
    d = np.diff(x, axis=-1)
    if np.any(d > 0):
        raise UnorderedInput(f"{name} must be given in decreasing order")
    return x, np.all(d < 0, axis=-1) & (x[..., -1] > 0)


def sv_triesz_logpdf(alpha, p: TRieszParams):
    """Joint log-density of ordered singular values ``alpha_1 > ... > alpha_m > 0``.

    Valid for ``T`` T-Riesz with ``mu = 0``, ``Theta = I``, ``Sigma = I`` and an
    integer partition ``tau``; the formula depends on beta only as a scalar,
    so beta = 8 is accepted.
    """
    _check_standard(p)
    alpha, ok = _ordered(alpha, "singular values")
    if alpha.shape[-1] != p.m:
        raise ShapeMismatch(f"expected {p.m} singular values")
    m, n, b = p.m, p.n, p.beta
    _, expo, _ = _mixing(p)
    tau = tuple(int(t) for t in p.tau)
    with np.errstate(divide="ignore", invalid="ignore"):
        a2 = np.where(ok[..., None], alpha * alpha, 1.0)
        val = sv_log_norm(p) + ((n - m + 1) * b - 1) * np.log(np.where(ok[..., None], alpha, 1.0)).sum(-1)
        val = val - expo * np.log1p(p.rho * a2.sum(-1))
        iu, ju = np.triu_indices(m, 1)
        val = val + b * np.log(a2[..., iu] - a2[..., ju]).sum(-1)
        arg = a2 if p.variant == "I" else 1.0 / a2
        val = val + np.log(jack.jack_C(tau, arg, b)) - math.log(jack.jack_C_identity(tau, m, b))
    return _finish(np.where(ok, val, -np.inf))


def eig_beta_riesz_logpdf(gamma, p: TRieszParams):
    """Joint log-density of ordered eigenvalues ``gamma_i = alpha_i^2`` of ``F = T* T``."""
    gamma, ok = _ordered(gamma, "eigenvalues")
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(ok[..., None], gamma, 1.0)
        val = sv_triesz_logpdf(np.sqrt(g), p) - (0.5 * np.log(g) + math.log(2)).sum(-1)
    return _finish(np.where(ok, val, -np.inf))
