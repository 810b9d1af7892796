"""Numerical verification: normalization, Jacobians and Monte Carlo identities.

Quadrature over unbounded domains uses smooth changes of variables to the
whole real line followed by the trapezoidal rule, which converges
geometrically for analytic integrands.  Positive definite matrices are
integrated in Cholesky coordinates ``A = T* T`` with the exact Jacobian

    (dA) = 2^m prod_i t_ii^{beta (m - i) + 1} (dT),

diagonal entries mapped as ``t = exp(c + sinh v)`` and free coordinates as
``x = s sinh(sinh v)``; pairs of free coordinates may instead be taken in
polar form with a periodic angle.  The step is refined by a factor 2/3 until the change between two successive
estimates predicts an error below the requested tolerance.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate, stats

from . import dens, jack, linalg, sampler, specfun
from .errors import IntegrationFailure, SingularTransform
from .params import BetaRieszParams, KotzRieszParams, RieszParams, TRieszParams

NODE_BUDGET = 10_000_000
CHUNK = 250_000
ANGLE_SHIFT = 0.381966


@dataclass
class CheckReport:
    """Outcome of one check; ``passed`` iff ``|statistic - target| <= tolerance``."""

    name: str
    statistic: float
    target: float
    tolerance: float
    n_samples: int
    detail: str = ""
    passed: bool = field(init=False)

    def __post_init__(self):
        self.statistic = float(self.statistic)
        self.target = float(self.target)
        self.tolerance = float(self.tolerance)
        self.n_samples = int(self.n_samples)
        ok = abs(self.statistic - self.target) <= self.tolerance
        self.passed = bool(ok and np.isfinite(self.statistic))

    def to_dict(self) -> dict:
        return asdict(self)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

def trapezoid_rn(log_integrand: Callable, dim: int, half_width: float = 4.5,
                 tol: float = 1e-6, h0: float = 0.45, n_periodic: int = 0,
                 budget: int = NODE_BUDGET, cut: float = 1e-15) -> tuple[float, int]:
    """Integrate ``exp(log_integrand(v))`` over ``[-L, L]^dim x [0, 2 pi)^n_periodic``.

    ``log_integrand`` receives an ``(N, dim + n_periodic)`` array with the
    periodic (angle) coordinates last.  The step ``h`` of the line axes and
    the angular spacing shrink together until the error predicted from two
    successive estimates drops below ``tol / 10``.  After each pass the box is trimmed to the slabs whose
    marginal mass exceeds ``cut`` times the total.  Returns the final
    estimate and the total number of nodes.
    """
    lo = np.full(dim, -half_width)
    hi = np.full(dim, half_width)
    h, prev, used, last_diff = h0, None, 0, math.inf
    while True:
        lines = [np.arange(a, b + 1e-12, h) for a, b in zip(lo, hi)]
        n_ang = max(8, int(math.ceil(2.0 / h)))
        # distinct shifts per angle keep nodes off measure-zero sets such as
        # the coordinate axes or parallel rows, where densities vanish
        angs = [2 * math.pi * (np.arange(n_ang) + (ANGLE_SHIFT * (k + 1)) % 1) / n_ang
                for k in range(n_periodic)]
        axes = lines + angs
        shape = tuple(a.size for a in axes)
        n_nodes = int(np.prod(shape))
        if used + n_nodes > budget:
            raise IntegrationFailure(
                f"node budget {budget} exhausted at step {h:.3g} (last estimate {prev})")
        marg = [np.zeros(a.size) for a in lines]
        total = 0.0
        for start in range(0, n_nodes, CHUNK):
            idx = np.unravel_index(np.arange(start, min(start + CHUNK, n_nodes)), shape)
            v = np.stack([a[i] for a, i in zip(axes, idx)], axis=-1)
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                vals = np.exp(log_integrand(v))
            vals = np.where(np.isfinite(vals), vals, 0.0)
            total += vals.sum()
            for d in range(dim):
                marg[d] += np.bincount(idx[d], vals, minlength=lines[d].size)
        est = total * h ** dim * (2 * math.pi / n_ang) ** n_periodic
        used += n_nodes
        # the error decays like exp(-c/h); with h shrinking by 2/3 the error of
        # the finer estimate is about |difference|^{3/2} once the differences
        # themselves shrink
        if prev is not None:
            diff = abs(est - prev) / max(1.0, abs(est))
            # differences at roundoff level no longer decrease monotonically
            shrinking = diff < last_diff or diff <= 1e-14
            if shrinking and last_diff < math.inf and diff ** 1.5 <= tol / 10:
                return est, used
            last_diff = diff
        for d in range(dim):
            keep = np.flatnonzero(marg[d] > cut * total)
            if keep.size:
                lo[d] = max(lo[d], lines[d][keep[0]] - 2 * h)
                hi[d] = min(hi[d], lines[d][keep[-1]] + 2 * h)
        prev, h = est, h * 2 / 3


def _diag_map(v, c):
    u = c + np.sinh(v)
    return np.exp(u), u + np.log(np.cosh(v))


def _free_map_de(v, s):
    # double exponential: algebraic tails become doubly exponentially small
    w = np.sinh(v)
    return s * np.sinh(w), np.log(s * np.cosh(w) * np.cosh(v))


def _polar(v_rad, theta, s):
    r, lj = _diag_map(v_rad, math.log(s))
    return r * np.cos(theta), r * np.sin(theta), lj + np.log(r)


def pd_layout(m: int, beta: int) -> tuple[int, int]:
    """Numbers of line and angle coordinates used by :func:`pd_coordinates`."""
    off = m * (m - 1) // 2
    if beta == 2:
        return m + off, off
    return m + beta * off, 0


def pd_coordinates(v, m: int, beta: int, center=0.0, spread=1.0):
    """Map line (and angle) coordinates to PD matrices ``T* T`` and log Jacobians.

    Diagonal entries of ``T`` come first, then one coordinate per real
    off-diagonal component; for ``beta = 2`` each off-diagonal entry is in
    polar form, its radius among the line coordinates and its angle at the end.
    """
    center = np.broadcast_to(np.asarray(center, float), (m,))
    n = v.shape[0]
    n_line, _ = pd_layout(m, beta)
    coords = np.zeros((n, beta, m, m))
    logj = np.full(n, m * math.log(2))
    col, ang = 0, n_line
    for i in range(m):
        t, lj = _diag_map(v[:, col], center[i])
        coords[:, 0, i, i] = t
        logj += lj + (beta * (m - 1 - i) + 1) * np.log(t)
        col += 1
    for i in range(m):
        for j in range(i + 1, m):
            if beta == 2:
                x, y, lj = _polar(v[:, col], v[:, ang], spread)
                coords[:, 0, i, j], coords[:, 1, i, j] = x, y
                logj += lj
                col += 1
                ang += 1
                continue
            for b in range(beta):
                x, lj = _free_map_de(v[:, col], spread)
                coords[:, b, i, j] = x
                logj += lj
                col += 1
    t = linalg.from_coords(coords, beta)
    return linalg.hermitize(linalg.adjoint(t) @ t), logj


def full_layout(d: int) -> tuple[int, int]:
    """Line and angle counts for ``d`` real coordinates: pairs go polar."""
    return d - d // 2, d // 2


def full_coordinates(v, n: int, m: int, beta: int, loc=None, spread=1.0):
    """Map line/angle coordinates to native ``n x m`` matrices.

    Real coordinates are taken in consecutive pairs, each in polar form
    (radius ``spread exp(sinh v)``, angle uniform); an odd one out uses
    ``spread sinh(sinh v)``.
    """
    d = beta * n * m
    n_line, n_ang = full_layout(d)
    x = np.empty((v.shape[0], d))
    logj = np.zeros(v.shape[0])
    for k in range(n_ang):
        a, b, lj = _polar(v[:, k], v[:, n_line + k], spread)
        x[:, 2 * k], x[:, 2 * k + 1] = a, b
        logj += lj
    if d % 2:
        x[:, -1], lj = _free_map_de(v[:, n_ang], spread)
        logj += lj
    y = linalg.from_coords(x.reshape(-1, beta, n, m), beta)
    if loc is not None:
        y = y + loc
    return y, logj


def ordered_coordinates(v, center=0.0):
    """Map ``(N, 2)`` to ordered pairs ``x_1 > x_2 > 0``."""
    x2, l2 = _diag_map(v[:, 1], center)
    d, l1 = _diag_map(v[:, 0], center)
    return np.stack([x2 + d, x2], axis=-1), l1 + l2


def _quad_half_line(f, tol):
    val, _ = integrate.quad(f, 0, np.inf, epsabs=tol / 100, epsrel=tol / 100, limit=500)
    return val


def _quad_line(f, tol):
    val, _ = integrate.quad(f, -np.inf, np.inf, epsabs=tol / 100, epsrel=tol / 100, limit=500)
    return val


def integrate_density(kind: str, p, tol: float | None = None, center=0.0,
                      spread=1.0, budget: int = NODE_BUDGET) -> tuple[float, int, int]:
    """Integral of a density over its support; returns ``(value, n_nodes, dim)``.

    ``kind`` is one of ``riesz``, ``kotzriesz``, ``triesz``, ``beta-riesz``,
    ``sv`` and ``eig``.  One-dimensional cases use adaptive Gauss-Kronrod
    quadrature; two to four dimensions use :func:`trapezoid_rn`.  Matrix
    variables are first whitened by the scale parameters, with the linear
    change-of-variables Jacobians ``|S|^{(m-1) beta/2 + 1}`` (cone) and
    ``|Theta|^{m beta/2} |Sigma|^{n beta/2}`` (full matrices).
    """
    m, beta = p.m, p.beta
    n_ang = 0
    if kind in ("riesz", "beta-riesz"):
        dim = m + beta * m * (m - 1) // 2
        n_line, n_ang = pd_layout(m, beta)
        fn = dens.riesz_logpdf if kind == "riesz" else dens.beta_riesz_logpdf
        if m == 1:
            one = linalg.identity(1, beta)
            g = lambda x: math.exp(fn(x * one, p)) if x > 0 else 0.0
            return _quad_half_line(g, tol or 1e-10), 0, 1

        scale = p.Xi if kind == "riesz" else p.Sigma
        r = linalg.cholesky_upper(scale, beta)
        lj0 = ((m - 1) * beta / 2 + 1) * float(linalg.logdet_pd(scale, beta))

        def logf(v):
            a, lj = pd_coordinates(v, m, beta, center, spread)
            return fn(linalg.adjoint(r) @ a @ r, p) + lj + lj0
    elif kind in ("kotzriesz", "triesz"):
        n = p.n
        dim = beta * n * m
        n_line, n_ang = full_layout(dim)
        fn = dens.kotzriesz_logpdf if kind == "kotzriesz" else dens.triesz_logpdf
        if dim == 1:
            g = lambda x: math.exp(fn(np.array([[x]]), p))
            return _quad_line(g, tol or 1e-10), 0, 1

        left = linalg.adjoint(linalg.cholesky_upper(p.Theta, beta))
        right = linalg.cholesky_upper(p.Sigma, beta)
        lj0 = (m * beta / 2 * float(linalg.logdet_pd(p.Theta, beta))
               + n * beta / 2 * float(linalg.logdet_pd(p.Sigma, beta)))

        def logf(v):
            z, lj = full_coordinates(v, n, m, beta, None, spread)
            return fn(left @ z @ right + p.mu, p) + lj + lj0
    elif kind in ("sv", "eig"):
        dim = n_line = m
        fn = dens.sv_triesz_logpdf if kind == "sv" else dens.eig_beta_riesz_logpdf
        if m == 1:
            g = lambda x: math.exp(fn(np.array([x]), p)) if x > 0 else 0.0
            return _quad_half_line(g, tol or 1e-10), 0, 1
        if m != 2:
            raise IntegrationFailure("ordered-domain quadrature is implemented for m <= 2")

        def logf(v):
            x, lj = ordered_coordinates(v, center)
            return fn(x, p) + lj
    else:
        raise ValueError(f"unknown density kind {kind!r}")
    if dim > 4:
        raise IntegrationFailure(f"integration domain has {dim} > 4 real coordinates")
    val, nodes = trapezoid_rn(logf, n_line, 4.5, tol or 1e-5, n_periodic=n_ang,
                              budget=budget)
    return val, nodes, dim


def check_normalization(kind: str, p, tol: float | None = None, name: str | None = None,
                        **kwargs) -> CheckReport:
    """Quadrature of ``exp(logpdf)`` over the support compared with 1."""
    val, nodes, dim = integrate_density(kind, p, tol=tol,
                                        **kwargs)
    if tol is None:
        tol = 1e-8 if dim == 1 else 1e-5
    name = name or f"normalization/{kind}-{p.variant}/m={p.m}/beta={p.beta}"
    return CheckReport(name, val, 1.0, tol, nodes,
                       f"integral over {dim} real coordinates; target 1")


# ---------------------------------------------------------------------------
# Jacobians of linear maps
# ---------------------------------------------------------------------------

def _coordinate_matrix(fmap, basis_shape, beta):
    """Real matrix of a linear map on coordinate planes ``basis_shape``."""
    dim = int(np.prod(basis_shape))
    cols = []
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = 1.0
        cols.append(fmap(e.reshape(basis_shape)).ravel())
    return np.array(cols).T


def linear_jacobian(A, B, beta: int) -> float:
    """``log |det|`` of ``X -> A X B`` on the real coordinates of ``n x m`` matrices."""
    n = linalg.native_shape(A, beta)[0]
    m = linalg.native_shape(B, beta)[0]
    fmap = lambda c: linalg.to_coords(A @ linalg.from_coords(c, beta) @ B, beta)
    mat = _coordinate_matrix(fmap, (beta, n, m), beta)
    sign, logdet = np.linalg.slogdet(mat)
    if sign == 0:
        raise SingularTransform("linear map is singular")
    return float(logdet)


def _hermitian_coords(x, beta):
    """Free coordinates of Hermitian matrices: diagonal, then upper off-diagonal planes."""
    c = linalg.to_coords(x, beta)
    m = c.shape[-1]
    iu = np.triu_indices(m, 1)
    return np.concatenate([c[0][np.diag_indices(m)], c[:, iu[0], iu[1]].ravel()])


def _from_hermitian_coords(v, m, beta):
    c = np.zeros((beta, m, m))
    c[0][np.diag_indices(m)] = v[:m]
    iu = np.triu_indices(m, 1)
    c[:, iu[0], iu[1]] = v[m:].reshape(beta, -1)
    upper = linalg.from_coords(c, beta)
    diag = linalg.from_coords(np.where(np.eye(m, dtype=bool), c, 0.0), beta)
    return upper + linalg.adjoint(upper) - diag


def symmetric_jacobian(A, beta: int) -> float:
    """``log |det|`` of ``X -> A X A*`` on the ``m + beta m(m-1)/2`` Hermitian coordinates."""
    m = linalg.native_shape(A, beta)[0]
    dim = m + beta * m * (m - 1) // 2
    cols = []
    for k in range(dim):
        e = np.zeros(dim)
        e[k] = 1.0
        x = _from_hermitian_coords(e, m, beta)
        cols.append(_hermitian_coords(A @ x @ linalg.adjoint(A), beta))
    sign, logdet = np.linalg.slogdet(np.array(cols).T)
    if sign == 0:
        raise SingularTransform("congruence map is singular")
    return float(logdet)


def _gram_logdet(A, beta):
    g = linalg.hermitize(linalg.adjoint(A) @ A)
    return float(np.real(np.linalg.slogdet(g)[1])) / linalg.block_size(beta)


def check_jacobian_linear(A, B, beta: int, C=None, rtol: float = 1e-9,
                          name: str | None = None) -> CheckReport:
    """Compare ``|det|`` of ``X -> A X B + C`` with ``|A* A|^{m beta/2} |B* B|^{n beta/2}``.

    The translation ``C`` does not change the Jacobian; it is accepted for
    completeness and applied to a probe point.
    """
    A, _ = linalg.as_native(A, beta)
    B, _ = linalg.as_native(B, beta)
    n = linalg.native_shape(A, beta)[0]
    m = linalg.native_shape(B, beta)[0]
    direct = linear_jacobian(A, B, beta)
    target = m * beta / 2 * _gram_logdet(A, beta) + n * beta / 2 * _gram_logdet(B, beta)
    ratio = math.exp(direct - target)
    return CheckReport(name or f"jacobian/linear/n={n}/m={m}/beta={beta}", ratio, 1.0, rtol,
                       (beta * n * m) ** 2,
                       f"log|det| direct {direct:.12g}, predicted {target:.12g}; target ratio 1")


def check_jacobian_symmetric(A, beta: int, rtol: float = 1e-9,
                             name: str | None = None) -> CheckReport:
    """Compare ``|det|`` of ``X -> A X A*`` with ``|A* A|^{(m-1) beta/2 + 1}``."""
    A, _ = linalg.as_native(A, beta)
    m = linalg.native_shape(A, beta)[0]
    direct = symmetric_jacobian(A, beta)
    target = ((m - 1) * beta / 2 + 1) * _gram_logdet(A, beta)
    ratio = math.exp(direct - target)
    return CheckReport(name or f"jacobian/symmetric/m={m}/beta={beta}", ratio, 1.0, rtol,
                       (m + beta * m * (m - 1) // 2) ** 2,
                       f"log|det| direct {direct:.12g}, predicted {target:.12g}; target ratio 1")


# ---------------------------------------------------------------------------
# singular value measure, gamma integral, spherical identity
# ---------------------------------------------------------------------------

def gaussian_sv_logpdf(alpha, n: int, beta: int) -> np.ndarray:
    """Ordered singular-value density of ``Y`` with density ``(beta/pi)^{beta mn/2} etr(-beta Y* Y)``.

    Obtained from the singular value Jacobian and the Stiefel volumes:
    ``2^m pi^{beta m^2/2 + varrho} beta^{beta mn/2} / (Gamma_m[beta m/2] Gamma_m[beta n/2])``
    times ``prod alpha_i^{(n-m+1) beta - 1} prod_{i<j} (alpha_i^2 - alpha_j^2)^beta e^{-beta sum alpha^2}``.
    """
    alpha = np.asarray(alpha, float)
    m = alpha.shape[-1]
    c = (m * math.log(2) + beta * m * m / 2 * specfun.LOG_PI + specfun.log_pi_varrho(beta, m)
         + beta * m * n / 2 * math.log(beta) - specfun.lgamma_m(beta * m / 2, beta, m)
         - specfun.lgamma_m(beta * n / 2, beta, m))
    a2 = alpha * alpha
    iu, ju = np.triu_indices(m, 1)
    with np.errstate(divide="ignore", invalid="ignore"):
        val = (c + ((n - m + 1) * beta - 1) * np.log(alpha).sum(-1)
               + beta * np.log(a2[..., iu] - a2[..., ju]).sum(-1) - beta * a2.sum(-1))
    ok = np.all(np.diff(alpha, axis=-1) < 0, axis=-1) & (alpha[..., -1] > 0)
    return np.where(ok, val, -np.inf)


def ordered_pair_cdfs(logpdf: Callable, n_grid: int = 1200, lo: float = -12.0,
                      hi: float = 6.0):
    """Marginal CDFs of both components of an ordered pair ``x_1 > x_2 > 0``.

    The joint density is tabulated on a logarithmic grid; returns
    ``(grid, cdf_1, cdf_2, total_mass)`` with CDFs normalized by the mass.
    """
    u = np.linspace(lo, hi, n_grid)
    x = np.exp(u)
    x1, x2 = np.meshgrid(x, x, indexing="ij")
    pts = np.stack([x1, x2], axis=-1).reshape(-1, 2)
    upper = pts[:, 0] > pts[:, 1]
    lp = np.full(pts.shape[0], -np.inf)
    with np.errstate(divide="ignore", invalid="ignore"):
        lp[upper] = logpdf(pts[upper])
    lp = lp.reshape(n_grid, n_grid)
    f = np.where(np.isfinite(lp), np.exp(lp), 0.0) * x1 * x2
    du = u[1] - u[0]
    marg1 = integrate.trapezoid(f, dx=du, axis=1)
    marg2 = integrate.trapezoid(f, dx=du, axis=0)
    c1 = integrate.cumulative_trapezoid(marg1, dx=du, initial=0.0)
    c2 = integrate.cumulative_trapezoid(marg2, dx=du, initial=0.0)
    total = c1[-1]
    return x, c1 / total, c2 / total, total


def _interp_cdf(grid, cdf):
    return lambda t: np.interp(t, grid, cdf, left=0.0, right=1.0)


def check_svd_measure(n: int, m: int, beta: int, rng, N: int = 100_000,
                      name: str | None = None) -> CheckReport:
    """Singular values of Gaussian matrices against the implied analytic density.

    ``m = 1``: KS against the chi law with ``beta n`` degrees of freedom.
    ``m = 2``: the implied density must integrate to 1 (quadrature, 1e-5)
    and both ordered margins must pass KS against its CDFs.  The statistic
    is the smallest p-value; the check passes when it exceeds 0.001 and
    the normalization holds.
    """
    if beta not in (1, 2) or m > 2 or n > 4 or n < m:
        raise ValueError("svd measure check covers beta in {1, 2}, m <= 2, m <= n <= 4")
    gen = sampler.as_generator(rng)
    y = linalg.gaussian_matrix(gen, n, m, beta, 1 / math.sqrt(2 * beta), N)
    sv = sampler.singular_descending(y, beta)
    detail = []
    if m == 1:
        chi = stats.chi(beta * n, scale=1 / math.sqrt(2 * beta))
        pvals = [stats.kstest(sv[:, 0], chi.cdf).pvalue]
        norm_ok = True
    else:
        fn = lambda a: gaussian_sv_logpdf(a, n, beta)
        mass, _ = trapezoid_rn(lambda v: fn(ordered_coordinates(v)[0]) + ordered_coordinates(v)[1],
                               2, 4.5, 1e-6)
        norm_ok = abs(mass - 1) <= 1e-5
        detail.append(f"normalization {mass:.10f}")
        grid, c1, c2, _ = ordered_pair_cdfs(fn)
        pvals = [stats.kstest(sv[:, 0], _interp_cdf(grid, c1)).pvalue,
                 stats.kstest(sv[:, 1], _interp_cdf(grid, c2)).pvalue]
    pmin = min(pvals)
    detail.append("KS p-values " + ", ".join(f"{p:.4g}" for p in pvals))
    detail.append("target: p > 0.001")
    stat = pmin if norm_ok else 0.0
    return CheckReport(name or f"svd-measure/n={n}/m={m}/beta={beta}", stat, 1.0, 0.999, N,
                       "; ".join(detail))


def check_gamma_integral(a: float, kappa, beta: int, m: int, rng, N: int = 1_000_000,
                         name: str | None = None) -> CheckReport:
    """Monte Carlo value of ``int etr(-A) |A|^{a-(m-1)beta/2-1} q_k(A) (dA)``.

    ``A`` is drawn from the weight-free law with density
    ``etr(-A) |A|^{a-(m-1)beta/2-1} / Gamma_m[a]`` (scipy's Wishart with
    ``2a`` degrees of freedom for ``beta = 1``, complex Gaussian Gram
    matrices or the weight-free Bartlett factor otherwise), so the integral
    equals ``Gamma_m[a] E q_k(A)``.  ``m = 1`` is done by quadrature.  The
    statistic is the ratio to ``Gamma_m[a, k]``; tolerance 3 standard errors.
    """
    from .hwv import as_weight, log_q_kappa
    w = as_weight(kappa, m)
    exact = specfun.lgamma_m_weighted(a, w, beta, m)
    nm = name or f"gamma-integral/a={a:g}/k={tuple(w)}/m={m}/beta={beta}"
    if m == 1:
        e = a + w[0] - 1
        val, _ = integrate.quad(lambda x: math.exp(-x + e * math.log(x)) if x > 0 else 0.0,
                                0, np.inf, epsabs=0, epsrel=1e-13, limit=400)
        return CheckReport(nm, val / math.exp(exact), 1.0, 1e-10, 0, "quadrature; target ratio 1")
    gen = sampler.as_generator(rng)
    if beta == 1:
        x = stats.wishart(df=2 * a, scale=np.eye(m)).rvs(size=N, random_state=gen) / 2
        x = x.reshape(N, m, m)
    else:
        x = sampler.sample_riesz_matrix(gen, RieszParams(a, [0] * m, beta * linalg.identity(m, beta),
                                                         beta), N)
    q = np.exp(log_q_kappa(x, w, beta))
    mean = q.mean()
    se = q.std(ddof=1) / math.sqrt(N)
    ratio = mean * math.exp(specfun.lgamma_m(a, beta, m) - exact)
    rse = se * math.exp(specfun.lgamma_m(a, beta, m) - exact)
    return CheckReport(nm, ratio, 1.0, 3 * rse, N,
                       f"Monte Carlo ratio {ratio:.6f} ± {rse:.2g} (1 s.e.); target 1 within 3 s.e.")


def check_spherical_identity(tau, L, beta: int, rng, N: int = 100_000,
                             name: str | None = None) -> CheckReport:
    """Haar average of ``q_tau(H L H*)`` against ``C_tau(eig L) / C_tau(I)``."""
    gen = sampler.as_generator(rng)
    mean, se = jack.spherical_average_q(gen, tau, L, beta, N)
    L, _ = linalg.as_native(L, beta)
    m = linalg.native_shape(L, beta)[0]
    ev = sampler.eigen_descending(linalg.hermitize(L), beta)
    target = float(jack.jack_C(tau, ev, beta) / jack.jack_C_identity(tau, m, beta))
    # the roundoff floor matters when the average is exact (m = 1)
    tol = max(3 * se, 1e-12 * abs(target))
    return CheckReport(name or f"spherical/tau={tuple(tau)}/m={m}/beta={beta}", mean, target,
                       tol, N, f"Monte Carlo {mean:.6f} ± {se:.2g}; target {target:.6f}")


# ---------------------------------------------------------------------------
# sampler / density agreement
# ---------------------------------------------------------------------------

def weighted_ks(x, ref, weights) -> tuple[float, float]:
    """KS distance between a sample and a weighted reference sample, with p-value.

    The p-value uses the asymptotic Kolmogorov law with effective size
    ``1 / (1/N + 1/ESS)``, where ``ESS`` is the Kish effective size of the
    weights.
    """
    x = np.sort(np.asarray(x, float))
    order = np.argsort(ref)
    r = np.asarray(ref, float)[order]
    w = np.asarray(weights, float)[order]
    w = w / w.sum()
    cw = np.cumsum(w)
    pts = np.concatenate([x, r])
    f_x = np.searchsorted(x, pts, side="right") / x.size
    idx = np.searchsorted(r, pts, side="right")
    f_r = np.where(idx > 0, cw[np.maximum(idx - 1, 0)], 0.0)
    d = float(np.max(np.abs(f_x - f_r)))
    ess = 1.0 / np.sum(w * w)
    n_eff = 1.0 / (1.0 / x.size + 1.0 / ess)
    return d, float(stats.kstwobign.sf(d * math.sqrt(n_eff)))


def _t_fit(values, df):
    loc = np.median(values, axis=0)
    scale = 1.4826 * np.median(np.abs(values - loc), axis=0) * 1.5 + 1e-12
    return loc, scale


def _chol_coords(v, beta):
    """``(log t_ii, off-diagonal coordinates)`` of the upper Cholesky factor."""
    t = linalg.cholesky_upper(v, beta)
    c = linalg.to_coords(t, beta)
    m = c.shape[-1]
    iu = np.triu_indices(m, 1)
    diag = np.log(c[..., 0, np.arange(m), np.arange(m)])
    off = c[..., :, iu[0], iu[1]].reshape(c.shape[0], -1)
    return np.concatenate([diag, off], axis=-1)


def pd_proposal(pilot, beta: int, rng, M: int, df: float = 3.0):
    """Heavy-tailed proposal on PD matrices and its log density in matrix measure.

    Independent Student-t coordinates for ``log t_ii`` and the off-diagonal
    entries of the Cholesky factor, located and scaled from a pilot sample.
    """
    m = linalg.native_shape(pilot, beta)[0]
    z = _chol_coords(pilot, beta)
    loc, scale = _t_fit(z, df)
    gen = sampler.as_generator(rng)
    draw = loc + scale * gen.standard_t(df, size=(M, z.shape[1]))
    # log-diagonals beyond +-300 would overflow; such draws carry no target mass
    draw[:, :m] = np.clip(draw[:, :m], -300, 300)
    logq = stats.t(df, loc, scale).logpdf(draw).sum(axis=-1)
    coords = np.zeros((M, beta, m, m))
    coords[:, 0, np.arange(m), np.arange(m)] = np.exp(draw[:, :m])
    iu = np.triu_indices(m, 1)
    coords[:, :, iu[0], iu[1]] = draw[:, m:].reshape(M, beta, -1)
    t = linalg.from_coords(coords, beta)
    with np.errstate(over="ignore", invalid="ignore"):
        v = linalg.hermitize(linalg.adjoint(t) @ t)
    i = np.arange(m)
    logj = m * math.log(2) + ((beta * (m - 1 - i) + 2) * draw[:, :m]).sum(axis=-1)
    return v, logq - logj


def full_proposal(pilot, beta: int, rng, M: int, df: float = 3.0):
    """Independent Student-t proposal on the real coordinates of ``n x m`` matrices."""
    n, m = linalg.native_shape(pilot, beta)
    c = linalg.to_coords(pilot, beta).reshape(pilot.shape[0], -1)
    loc, scale = _t_fit(c, df)
    gen = sampler.as_generator(rng)
    draw = loc + scale * gen.standard_t(df, size=(M, c.shape[1]))
    logq = stats.t(df, loc, scale).logpdf(draw).sum(axis=-1)
    return linalg.from_coords(draw.reshape(M, beta, n, m), beta), logq


def pd_statistics(v, beta):
    """Scalar summaries of PD draws used for marginal KS tests."""
    c = linalg.to_coords(v, beta)
    logdet = np.real(np.linalg.slogdet(v)[1]) / linalg.block_size(beta)
    out = {"v_1_1": c[:, 0, 0, 0], "logdet": logdet}
    if c.shape[-1] > 1:
        out["v_2_2"] = c[:, 0, 1, 1]
        out["v_1_2_re"] = c[:, 0, 0, 1]
    return out


def full_statistics(y, beta):
    c = linalg.to_coords(y, beta)
    n, m = c.shape[-2:]
    out = {"y_1_1_re": c[:, 0, 0, 0], "frob": np.sum(c * c, axis=(1, 2, 3))}
    if n * m > 1:
        out[f"y_{n}_{m}_re"] = c[:, 0, n - 1, m - 1]
    if beta == 2:
        out["y_1_1_im"] = c[:, 1, 0, 0]
    return out


DENSITIES = {
    "riesz": dens.riesz_logpdf,
    "kotzriesz": dens.kotzriesz_logpdf,
    "triesz": dens.triesz_logpdf,
    "beta-riesz": dens.beta_riesz_logpdf,
}


def check_sampler_density(kind: str, p, rng, N: int = 100_000, M: int = 400_000,
                          df: float | None = None, name: str | None = None) -> CheckReport:
    """Constructive sampler against an importance-weighted reference built from the density.

    A pilot run of the sampler only locates a heavy-tailed proposal; the
    reference itself is the proposal reweighted by ``exp(logpdf) / proposal``,
    so it depends on the sampler through nothing but efficiency.  Each
    summary statistic is compared with :func:`weighted_ks`; the statistic is
    the smallest p-value and the check passes when it exceeds 0.001.
    """
    gen = sampler.as_generator(rng)
    draw = sampler.SAMPLERS[kind]
    x = draw(gen, p, N)
    pilot = draw(gen, p, 5000)
    pd = kind in ("riesz", "beta-riesz")
    if df is None:
        df = 3.0 if kind in ("riesz", "kotzriesz") else 1.0
    prop, logq = (pd_proposal if pd else full_proposal)(pilot, p.beta, gen, M, df)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        logw = DENSITIES[kind](prop, p) - logq
        logw = np.where(np.isfinite(logw), logw, -np.inf)
        w = np.exp(logw - np.max(logw))
        keep = w > 0
        summ = pd_statistics if pd else full_statistics
        sx, sr = summ(x, p.beta), summ(prop[keep], p.beta)
    w = w[keep]
    pvals = {k: weighted_ks(sx[k], sr[k], w)[1] for k in sx}
    ess = float(w.sum() ** 2 / np.sum(w * w))
    pmin = min(pvals.values())
    detail = (", ".join(f"{k}: p={v:.4g}" for k, v in pvals.items())
              + f"; reference ESS {ess:.0f} of {M}; target p > 0.001")
    nm = name or f"sampler/{kind}-{p.variant}/m={p.m}/beta={p.beta}"
    return CheckReport(nm, pmin, 1.0, 0.999, N, detail)


def check_eigen_pipeline(p: TRieszParams, rng, N: int = 100_000,
                         name: str | None = None) -> CheckReport:
    """``T -> F = T* T -> eigenvalues`` against the eigenvalue density (m = 2).

    Ordered eigenvalues of sampled ``F`` are KS-tested against marginal CDFs
    obtained by quadrature of :func:`dens.eig_beta_riesz_logpdf`.
    """
    if p.m != 2:
        raise ValueError("eigenvalue pipeline check is implemented for m = 2")
    gen = sampler.as_generator(rng)
    t = sampler.sample_triesz(gen, p, N)
    f = linalg.hermitize(linalg.adjoint(t) @ t)
    ev = sampler.eigen_descending(f, p.beta)
    lo = math.log(ev[:, 1].min()) - 4
    hi = math.log(ev[:, 0].max()) + 4
    grid, c1, c2, mass = ordered_pair_cdfs(lambda g: dens.eig_beta_riesz_logpdf(g, p),
                                           1500, lo, hi)
    pvals = [stats.kstest(ev[:, 0], _interp_cdf(grid, c1)).pvalue,
             stats.kstest(ev[:, 1], _interp_cdf(grid, c2)).pvalue]
    detail = (f"KS p-values gamma_1 {pvals[0]:.4g}, gamma_2 {pvals[1]:.4g}; "
              f"tabulated mass {mass:.6f}; target p > 0.001")
    return CheckReport(name or f"eigen-pipeline/{p.variant}/n={p.n}/beta={p.beta}",
                       min(pvals), 1.0, 0.999, N, detail)


# ---------------------------------------------------------------------------
# default suite
# ---------------------------------------------------------------------------

def _xi2(beta):
    if beta == 1:
        return np.array([[1.2, 0.4], [0.4, 0.9]])
    return np.array([[1.2, 0.4 + 0.3j], [0.4 - 0.3j, 0.9]])


def _random_invertible(rng, n, beta):
    return linalg.gaussian_matrix(rng, n, n, beta) + 2 * linalg.identity(n, beta)


def default_jobs() -> dict[str, Callable]:
    """Named check jobs of the default suite; each takes a ``Generator``."""
    jobs: dict[str, Callable] = {}
    xi = _xi2(1)
    norm_cases = [
        ("riesz", RieszParams(2.0, [0])),
        ("riesz", RieszParams(2.3, [1, 0], xi)),
        ("riesz", RieszParams(2.3, [0, -1], xi, variant="II")),
        ("riesz", RieszParams(2.3, [1, 0], _xi2(2), beta=2)),
        ("kotzriesz", KotzRieszParams(2, [1, 0], Sigma=xi)),
        ("kotzriesz", KotzRieszParams(2, [0, -1], Sigma=xi, variant="II")),
        ("triesz", TRieszParams(1, 3, 0, [0], rho=1 / 3)),
        ("triesz", TRieszParams(2, 3, 0.5, [1, 0], Sigma=xi)),
        ("triesz", TRieszParams(2, 5, 0.5, [0, -1], Sigma=xi, variant="II")),
        ("beta-riesz", BetaRieszParams(4, 3, 0.5, [1, 0], rho=0.8, Sigma=xi)),
        ("beta-riesz", BetaRieszParams(4, 3, 0.5, [0, -1], rho=0.8, Sigma=xi, variant="II")),
        ("sv", TRieszParams(3, 4, 0, [1, 0])),
        ("sv", TRieszParams(4, 4, 0.5, [1, 0], variant="II")),
        ("eig", TRieszParams(3, 4, 0, [1, 0])),
        ("eig", TRieszParams(4, 4, 0.5, [1, 0], beta=2)),
    ]
    for kind, p in norm_cases:
        dim_tag = f"n={p.n}/" if hasattr(p, "n") else ""
        nm = f"normalization/{kind}-{p.variant}/{dim_tag}m={p.m}/beta={p.beta}"
        jobs[nm] = lambda rng, kind=kind, p=p, nm=nm: check_normalization(kind, p, name=nm)
    for beta in (1, 2):
        for i in range(3):
            n, m = 2 + i % 2, 1 + i
            nm = f"jacobian/linear/{i}/beta={beta}"
            jobs[nm] = lambda rng, n=n, m=m, beta=beta, nm=nm: check_jacobian_linear(
                _random_invertible(rng, n, beta), _random_invertible(rng, m, beta), beta, name=nm)
            nm = f"jacobian/symmetric/{i}/beta={beta}"
            jobs[nm] = lambda rng, m=m, beta=beta, nm=nm: check_jacobian_symmetric(
                _random_invertible(rng, m, beta), beta, name=nm)
    for n, m, beta in [(3, 1, 1), (4, 1, 2), (3, 2, 1), (4, 2, 2)]:
        nm = f"svd-measure/n={n}/m={m}/beta={beta}"
        jobs[nm] = lambda rng, n=n, m=m, beta=beta, nm=nm: check_svd_measure(n, m, beta, rng,
                                                                                name=nm)
    for a, k, beta, m in [(3.0, [2], 1, 1), (3.0, [1, 0], 1, 2), (3.0, [2, 1], 2, 2)]:
        nm = f"gamma-integral/a={a:g}/k={tuple(k)}/m={m}/beta={beta}"
        jobs[nm] = lambda rng, a=a, k=k, beta=beta, m=m, nm=nm: check_gamma_integral(
            a, k, beta, m, rng, name=nm)
    for tau, ev, beta in [((2, 1), (3.0, 2.0, 1.0), 1), ((2,), (2.0, 0.5), 2),
                          ((1, 1), (1.5, 1.0, 0.25), 2)]:
        nm = f"spherical/tau={tau}/m={len(ev)}/beta={beta}"
        L = np.diag(ev).astype(float if beta == 1 else complex)
        jobs[nm] = lambda rng, tau=tau, L=L, beta=beta, nm=nm: check_spherical_identity(
            tau, L, beta, rng, name=nm)
    return jobs


def thread_count() -> int:
    """Worker threads, capped by the ``RIESZ_LAB_THREADS`` environment variable."""
    cap = os.environ.get("RIESZ_LAB_THREADS")
    default = min(4, os.cpu_count() or 1)
    if cap is None:
        return default
    try:
        return max(1, int(cap))
    except ValueError:
        return default


def run_suite(seed: int = 0, jobs: dict[str, Callable] | None = None,
              threads: int | None = None) -> list[CheckReport]:
    """Run named checks on disjoint random streams; reports come back sorted by name.

    The stream of each job is its position in the sorted name list, so the
    reports do not depend on the number of threads.
    """
    jobs = default_jobs() if jobs is None else jobs
    names = sorted(jobs)

    def run_one(i_name):
        i, nm = i_name
        return jobs[nm](sampler.RngStream(seed, i).generator())

    workers = threads or thread_count()
    if workers == 1:
        reports = [run_one(x) for x in enumerate(names)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(run_one, enumerate(names)))
    return sorted(reports, key=lambda r: r.name)


def format_table(reports: list[CheckReport]) -> str:
    width = max((len(r.name) for r in reports), default=10)
    lines = [f"{'check'.ljust(width)}  {'statistic':>14}  {'target':>10}  {'tol':>9}  result"]
    for r in reports:
        lines.append(f"{r.name.ljust(width)}  {r.statistic:14.8g}  {r.target:10.6g}  "
                     f"{r.tolerance:9.3g}  {'PASS' if r.passed else 'FAIL'}")
    n_pass = sum(r.passed for r in reports)
    lines.append(f"{n_pass}/{len(reports)} checks passed")
    return "\n".join(lines)
