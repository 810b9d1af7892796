"""Dense matrices over the real normed division algebras.

Matrices are carried around in a *native* numpy form:

=====  ==========================  =========================================
beta   algebra                     native array for an ``n x m`` matrix
=====  ==========================  =========================================
1      real                        float, shape ``(..., n, m)``
2      complex                     complex, shape ``(..., n, m)``
4      quaternion                  complex, shape ``(..., 2n, 2m)``
=====  ==========================  =========================================

A quaternion ``q = z1 + z2 j`` (``z1, z2`` complex) is stored as the 2x2 block
``[[z1, z2], [-conj(z2), conj(z1)]]``; blocks are interleaved so that the
embedding of an upper triangular quaternion matrix is upper triangular and
its Cholesky factor is the embedding of the quaternion Cholesky factor.
Octonions (beta=8) have no matrix arithmetic here; they are accepted only
by scalar formulas parameterized by beta.

Leading ``...`` axes are batch axes; every routine broadcasts over them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import NotPositiveDefinite, ShapeMismatch, UnsupportedAlgebra

PIVOT_RTOL = 1e-10

COORD_NAMES = {
    1: ("re",),
    2: ("re", "im"),
    4: ("re", "im", "j", "k"),
    8: ("e0", "e1", "e2", "e3", "e4", "e5", "e6", "e7"),
}


class Capability(enum.Enum):
    FULL_MATRIX = "full-matrix"
    SCALAR_FORMULA_ONLY = "scalar-formula-only"


@dataclass(frozen=True)
class Algebra:
    beta: int
    capability: Capability

    def __post_init__(self):
        if self.beta not in (1, 2, 4, 8):
            raise ValueError(f"beta must be one of 1, 2, 4, 8, got {self.beta}")
        if self.beta == 8 and self.capability is Capability.FULL_MATRIX:
            raise ValueError("octonion matrices are scalar-formula-only")

    @property
    def block(self) -> int:
        return 2 if self.beta == 4 else 1


def algebra(beta: int) -> Algebra:
    beta = int(beta)
    cap = Capability.SCALAR_FORMULA_ONLY if beta == 8 else Capability.FULL_MATRIX
    return Algebra(beta, cap)


def require_matrix_algebra(beta: int) -> Algebra:
    alg = algebra(beta)
    if alg.capability is not Capability.FULL_MATRIX:
        raise UnsupportedAlgebra(
            f"beta={beta} supports scalar formulas only, not matrix operations")
    return alg


def block_size(beta: int) -> int:
    return 2 if beta == 4 else 1


# ---------------------------------------------------------------------------
# coordinates <-> native
# ---------------------------------------------------------------------------

def from_coords(coords, beta: int) -> np.ndarray:
    """Build the native array from real coordinate planes ``(..., beta, n, m)``."""
    require_matrix_algebra(beta)
    c = np.asarray(coords, dtype=float)
    if c.shape[-3] != beta:
        raise ShapeMismatch(f"expected {beta} coordinate planes, got {c.shape[-3]}")
    if beta == 1:
        return c[..., 0, :, :].copy()
    if beta == 2:
        return c[..., 0, :, :] + 1j * c[..., 1, :, :]
    z1 = c[..., 0, :, :] + 1j * c[..., 1, :, :]
    z2 = c[..., 2, :, :] + 1j * c[..., 3, :, :]
    n, m = z1.shape[-2:]
    out = np.empty(z1.shape[:-2] + (2 * n, 2 * m), dtype=complex)
    out[..., 0::2, 0::2] = z1
    out[..., 0::2, 1::2] = z2
    out[..., 1::2, 0::2] = -np.conj(z2)
    out[..., 1::2, 1::2] = np.conj(z1)
    return out


def to_coords(x, beta: int) -> np.ndarray:
    """Inverse of :func:`from_coords`."""
    require_matrix_algebra(beta)
    x = np.asarray(x)
    if beta == 1:
        return np.real(x)[..., None, :, :].astype(float)
    if beta == 2:
        return np.stack([x.real, x.imag], axis=-3)
    z1 = x[..., 0::2, 0::2]
    z2 = x[..., 0::2, 1::2]
    return np.stack([z1.real, z1.imag, z2.real, z2.imag], axis=-3)


def native_shape(x, beta: int) -> tuple[int, int]:
    """Algebra shape ``(n, m)`` of a native array."""
    b = block_size(beta)
    r, c = np.shape(x)[-2:]
    if r % b or c % b:
        raise ShapeMismatch(f"native quaternion array must have even dims, got {(r, c)}")
    return r // b, c // b


def identity(m: int, beta: int) -> np.ndarray:
    require_matrix_algebra(beta)
    b = block_size(beta)
    dtype = float if beta == 1 else complex
    return np.eye(b * m, dtype=dtype)


def adjoint(x) -> np.ndarray:
    x = np.asarray(x)
    return np.conj(np.swapaxes(x, -1, -2)) if np.iscomplexobj(x) else np.swapaxes(x, -1, -2)


def hermitize(a) -> np.ndarray:
    return 0.5 * (a + adjoint(a))


def flip(a) -> np.ndarray:
    """Reverse row and column order (congruence by the exchange matrix)."""
    return np.asarray(a)[..., ::-1, ::-1]


def real_trace(a, beta: int) -> np.ndarray:
    """Real part of the algebra trace."""
    return np.real(np.trace(a, axis1=-2, axis2=-1)) / block_size(beta)


@dataclass
class AlgMatrix:
    """An ``n x m`` matrix over the algebra, stored as real coordinate planes."""

    coords: np.ndarray
    beta: int

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        if self.coords.ndim != 3 or self.coords.shape[0] != self.beta:
            raise ShapeMismatch(
                f"coords must have shape (beta, n, m) with beta={self.beta}, "
                f"got {self.coords.shape}")
        algebra(self.beta)

    @property
    def n(self) -> int:
        return self.coords.shape[1]

    @property
    def m(self) -> int:
        return self.coords.shape[2]

    def native(self) -> np.ndarray:
        return from_coords(self.coords, self.beta)

    @classmethod
    def from_native(cls, x, beta: int) -> "AlgMatrix":
        return cls(to_coords(x, beta), beta)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"n": self.n, "m": self.m, "beta": self.beta}
        for name, plane in zip(COORD_NAMES[self.beta], self.coords):
            out[name] = plane.tolist()
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "AlgMatrix":
        beta = int(obj.get("beta", 1))
        names = COORD_NAMES[algebra(beta).beta]
        allowed = {"n", "m", "beta", *names}
        unknown = set(obj) - allowed
        if unknown:
            raise ShapeMismatch(f"unknown matrix literal fields: {sorted(unknown)}")
        n, m = int(obj["n"]), int(obj["m"])
        planes = []
        for name in names:
            if name in obj:
                plane = np.asarray(obj[name], dtype=float).reshape(n, m)
            elif name == "re":
                raise ShapeMismatch("matrix literal needs an 're' plane")
            else:
                plane = np.zeros((n, m))
            planes.append(plane)
        return cls(np.stack(planes), beta)


def as_native(x, beta: int | None = None) -> tuple[np.ndarray, int]:
    """Coerce an :class:`AlgMatrix` or array to ``(native, beta)``."""
    if isinstance(x, AlgMatrix):
        if beta is not None and beta != x.beta:
            raise ShapeMismatch(f"matrix has beta={x.beta}, expected {beta}")
        return x.native(), x.beta
    x = np.asarray(x)
    if beta is None:
        beta = 2 if np.iscomplexobj(x) else 1
    require_matrix_algebra(beta)
    if beta == 1:
        x = np.real_if_close(x)
        if np.iscomplexobj(x):
            raise ShapeMismatch("complex entries given for a real matrix")
        x = x.astype(float)
    else:
        x = x.astype(complex)
    return x, beta


# ---------------------------------------------------------------------------
# factorizations
# ---------------------------------------------------------------------------

def _chol_lower_loopfree(a: np.ndarray) -> np.ndarray:
    """Column-by-column Cholesky vectorized over the batch; NaN where a pivot fails."""
    n = a.shape[-1]
    low = np.zeros(a.shape, dtype=np.result_type(a.dtype, float))
    for j in range(n):
        row = low[..., j, :j]
        d = np.real(a[..., j, j] - np.sum(row * np.conj(row), axis=-1))
        with np.errstate(invalid="ignore", divide="ignore"):
            djj = np.sqrt(np.where(d > 0, d, np.nan))
            low[..., j, j] = djj
            if j + 1 < n:
                col = a[..., j + 1:, j] - np.einsum("...ik,...k->...i", low[..., j + 1:, :j],
                                                     np.conj(row))
                low[..., j + 1:, j] = col / djj[..., None]
    return low


def _chol_lower(a: np.ndarray, rtol: float = PIVOT_RTOL) -> tuple[np.ndarray, np.ndarray]:
    """Batched lower Cholesky; returns (L, ok) with NaN factors where it fails."""
    batch = a.shape[:-2]
    try:
        low = np.linalg.cholesky(a)
        ok = np.ones(batch, dtype=bool)
    except np.linalg.LinAlgError:
        low = _chol_lower_loopfree(a)
        ok = np.all(np.isfinite(low), axis=(-2, -1))
    # pivot test relative to the largest diagonal entry
    diag_a = np.real(np.diagonal(a, axis1=-2, axis2=-1))
    piv = np.real(np.diagonal(low, axis1=-2, axis2=-1)) ** 2
    with np.errstate(invalid="ignore"):
        good = np.all(piv > rtol * np.max(diag_a, axis=-1, keepdims=True), axis=-1)
    ok &= good & np.all(np.isfinite(diag_a), axis=-1)
    return low, ok


def cholesky_masked(a, beta: int, rtol: float = PIVOT_RTOL) -> tuple[np.ndarray, np.ndarray]:
    """Upper factor ``T`` with ``a = T* T`` plus a boolean mask of valid entries.

    ``rtol`` is the relative pivot threshold; ``0`` accepts every strictly
    positive pivot, which is the right test for points of a density's support.
    """
    a, beta = as_native(a, beta)
    low, ok = _chol_lower(a, rtol)
    return adjoint(low), ok


def cholesky_upper(a, beta: int | None = None) -> np.ndarray:
    """Upper triangular ``T`` with positive diagonal and ``T* T = a``.

    Raises
    ------
    NotPositiveDefinite
        If any pivot is at or below ``1e-10 * max(diag(a))``.
    """
    a, beta = as_native(a, beta)
    t, ok = cholesky_masked(a, beta)
    if not np.all(ok):
        raise NotPositiveDefinite("matrix is not positive definite (Cholesky pivot test)")
    return t


def lower_factor(a, beta: int | None = None) -> np.ndarray:
    """Lower triangular ``B`` with positive diagonal and ``B* B = a``.

    This is the Cholesky factor taken in reversed index order; its
    diagonal carries the trailing-minor pivots of ``a``.
    """
    a, beta = as_native(a, beta)
    return flip(cholesky_upper(flip(a), beta))


def tri_factor(a, beta: int, variant: str) -> np.ndarray:
    """Triangular factor used for type I (upper) or type II (lower) weights."""
    return cholesky_upper(a, beta) if variant == "I" else lower_factor(a, beta)


def _diag_pivots(t: np.ndarray, beta: int) -> np.ndarray:
    d = np.real(np.diagonal(t, axis1=-2, axis2=-1))[..., :: block_size(beta)]
    return d * d


def ldl_pivots(a, beta: int | None = None) -> np.ndarray:
    """Pivots ``lambda_i`` of ``a = L* diag(lambda) L`` with ``L`` unit upper triangular.

    ``lambda_i`` is the ratio of consecutive leading principal minors,
    i.e. the squared diagonal of :func:`cholesky_upper`.
    """
    a, beta = as_native(a, beta)
    return _diag_pivots(cholesky_upper(a, beta), beta)


def trailing_pivots(a, beta: int | None = None) -> np.ndarray:
    """Pivots built from trailing principal minors: ``d_i = |A[i:, i:]| / |A[i+1:, i+1:]|``."""
    a, beta = as_native(a, beta)
    return ldl_pivots(flip(a), beta)[..., ::-1]


def logdet_pd(a, beta: int | None = None) -> np.ndarray:
    a, beta = as_native(a, beta)
    return np.sum(np.log(ldl_pivots(a, beta)), axis=-1)


def real_representation(a, beta: int | None = None) -> np.ndarray:
    """Real ``(beta n) x (beta m)`` matrix acting on coordinate columns.

    Multiplicative and compatible with the adjoint: ``repr(A*) = repr(A).T``.
    """
    a, beta = as_native(a, beta)
    if beta == 1:
        return a.copy()
    re, im = a.real, a.imag
    r, c = a.shape[-2:]
    out = np.empty(a.shape[:-2] + (2 * r, 2 * c))
    out[..., 0::2, 0::2] = re
    out[..., 0::2, 1::2] = -im
    out[..., 1::2, 0::2] = im
    out[..., 1::2, 1::2] = re
    return out


# ---------------------------------------------------------------------------
# random factors
# ---------------------------------------------------------------------------

def gaussian_matrix(rng: np.random.Generator, n: int, m: int, beta: int,
                    component_std: float = 1.0, size=None) -> np.ndarray:
    """Native matrix with i.i.d. ``normal(0, component_std**2)`` real coordinates."""
    require_matrix_algebra(beta)
    if not component_std > 0:
        raise ValueError("component_std must be positive")
    batch = () if size is None else tuple(np.atleast_1d(size))
    coords = rng.standard_normal(batch + (beta, n, m)) * component_std
    return from_coords(coords, beta)


def haar_stiefel(rng: np.random.Generator, n: int, m: int, beta: int, size=None) -> np.ndarray:
    """Haar-distributed ``n x m`` matrix with orthonormal columns (``H* H = I``).

    Q factor of a Gaussian matrix with the R diagonal made positive.  For
    quaternions the complex QR of the embedding is the embedding of the
    quaternion QR, by uniqueness of the positive-diagonal factorization.
    """
    require_matrix_algebra(beta)
    if n < m:
        raise ValueError(f"Stiefel manifold needs n >= m, got n={n}, m={m}")
    z = gaussian_matrix(rng, n, m, beta, 1.0, size)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    phase = d / np.abs(d)
    return q * phase[..., None, :]
