"""Riesz, Kotz-Riesz, T-Riesz and beta-Riesz distributions over the real
normed division algebras (real, complex, quaternion; octonion for scalar
formulas only)."""

from . import dens, errors, hwv, jack, linalg, sampler, specfun, verify
from .params import BetaRieszParams, KotzRieszParams, RieszParams, TRieszParams

__version__ = "0.1.0"

__all__ = ["dens", "errors", "hwv", "jack", "linalg", "sampler", "specfun", "verify",
           "RieszParams", "KotzRieszParams", "TRieszParams", "BetaRieszParams"]
