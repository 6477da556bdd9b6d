"""Null and serially dependent panel generators.

Every generator returns a ``p x T`` array whose column ``t`` is the observation
at time ``t``; all randomness comes from the ``numpy.random.Generator`` passed in.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.signal import lfilter

from hdwhite.covariance import CovarianceModel
from hdwhite.exceptions import ConfigError, InvalidDimensionError, NonStationaryError

__all__ = [
    "Innovation",
    "DiagCoeff",
    "as_series",
    "coeff_matrix",
    "draw_innovations",
    "gen_null",
    "gen_var1",
    "gen_vma1",
    "VAR_BURN_IN",
]

VAR_BURN_IN = 50

GAMMA_SHAPE = 4.0
GAMMA_SCALE = 0.5


class Innovation(str, Enum):
    GAUSSIAN = "gaussian"
    SHIFTED_GAMMA = "shifted_gamma"

    @classmethod
    def parse(cls, value) -> Innovation:
        if isinstance(value, cls):
            return value
        aliases = {"gamma": cls.SHIFTED_GAMMA, "normal": cls.GAUSSIAN}
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ConfigError(f"unknown innovation distribution {value!r}") from None


@dataclass(frozen=True)
class DiagCoeff:
    """Diagonal coefficient ``diag(value, ..., value, 0, ..., 0)`` with ``d`` leading nonzeros."""

    p: int
    d: int
    value: float

    def __post_init__(self):
        if not 0 <= self.d <= self.p:
            raise ConfigError(f"need 0 <= d <= p, got d={self.d}, p={self.p}")

    def diagonal(self) -> np.ndarray:
        diag = np.zeros(self.p)
        diag[: self.d] = self.value
        return diag

    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal())


def coeff_matrix(kind: str, p: int, value: float | None = None) -> DiagCoeff:
    """Coefficient designs: ``dense`` (95% of series), ``sparse`` (5%, at least one), ``identity``."""
    if p < 1:
        raise InvalidDimensionError(f"p must be >= 1, got {p}")
    if kind == "dense":
        d, default = int(np.floor(0.95 * p)), 0.2
    elif kind == "sparse":
        d, default = max(1, int(np.floor(0.05 * p))), 0.2
    elif kind == "identity":
        d, default = p, 1.0
    else:
        raise ConfigError(f"unknown coefficient kind {kind!r}")
    return DiagCoeff(p=p, d=d, value=default if value is None else float(value))


def as_series(x) -> np.ndarray:
    """Validate a ``p x T`` panel and return it as a float array."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise InvalidDimensionError(f"expected a non-empty p x T matrix, got shape {x.shape}")
    if not np.isfinite(x).all():
        raise ValueError("series contains non-finite values")
    return x


def draw_innovations(dist, p: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. mean-zero, unit-variance ``p x n`` innovations.

    ``shifted_gamma`` is ``Gamma(shape=4, scale=0.5) - 2``: mean 0, variance 1,
    kurtosis 4.5.
    """
    dist = Innovation.parse(dist)
    if n < 1 or p < 1:
        raise InvalidDimensionError(f"need p, n >= 1, got p={p}, n={n}")
    if dist is Innovation.GAUSSIAN:
        return rng.standard_normal((p, n))
    return rng.gamma(GAMMA_SHAPE, GAMMA_SCALE, size=(p, n)) - GAMMA_SHAPE * GAMMA_SCALE


def _mix(cov: CovarianceModel, w: np.ndarray) -> np.ndarray:
    if cov.p != w.shape[0]:
        raise InvalidDimensionError(f"covariance is {cov.p}-dimensional, series has p={w.shape[0]}")
    if cov.is_identity:
        return w
    return cov.sqrt_sigma0 @ w


def _check_T(T):
    if int(T) != T or T < 1:
        raise InvalidDimensionError(f"T must be a positive integer, got {T!r}")


def gen_null(cov: CovarianceModel, dist, T: int, rng: np.random.Generator | None = None,
             innovations=None) -> np.ndarray:
    """``x_t = Sigma0^{1/2} z_t`` with i.i.d. innovations (or the supplied ``innovations``)."""
    if innovations is None:
        _check_T(T)
        z = draw_innovations(dist, cov.p, T, rng)
    else:
        z = np.asarray(innovations, dtype=float)
    return _mix(cov, z)


def gen_var1(cov: CovarianceModel, coeff: DiagCoeff, dist, T: int,
             rng: np.random.Generator, burn_in: int = VAR_BURN_IN) -> np.ndarray:
    """``y_t = A y_{t-1} + z_t`` from a zero state, ``burn_in`` steps discarded, then mixed."""
    _check_T(T)
    if abs(coeff.value) >= 1.0 and coeff.d > 0:
        raise NonStationaryError(f"|coefficient| must be < 1, got {coeff.value}")
    if coeff.p != cov.p:
        raise InvalidDimensionError(f"coefficient is {coeff.p}-dimensional, covariance {cov.p}")
    z = draw_innovations(dist, cov.p, T + burn_in, rng)
    y = z.copy()
    if coeff.d > 0 and coeff.value != 0.0:
        y[: coeff.d] = lfilter([1.0], [1.0, -coeff.value], z[: coeff.d], axis=1)
    return _mix(cov, y[:, burn_in:])


def gen_vma1(cov: CovarianceModel, coeff: DiagCoeff, dist, T: int,
             rng: np.random.Generator) -> np.ndarray:
    """``w_t = z_t + A z_{t-1}`` from ``T + 1`` innovation columns, then mixed."""
    _check_T(T)
    if coeff.p != cov.p:
        raise InvalidDimensionError(f"coefficient is {coeff.p}-dimensional, covariance {cov.p}")
    z = draw_innovations(dist, cov.p, T + 1, rng)
    w = z[:, 1:] + coeff.diagonal()[:, None] * z[:, :-1]
    return _mix(cov, w)
