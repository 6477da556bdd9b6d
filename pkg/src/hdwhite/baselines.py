"""Max-type and sum-type competitor statistics built on circular sample autocovariances."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

import numpy as np

from hdwhite.exceptions import ConfigError, ZeroVarianceSeriesError
from hdwhite.simulate import as_series

__all__ = [
    "AutocovEstimate",
    "BaselineResult",
    "sample_autocov",
    "sample_autocorr",
    "max_stat",
    "sum_stat",
    "baseline_stats",
    "calibrate_null",
    "calibrate_many",
    "BASELINES",
    "MIN_CALIBRATION_REPS",
]

MIN_CALIBRATION_REPS = 500


@dataclass(frozen=True)
class AutocovEstimate:
    tau: int
    matrix: np.ndarray
    normalized: bool = False


@dataclass(frozen=True)
class BaselineResult:
    kind: str
    value: float
    critical_value: float

    @property
    def reject(self) -> bool:
        return self.value > self.critical_value


def _autocov_matrix(x: np.ndarray, tau: int) -> np.ndarray:
    T = x.shape[1]
    if not 0 <= tau < T:
        raise ValueError(f"lag must satisfy 0 <= tau < T={T}, got {tau}")
    # column t of the rolled panel is x_{t - tau} with wrap-around
    return x @ np.roll(x, tau, axis=1).T / T


def sample_autocov(x, tau: int) -> AutocovEstimate:
    """Circular lag-``tau`` sample autocovariance ``(1/T) sum_t x_t x_{t-tau}^T``."""
    return AutocovEstimate(tau, _autocov_matrix(as_series(x), tau))


def _inv_sd(x: np.ndarray) -> np.ndarray:
    var = np.einsum("it,it->i", x, x) / x.shape[1]
    zero = np.flatnonzero(var <= 0.0)
    if zero.size:
        raise ZeroVarianceSeriesError(int(zero[0]) + 1)
    return 1.0 / np.sqrt(var)


def sample_autocorr(x, tau: int) -> AutocovEstimate:
    x = as_series(x)
    d = _inv_sd(x)
    m = _autocov_matrix(x, tau) * d[:, None] * d[None, :]
    if tau == 0:
        np.fill_diagonal(m, 1.0)
    return AutocovEstimate(tau, m, normalized=True)


def _check_q(x: np.ndarray, q: int):
    if q < 1 or q >= x.shape[1]:
        raise ConfigError(f"need 1 <= q < T, got q={q}, T={x.shape[1]}")


def max_stat(x, q: int) -> float:
    """Largest absolute sample autocorrelation over lags ``1..q`` and all pairs."""
    x = as_series(x)
    _check_q(x, q)
    d = _inv_sd(x)
    y = x * d[:, None]
    return max(float(np.abs(_autocov_matrix(y, tau)).max()) for tau in range(1, q + 1))


def sum_stat(x, q: int) -> float:
    """Sum of squared Frobenius norms of the sample autocovariances at lags ``1..q``."""
    x = as_series(x)
    _check_q(x, q)
    return float(sum(np.sum(_autocov_matrix(x, tau) ** 2) for tau in range(1, q + 1)))


BASELINES: dict[str, Callable] = {"max_stat": max_stat, "sum_stat": sum_stat}


def baseline_stats(x, q: int) -> dict[str, float]:
    return {kind: fn(x, q) for kind, fn in BASELINES.items()}


def calibrate_many(kinds, null_generator: Callable, nreps: int, alpha: float,
                   rngs, q: int = 1) -> dict[str, float]:
    """Empirical ``(1 - alpha)`` quantiles of several statistics from shared null draws.

    ``rngs`` is an iterable of at least ``nreps`` generators, one per draw, so the
    caller controls stream derivation. ``null_generator(rng)`` returns a ``p x T`` panel.
    """
    if nreps < MIN_CALIBRATION_REPS:
        raise ConfigError(f"calibration needs at least {MIN_CALIBRATION_REPS} replications, got {nreps}")
    if not 0.0 < alpha <= 1.0:
        raise ConfigError(f"alpha must lie in (0, 1], got {alpha}")
    kinds = list(kinds)
    values = {k: np.empty(nreps) for k in kinds}
    for r, rng in zip(range(nreps), rngs):
        x = null_generator(rng)
        for k in kinds:
            values[k][r] = BASELINES[k](x, q)
    return {k: _upper_quantile(v, alpha) for k, v in values.items()}


def _upper_quantile(values: np.ndarray, alpha: float) -> float:
    if alpha >= 1.0:
        return -np.inf
    return float(np.quantile(values, 1.0 - alpha, method="higher"))


def calibrate_null(kind: str, null_generator: Callable, nreps: int, alpha: float,
                   rng: np.random.Generator, q: int = 1) -> float:
    """Monte Carlo critical value of ``kind`` under a matched null generator."""
    if kind not in BASELINES:
        raise ConfigError(f"unknown baseline {kind!r}")
    return calibrate_many([kind], null_generator, nreps, alpha, itertools.repeat(rng), q=q)[kind]
