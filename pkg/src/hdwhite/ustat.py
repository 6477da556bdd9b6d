"""The gap-constrained U-statistic white-noise test.

For a ``p x T`` panel ``x`` and lag cap ``q`` the order-``a`` statistic is the
average, over admissible time tuples (see :mod:`hdwhite.tuples`), of

    sum_{tau=1..q} sum_{i,j} prod_k x[i, t_k] * x[j, t_k - tau].

Each ``(i, j, tau)`` triple is a channel whose per-time term is
``x[i, t] * x[j, t - tau]``; the sum over tuples of a channel is one dynamic
program, and the statistic is the exactly rounded sum over channels. Because
that reduction is exact (``math.fsum``), results do not depend on how channels
are chunked or on how many worker threads evaluate them.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import ndtr, ndtri

from hdwhite._kernels import channel_levels
from hdwhite.covariance import CovarianceModel
from hdwhite.exceptions import (
    ConfigError,
    DegenerateVarianceError,
    HDWhiteError,
    InsufficientSampleError,
    ZeroVarianceSeriesError,
)
from hdwhite.simulate import as_series
from hdwhite.tuples import TupleSpec, dp_levels, tuple_count

__all__ = [
    "TestConfig",
    "OrderResult",
    "UStatReport",
    "u_statistic",
    "sigma_hat",
    "sigma_exact",
    "order_statistics",
    "run_test",
    "preprocess",
    "normal_upper_tail",
    "normal_quantile",
    "critical_value",
    "default_threads",
]

# numpy fallback: channels per chunk are sized so a chunk holds about this many doubles
CHUNK_ELEMENTS = 1 << 20


def default_threads() -> int:
    env = os.environ.get("HDWHITE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"HDWHITE_THREADS must be an integer, got {env!r}") from None
    return 1


def normal_upper_tail(z: float) -> float:
    """``P(Z > z)`` for standard normal ``Z``."""
    return float(ndtr(-z))


def normal_quantile(prob: float) -> float:
    """Inverse of the standard normal CDF on ``(0, 1)``."""
    if not 0.0 < prob < 1.0:
        raise ValueError(f"probability must lie in (0, 1), got {prob}")
    return float(ndtri(prob))


def critical_value(alpha: float) -> float:
    """One-sided upper critical value ``z_{1-alpha}``; ``alpha = 1`` never accepts."""
    if alpha >= 1.0:
        return -math.inf
    return -normal_quantile(alpha)


def _check_order(T: int, q: int, a: int) -> int:
    spec = TupleSpec(max(T, 1), q, a)
    n = tuple_count(T, q, a)
    if n == 0:
        raise InsufficientSampleError(f"order a={a} with q={q} needs T >= {spec.min_T}, got T={T}")
    return n


def _pairs(p: int, symmetric: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if symmetric:
        i, j = np.triu_indices(p)
        weight = np.where(i == j, 1.0, 2.0)
    else:
        i, j = np.divmod(np.arange(p * p), p)
        weight = np.ones(p * p)
    return i, j, weight


def _sweep(x: np.ndarray, q: int, a_max: int, lags: Sequence[int], symmetric: bool,
           threads: int) -> list[float]:
    """Exact channel totals of the tuple product sums for lengths ``1..a_max``.

    Lag ``0`` channels use ``x[i, t] * x[j, t]``; lag ``tau`` channels use
    ``x[i, t] * x[j, t - tau]`` (zero where ``t - tau < 1``, which no admissible
    tuple touches since ``tau <= q``).
    """
    p, T = x.shape
    i_idx, j_idx, weight = _pairs(p, symmetric)
    n = len(i_idx)
    if channel_levels is not None:
        chunk = max(1, -(-n // threads))
        x = np.ascontiguousarray(x)

        def run(task):
            tau, sl = task
            out = np.empty((len(i_idx[sl]), a_max))
            channel_levels(x, q, a_max, tau, i_idx[sl], j_idx[sl], out)
            return out * weight[sl, None]
    else:
        chunk = max(1, CHUNK_ELEMENTS // T)

        def run(task):
            tau, sl = task
            lagged = np.zeros_like(x)
            lagged[:, tau:] = x[:, : T - tau]
            return dp_levels(x[i_idx[sl]] * lagged[j_idx[sl]], q, a_max) * weight[sl, None]

    tasks = [(tau, slice(start, start + chunk)) for tau in lags for start in range(0, n, chunk)]
    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(run, tasks))
    else:
        blocks = [run(t) for t in tasks]
    stacked = np.concatenate(blocks, axis=0)
    return [math.fsum(stacked[:, k]) for k in range(a_max)]


def order_statistics(x, q: int, orders: Sequence[int], threads: int | None = None
                     ) -> dict[int, tuple[float, float]]:
    """Raw statistic and variance estimate for several orders from one channel sweep.

    Returns ``{a: (u_raw, sigma_hat)}``. The variance estimate may be ``<= 0``
    for degenerate data; callers decide how to react.
    """
    x = as_series(x)
    T = x.shape[1]
    counts = {a: _check_order(T, q, a) for a in orders}
    a_max = max(orders)
    threads = default_threads() if threads is None else max(1, int(threads))
    lagged_totals = _sweep(x, q, a_max, range(1, q + 1), symmetric=False, threads=threads)
    same_time_totals = _sweep(x, q, a_max, [0], symmetric=True, threads=threads)
    out = {}
    for a in orders:
        n = counts[a]
        u = lagged_totals[a - 1] / n
        sig = math.sqrt(q) * same_time_totals[a - 1] / n**1.5
        out[a] = (u, sig)
    return out


def u_statistic(x, q: int, a: int) -> float:
    """The order-``a`` U-statistic of lag cap ``q``."""
    x = as_series(x)
    n = _check_order(x.shape[1], q, a)
    return _sweep(x, q, a, range(1, q + 1), symmetric=False, threads=1)[a - 1] / n


def sigma_hat(x, q: int, a: int) -> float:
    """Moment estimator of the null standard deviation of :func:`u_statistic`."""
    x = as_series(x)
    n = _check_order(x.shape[1], q, a)
    total = _sweep(x, q, a, [0], symmetric=True, threads=1)[a - 1]
    value = math.sqrt(q) * total / n**1.5
    if not value > 0.0:
        raise DegenerateVarianceError(f"variance estimate for order {a} is {value!r}")
    return value


def sigma_exact(cov, T: int, q: int, a: int) -> float:
    """Exact null standard deviation ``sqrt(q / N) * sum_ij |sigma_ij|^a``."""
    sigma0 = cov.sigma0 if isinstance(cov, CovarianceModel) else np.asarray(cov, dtype=float)
    n = _check_order(T, q, a)
    return math.sqrt(q / n) * math.fsum((np.abs(sigma0) ** a).ravel())


@dataclass
class TestConfig:
    q: int = 1
    orders: tuple[int, ...] = (2, 4, 6)
    alpha: float = 0.05
    demean: bool = False
    scale: bool = False

    __test__ = False  # not a pytest class

    def __post_init__(self):
        self.orders = tuple(int(a) for a in self.orders)
        if not self.orders:
            raise ConfigError("at least one order is required")
        if len(set(self.orders)) != len(self.orders):
            raise ConfigError(f"orders must be distinct, got {self.orders}")
        if int(self.q) != self.q or self.q < 1:
            raise ConfigError(f"q must be a positive integer, got {self.q}")
        self.q = int(self.q)
        for a in self.orders:
            if a < 2 or a % 2:
                raise ConfigError(f"orders must be positive even integers, got {a}")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in (0, 1], got {self.alpha}")

    def min_T(self) -> int:
        return max(a * self.q + a for a in self.orders)


@dataclass
class OrderResult:
    a: int
    u_raw: float | None = None
    sigma_hat: float | None = None
    sigma_used: float | None = None
    z: float | None = None
    p_value: float | None = None
    reject: bool | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class UStatReport:
    config: TestConfig
    p: int
    T: int
    orders: dict[int, OrderResult] = field(default_factory=dict)
    adaptive_z: float | None = None
    adaptive_p: float | None = None
    adaptive_reject: bool | None = None
    standardizer: str = "estimated"

    def z_values(self) -> dict[int, float | None]:
        return {a: r.z for a, r in self.orders.items()}

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "T": self.T,
            "config": asdict(self.config) | {"orders": list(self.config.orders)},
            "standardizer": self.standardizer,
            "orders": {str(a): asdict(r) for a, r in self.orders.items()},
            "adaptive": {
                "z": self.adaptive_z,
                "p_value": self.adaptive_p,
                "reject": self.adaptive_reject,
            },
        }


def preprocess(x, demean: bool = False, scale: bool = False) -> np.ndarray:
    x = as_series(x)
    if demean:
        x = x - x.mean(axis=1, keepdims=True)
    if scale:
        sd = x.std(axis=1, keepdims=True)
        zero = np.flatnonzero(sd[:, 0] == 0.0)
        if zero.size:
            raise ZeroVarianceSeriesError(int(zero[0]) + 1)
        x = x / sd
    return x


def run_test(x, cfg: TestConfig | None = None, null_cov: CovarianceModel | None = None,
             threads: int | None = None) -> UStatReport:
    """Run the per-order tests and their adaptive combination.

    Each order is standardized by its variance estimate, or by the exact null
    standard deviation when ``null_cov`` is given. An order that cannot be
    computed is reported with ``error`` set and left out of the adaptive
    statistic, which averages the remaining z-scores as ``sum(z) / sqrt(m)``.
    """
    cfg = cfg or TestConfig()
    x = preprocess(x, cfg.demean, cfg.scale)
    p, T = x.shape
    crit = critical_value(cfg.alpha)
    report = UStatReport(config=cfg, p=p, T=T,
                         standardizer="exact" if null_cov is not None else "estimated")
    feasible = []
    for a in cfg.orders:
        if tuple_count(T, cfg.q, a) == 0:
            report.orders[a] = OrderResult(a, error=str(InsufficientSampleError(
                f"order a={a} with q={cfg.q} needs T >= {a * cfg.q + a}, got T={T}")))
        else:
            feasible.append(a)
    raw = order_statistics(x, cfg.q, feasible, threads=threads) if feasible else {}
    for a in feasible:
        u, sig = raw[a]
        res = OrderResult(a, u_raw=u, sigma_hat=sig)
        try:
            if null_cov is not None:
                used = sigma_exact(null_cov, T, cfg.q, a)
            elif sig > 0.0:
                used = sig
            else:
                raise DegenerateVarianceError(f"variance estimate for order {a} is {sig!r}")
            res.sigma_used = used
            res.z = u / used
            res.p_value = normal_upper_tail(res.z)
            res.reject = bool(res.z > crit)
        except HDWhiteError as exc:
            res.error = str(exc)
        report.orders[a] = res
    zs = [r.z for r in report.orders.values() if r.ok]
    if zs:
        report.adaptive_z = sum(zs) / math.sqrt(len(zs))
        report.adaptive_p = normal_upper_tail(report.adaptive_z)
        report.adaptive_reject = bool(report.adaptive_z > crit)
    return report
