"""Gap-constrained time tuples and the prefix-sum dynamic program over them.

A tuple ``(t_1, ..., t_a)`` is admissible for horizon ``T`` and gap cap ``q``
when ``q + 1 <= t_1``, ``t_a <= T`` and every consecutive gap exceeds ``q``.
Times are 1-based throughout the public interface.

For a length-``T`` series ``s`` the quantity of interest is

    sum over admissible tuples of s[t_1] * ... * s[t_a],

which the dynamic program evaluates in ``O(aT)`` time: with
``prefix_k(t) = sum_{r <= t} dp_k(r)`` the recursion is
``dp_k(t) = s[t] * prefix_{k-1}(t - q - 1)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from hdwhite.exceptions import ConfigError, OracleTooLargeError

__all__ = [
    "TupleSpec",
    "tuple_count",
    "enumerate_tuples",
    "dp_tuple_product_sum",
    "dp_levels",
    "brute_tuple_product_sum",
    "ORACLE_LIMIT",
]

ORACLE_LIMIT = 10**6
CONDITIONING_LIMIT = 1e6


@dataclass(frozen=True)
class TupleSpec:
    T: int
    q: int
    a: int

    def __post_init__(self):
        if self.T < 1 or self.q < 1:
            raise ConfigError(f"need T >= 1 and q >= 1, got T={self.T}, q={self.q}")
        if self.a < 2 or self.a % 2:
            raise ConfigError(f"tuple length must be a positive even integer, got {self.a}")

    @property
    def min_T(self) -> int:
        return self.a * self.q + self.a


def tuple_count(T: int, q: int, a: int) -> int:
    """Number of admissible tuples: ``C(T - aq, a)`` if ``T >= aq + a``, else 0."""
    spec = TupleSpec(T, q, a)
    if T < spec.min_T:
        return 0
    return math.comb(T - a * q, a)


def enumerate_tuples(T: int, q: int, a: int, limit: int = ORACLE_LIMIT) -> list[tuple[int, ...]]:
    """List every admissible tuple in lexicographic order (oracle use only)."""
    n = tuple_count(T, q, a)
    if n > limit:
        raise OracleTooLargeError(f"{n} tuples exceed the enumeration limit {limit}")
    out: list[tuple[int, ...]] = []

    def extend(prefix: list[int], start: int):
        if len(prefix) == a:
            out.append(tuple(prefix))
            return
        # leave room for the remaining picks, each at least q + 1 apart
        last = T - (a - len(prefix) - 1) * (q + 1)
        for t in range(start, last + 1):
            prefix.append(t)
            extend(prefix, t + q + 1)
            prefix.pop()

    extend([], q + 1)
    return out


def brute_tuple_product_sum(s, q: int, a: int, limit: int = ORACLE_LIMIT) -> float:
    """Direct sum of tuple products over :func:`enumerate_tuples` (1-based ``s``)."""
    s = np.asarray(s, dtype=float)
    total = 0.0
    for tup in enumerate_tuples(len(s), q, a, limit=limit):
        prod = 1.0
        for t in tup:
            prod *= s[t - 1]
        total += prod
    return total


def dp_levels(s, q: int, a_max: int) -> np.ndarray:
    """Tuple product sums for every length ``1..a_max`` at once.

    ``s`` is ``(T,)`` or ``(n_channels, T)``; each row is an independent channel.
    Returns shape ``(..., a_max)`` where entry ``k-1`` is the sum over admissible
    ``k``-tuples. Only the previous level's prefix vector is kept alive.
    """
    s = np.asarray(s, dtype=float)
    if a_max < 1 or q < 1:
        raise ConfigError(f"need a_max >= 1 and q >= 1, got a_max={a_max}, q={q}")
    T = s.shape[-1]
    out = np.zeros(s.shape[:-1] + (a_max,))
    if T <= q:
        return out
    shift = q + 1
    dp = s.copy()
    dp[..., :q] = 0.0
    prefix = np.cumsum(dp, axis=-1)
    out[..., 0] = prefix[..., -1]
    for k in range(1, a_max):
        if T <= shift:
            break
        # dp_k(t) = s(t) * prefix_{k-1}(t - q - 1); unreachable early entries stay 0
        np.multiply(s[..., shift:], prefix[..., : T - shift], out=dp[..., shift:])
        dp[..., :shift] = 0.0
        np.cumsum(dp, axis=-1, out=prefix)
        out[..., k] = prefix[..., -1]
    return out


def dp_tuple_product_sum(s, q: int, a: int, T: int | None = None) -> float:
    """Sum of ``prod_k s[t_k]`` over admissible ``a``-tuples in ``O(aT)``."""
    s = np.asarray(s, dtype=float)
    if s.ndim != 1:
        raise ValueError(f"expected a 1-d series, got shape {s.shape}")
    if T is not None and len(s) != T:
        raise ValueError(f"series length {len(s)} does not match T={T}")
    TupleSpec(max(len(s), 1), q, a)
    if len(s) == 0:
        raise ValueError("empty series")
    if np.abs(s).max() > CONDITIONING_LIMIT:
        warnings.warn("series entries exceed 1e6 in magnitude; tuple products may lose accuracy",
                      RuntimeWarning, stacklevel=2)
    return float(dp_levels(s, q, a)[a - 1])
