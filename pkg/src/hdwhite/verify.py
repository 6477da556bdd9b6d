"""Self-checks of the dynamic program against enumeration and the tuple-count identity."""

from __future__ import annotations

import math

import numpy as np

from hdwhite.tuples import brute_tuple_product_sum, dp_tuple_product_sum, tuple_count


def check_dp_against_oracle(ncases: int = 1000, seed: int = 0, rtol: float = 1e-10) -> list[str]:
    """Random Gaussian series with ``T <= 16``, ``q in {1, 2}``, ``a in {2, 4}``."""
    rng = np.random.default_rng(seed)
    failures = []
    for _ in range(ncases):
        T = int(rng.integers(1, 17))
        q = int(rng.choice([1, 2]))
        a = int(rng.choice([2, 4]))
        s = rng.standard_normal(T)
        dp = dp_tuple_product_sum(s, q, a)
        brute = brute_tuple_product_sum(s, q, a)
        if abs(dp - brute) > rtol * (1.0 + abs(brute)):
            failures.append(f"dp={dp!r} brute={brute!r} for T={T}, q={q}, a={a}")
    return failures


def check_count_identity(T_max: int = 60, q_max: int = 3, orders=(2, 4, 6)) -> list[str]:
    """The all-ones series must reproduce ``C(T - aq, a)`` exactly, zero when infeasible."""
    failures = []
    for q in range(1, q_max + 1):
        for a in orders:
            for T in range(1, T_max + 1):
                expected = math.comb(T - a * q, a) if T >= a * q + a else 0
                if tuple_count(T, q, a) != expected:
                    failures.append(f"tuple_count({T}, {q}, {a}) != {expected}")
                got = dp_tuple_product_sum(np.ones(T), q, a)
                if got != expected:
                    failures.append(f"dp on ones gave {got!r}, expected {expected} (T={T}, q={q}, a={a})")
    return failures


def run_verification(seed: int = 0) -> dict[str, list[str]]:
    return {
        "dp_vs_enumeration": check_dp_against_oracle(seed=seed),
        "count_identity": check_count_identity(),
    }
