"""End-to-end acceptance checks.

Each test prints one ``PASS``/``FAIL`` line with the measured numbers before
asserting, so ``pytest -v -s`` (or the summary in ``test_output.txt``) shows
how close every criterion came. The Monte Carlo criteria are marked ``slow``;
together they take several minutes on a single core.
"""

import json
import math
import time

import numpy as np
import pytest
from scipy import stats

from hdwhite.cli import main
from hdwhite.covariance import identity_cov
from hdwhite.montecarlo import ExperimentSpec, derive_rep_rng, run_power_study, run_size_study
from hdwhite.simulate import coeff_matrix, gen_null, gen_vma1
from hdwhite.tuples import brute_tuple_product_sum, dp_tuple_product_sum, tuple_count
from hdwhite.ustat import TestConfig, run_test, sigma_exact, sigma_hat, u_statistic
from oracles import naive_sigma_hat, naive_u

ORDERS = (2, 4, 6)


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {detail}")
        return ok

    return emit


def rel_err(got: float, want: float) -> float:
    return abs(got - want) / max(abs(want), 1e-300)


def test_01_dp_matches_brute_force(report):
    rng = np.random.default_rng(101)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        q = int(rng.integers(1, 3))
        a = int(rng.choice([2, 4]))
        T = int(rng.integers(1, 17))
        s = rng.standard_normal(T)
        want = brute_tuple_product_sum(s, q, a)
        got = dp_tuple_product_sum(s, q, a)
        worst = max(worst, rel_err(got, want))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 5.0
    assert report(1, ok, f"max rel err {worst:.2e} (<= 1e-10), {elapsed:.2f} s (< 5 s)")


def test_02_count_identity(report):
    start = time.perf_counter()
    mismatches = []
    boundary = infeasible = 0
    for T in range(1, 61):
        for q in range(1, 4):
            for a in ORDERS:
                want = math.comb(T - a * q, a) if T >= a * q + a else 0
                got = dp_tuple_product_sum(np.ones(T), q, a)
                if got != want or tuple_count(T, q, a) != want:
                    mismatches.append((T, q, a, got, want))
                boundary += want == 1
                infeasible += want == 0
    elapsed = time.perf_counter() - start
    ok = not mismatches and boundary > 0 and infeasible > 0 and elapsed < 1.0
    assert report(2, ok, f"{len(mismatches)} mismatches, {boundary} cells with N=1, "
                         f"{infeasible} with N=0, {elapsed:.2f} s (< 1 s)")


def test_03_statistics_match_enumeration(report):
    rng = np.random.default_rng(103)
    start = time.perf_counter()
    worst = 0.0
    checked = 0
    while checked < 1000:
        p = int(rng.integers(1, 4))
        T = int(rng.integers(4, 13))
        q = int(rng.integers(1, 3))
        a = int(rng.choice([2, 4]))
        if tuple_count(T, q, a) == 0:
            continue
        x = rng.standard_normal((p, T))
        worst = max(worst, rel_err(u_statistic(x, q, a), naive_u(x, q, a)),
                    rel_err(sigma_hat(x, q, a), naive_sigma_hat(x, q, a)))
        checked += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 30.0
    assert report(3, ok, f"max rel err {worst:.2e} (<= 1e-10), {elapsed:.2f} s (< 30 s)")


@pytest.fixture(scope="module")
def gaussian_null_cell():
    spec = ExperimentSpec(study="size", model="null", cov_kind="identity", innov="gaussian",
                          ratios=[0.5], Ts=[100], nreps=2000)
    return run_size_study(spec).cells[0]


@pytest.mark.slow
def test_04_gaussian_size(report, gaussian_null_cell):
    sizes = {a: gaussian_null_cell.rate_pct(f"U({a})") for a in ORDERS}
    ok = all(3.5 <= v <= 6.9 for v in sizes.values())
    detail = ", ".join(f"U({a}) {v:.2f}%" for a, v in sizes.items())
    assert report(4, ok, f"{detail} (each in [3.5, 6.9]); "
                         f"U(adp) {gaussian_null_cell.rate_pct('U(adp)'):.2f}%")


@pytest.mark.slow
def test_05_gamma_factor_size(report):
    spec = ExperimentSpec(study="size", model="null", cov_kind="factor", innov="shifted_gamma",
                          ratios=[1.0], Ts=[100], nreps=2000)
    cell = run_size_study(spec).cells[0]
    sizes = {a: cell.rate_pct(f"U({a})") for a in ORDERS}
    ok = all(3.5 <= v <= 7.4 for v in sizes.values())
    detail = ", ".join(f"U({a}) {v:.2f}%" for a, v in sizes.items())
    assert report(5, ok, f"{detail} (each in [3.5, 7.4])")


@pytest.mark.slow
def test_06_null_normality(report, gaussian_null_cell):
    z = gaussian_null_cell.z
    ks = {a: stats.kstest(z[f"U({a})"], "norm").statistic for a in ORDERS}
    corr = np.corrcoef(z["U(2)"], z["U(4)"])[0, 1]
    ok = all(d <= 0.05 for d in ks.values()) and abs(corr) <= 0.1
    detail = ", ".join(f"KS({a}) {d:.4f}" for a, d in ks.items())
    assert report(6, ok, f"{detail} (<= 0.05); corr(z2, z4) {corr:+.4f} (|.| <= 0.1)")


@pytest.mark.slow
def test_07_variance_estimator_consistency(report):
    p, T = 100, 200
    cov = identity_cov(p)
    exact = sigma_exact(cov, T, 1, 2)
    ratios = [sigma_hat(gen_null(cov, "gaussian", T, derive_rep_rng(7, 0, r)), 1, 2) / exact
              for r in range(200)]
    mean = float(np.mean(ratios))
    assert report(7, 0.95 <= mean <= 1.05, f"mean sigma_hat/sigma {mean:.4f} (in [0.95, 1.05])")


@pytest.mark.slow
def test_08_dense_var_power(report):
    spec = ExperimentSpec(study="power", model="var1", coeff_kind="dense", ratios=[0.5],
                          Ts=[100], nreps=500)
    cell = run_power_study(spec).cells[0]
    u2, adp, sq = (cell.rate_pct(n) for n in ("U(2)", "U(adp)", "S_q"))
    ok = abs(u2 - 82.45) <= 5 and abs(adp - 86.30) <= 5 and sq >= 99
    assert report(8, ok, f"U(2) {u2:.2f}% (82.45 +/- 5), U(adp) {adp:.2f}% (86.30 +/- 5), "
                         f"S_q {sq:.2f}% (>= 99)")


@pytest.mark.slow
def test_09_sparse_order_ranking(report):
    mid = run_power_study(ExperimentSpec(study="power", model="var1", coeff_kind="sparse",
                                         ratios=[0.5], Ts=[200], nreps=500)).cells[0]
    big = run_power_study(ExperimentSpec(study="power", model="var1", coeff_kind="sparse",
                                         ratios=[0.5], Ts=[400], nreps=200)).cells[0]
    gap = mid.rate_pct("U(6)") - mid.rate_pct("U(2)")
    u6_big = big.rate_pct("U(6)")
    ok = gap >= 10 and u6_big >= 85 and abs(u6_big - 94.16) <= 7
    assert report(9, ok, f"p=100,T=200: U(6)-U(2) = {mid.rate_pct('U(6)'):.2f}-"
                         f"{mid.rate_pct('U(2)'):.2f} = {gap:.2f} pp (>= 10); "
                         f"p=200,T=400: U(6) {u6_big:.2f}% (>= 85, 94.16 +/- 7)")


@pytest.mark.slow
def test_10_growth_under_moving_average(report):
    means, rejection = {}, {}
    for cell_id, T in enumerate((50, 100, 200)):
        cov = identity_cov(T)
        coeff = coeff_matrix("identity", T)
        reports = [run_test(gen_vma1(cov, coeff, "gaussian", T, derive_rep_rng(10, cell_id, r)),
                            TestConfig())
                   for r in range(100)]
        means[T] = float(np.mean([r.adaptive_z for r in reports]))
        rejection[T] = float(np.mean([r.adaptive_reject for r in reports]))
    increasing = means[50] < means[100] < means[200]
    ok = increasing and rejection[200] >= 0.99
    detail = ", ".join(f"T={T}: {m:.2f}" for T, m in means.items())
    assert report(10, ok, f"mean adaptive z {detail} (strictly increasing); "
                          f"rejection at T=200 {100 * rejection[200]:.1f}% (>= 99)")


def _best_time(s, repeats=5):
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        dp_tuple_product_sum(s, 1, 6)
        best = min(best, time.perf_counter() - start)
    return best


def test_11_linear_scaling(report):
    rng = np.random.default_rng(111)
    small, large = rng.standard_normal(1000), rng.standard_normal(8000)
    _best_time(small, 1)  # warm up
    ratio = _best_time(large) / _best_time(small)
    assert report(11, ratio <= 12, f"time(T=8000)/time(T=1000) = {ratio:.2f} (<= 12)")


def test_12_study_deterministic_across_threads(report, tmp_path):
    cfg = tmp_path / "spec.json"
    spec = ExperimentSpec(study="power", model="vma1", coeff_kind="dense", cov_kind="factor",
                          innov="shifted_gamma", ratios=[0.5, 1.0], Ts=[40], nreps=40,
                          calibration_reps=500)
    cfg.write_text(json.dumps(spec.to_dict()))
    outputs = []
    for threads in (1, 4):
        out = tmp_path / f"t{threads}"
        assert main(["study", "--config", str(cfg), "--output-dir", str(out),
                     "--threads", str(threads), "--quiet"]) == 0
        outputs.append((out / "results.csv").read_bytes())
    same = outputs[0] == outputs[1]
    assert report(12, same, f"CSV from 1 and 4 threads byte-identical: {same} "
                            f"({len(outputs[0])} bytes)")
