"""Size and power studies over ``(p/T, T)`` grids.

Every replication draws from its own stream derived from
``(master_seed, cell_id, rep, purpose)``, so a study's output does not depend on
how replications are scheduled across worker threads.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from hdwhite.baselines import baseline_stats, calibrate_many
from hdwhite.covariance import CovarianceModel, factor_cov, identity_cov
from hdwhite.exceptions import ConfigError, HDWhiteError
from hdwhite.simulate import Innovation, coeff_matrix, gen_null, gen_var1, gen_vma1
from hdwhite.ustat import critical_value, default_threads, order_statistics, sigma_exact
from hdwhite.tuples import tuple_count

__all__ = [
    "ExperimentSpec",
    "CellResult",
    "ResultTable",
    "derive_rep_rng",
    "run_size_study",
    "run_power_study",
    "run_study",
    "grid_preset",
    "STREAM_DATA",
    "STREAM_CALIBRATION",
    "STREAM_COVARIANCE",
]

STREAM_DATA = 0
STREAM_CALIBRATION = 1
STREAM_COVARIANCE = 2

BASELINE_NAMES = {"max_stat": "M_q", "sum_stat": "S_q"}


def derive_rep_rng(master_seed: int, cell_id: int, rep: int, stream: int = STREAM_DATA
                   ) -> np.random.Generator:
    """Independent generator for one ``(cell, replication, purpose)`` triple."""
    seq = np.random.SeedSequence(int(master_seed), spawn_key=(int(cell_id), int(rep), int(stream)))
    return np.random.Generator(np.random.PCG64(seq))


@dataclass
class ExperimentSpec:
    study: str = "size"
    model: str = "null"
    cov_kind: str = "identity"
    innov: str = "gaussian"
    coeff_kind: str = "none"
    coeff_value: float | None = None
    ratios: list[float] = field(default_factory=lambda: [0.5])
    Ts: list[int] = field(default_factory=lambda: [100])
    q: int = 1
    orders: list[int] = field(default_factory=lambda: [2, 4, 6])
    alpha: float = 0.05
    nreps: int = 2000
    master_seed: int = 20240601
    calibration_reps: int = 2000
    redraw_cov: bool = False
    standardizer: str = "estimated"

    def __post_init__(self):
        self.innov = Innovation.parse(self.innov).value
        self.orders = [int(a) for a in self.orders]
        self.Ts = [int(t) for t in self.Ts]
        self.ratios = [float(r) for r in self.ratios]
        if self.study not in ("size", "power"):
            raise ConfigError(f"study must be 'size' or 'power', got {self.study!r}")
        if self.model not in ("null", "var1", "vma1"):
            raise ConfigError(f"unknown model {self.model!r}")
        if self.cov_kind not in ("identity", "factor"):
            raise ConfigError(f"unknown covariance kind {self.cov_kind!r}")
        if self.model == "null":
            if self.coeff_kind != "none":
                raise ConfigError("a coefficient design makes no sense for the null model")
        elif self.coeff_kind not in ("dense", "sparse", "identity"):
            raise ConfigError(f"model {self.model} needs coeff_kind dense, sparse or identity")
        if self.study == "size" and self.model != "null":
            raise ConfigError("size studies run on the null model")
        if self.study == "power" and self.model == "null":
            raise ConfigError("power studies need model var1 or vma1")
        if self.nreps < 1:
            raise ConfigError(f"nreps must be >= 1, got {self.nreps}")
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in (0, 1], got {self.alpha}")
        if any(a < 2 or a % 2 for a in self.orders) or not self.orders:
            raise ConfigError(f"orders must be positive even integers, got {self.orders}")
        if self.standardizer not in ("estimated", "exact"):
            raise ConfigError(f"standardizer must be 'estimated' or 'exact', got {self.standardizer!r}")
        for ratio in self.ratios:
            for T in self.Ts:
                if round(ratio * T) < 1:
                    raise ConfigError(f"ratio {ratio} with T={T} gives p < 1")

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentSpec:
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown experiment fields: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> ExperimentSpec:
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return asdict(self)

    def cells(self) -> list[tuple[int, float, int, int]]:
        """``(cell_id, ratio, p, T)`` in grid order."""
        out = []
        for ratio in self.ratios:
            for T in self.Ts:
                out.append((len(out), ratio, int(round(ratio * T)), T))
        return out

    def scenario(self) -> str:
        parts = [self.model]
        if self.coeff_kind != "none":
            parts.append(self.coeff_kind)
        parts += [self.cov_kind, self.innov]
        return "/".join(parts)

    def stat_names(self) -> list[str]:
        names = [f"U({a})" for a in self.orders] + ["U(adp)"]
        if self.study == "power":
            names += list(BASELINE_NAMES.values())
        return names


@dataclass
class CellResult:
    cell_id: int
    ratio: float
    p: int
    T: int
    status: str = "ok"
    rates: dict[str, float] = field(default_factory=dict)
    critical_values: dict[str, float] = field(default_factory=dict)
    z: dict[str, np.ndarray] = field(default_factory=dict, repr=False)
    runtime: float = 0.0
    note: str = ""

    def rate_pct(self, name: str) -> float:
        return 100.0 * self.rates[name]

    def se_pct(self, name: str, nreps: int) -> float:
        r = self.rates[name]
        return 100.0 * math.sqrt(r * (1.0 - r) / nreps)


@dataclass
class ResultTable:
    spec: ExperimentSpec
    cells: list[CellResult]

    def cell(self, ratio: float | None = None, T: int | None = None, p: int | None = None
             ) -> CellResult:
        for c in self.cells:
            if ((ratio is None or math.isclose(c.ratio, ratio)) and (T is None or c.T == T)
                    and (p is None or c.p == p)):
                return c
        raise KeyError(f"no cell with ratio={ratio}, T={T}, p={p}")

    def to_csv(self) -> str:
        names = self.spec.stat_names()
        header = ["scenario", "ratio", "p", "T", "status"]
        header += [f"{n} %" for n in names] + [f"{n} se" for n in names]
        header += [f"{n} cv" for n in BASELINE_NAMES.values()] if self.spec.study == "power" else []
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for c in self.cells:
            row = [self.spec.scenario(), f"{c.ratio:g}", c.p, c.T, c.status]
            if c.status == "ok":
                row += [f"{c.rate_pct(n):.2f}" for n in names]
                row += [f"{c.se_pct(n, self.spec.nreps):.2f}" for n in names]
                if self.spec.study == "power":
                    row += [f"{c.critical_values[n]:.17g}" for n in BASELINE_NAMES.values()]
            else:
                row += [""] * (len(header) - len(row))
            writer.writerow(row)
        return buf.getvalue()

    def to_json_dict(self) -> dict:
        from hdwhite import __version__

        return {
            "software": {"package": "hdwhite", "version": __version__},
            "spec": self.spec.to_dict(),
            "scenario": self.spec.scenario(),
            "seeding": "numpy SeedSequence(master_seed, spawn_key=(cell_id, rep, stream)); "
                       "stream 0 data, 1 baseline calibration, 2 covariance draw",
            "cells": [
                {
                    "cell_id": c.cell_id,
                    "ratio": c.ratio,
                    "p": c.p,
                    "T": c.T,
                    "status": c.status,
                    "note": c.note,
                    "rates_pct": {n: 100.0 * r for n, r in c.rates.items()},
                    "se_pct": {n: c.se_pct(n, self.spec.nreps) for n in c.rates},
                    "critical_values": c.critical_values,
                    "runtime_seconds": c.runtime,
                }
                for c in self.cells
            ],
        }

    def format(self) -> str:
        """Plain-text table with one row per cell and one column per statistic."""
        names = self.spec.stat_names()
        lines = [f"{'p/T':>5} {'p':>6} {'T':>6} " + " ".join(f"{n:>8}" for n in names)]
        for c in self.cells:
            vals = (" ".join(f"{c.rate_pct(n):8.2f}" for n in names) if c.status == "ok"
                    else f"{'skipped: ' + c.note:>8}")
            lines.append(f"{c.ratio:5g} {c.p:6d} {c.T:6d} {vals}")
        return "\n".join(lines)


def _make_cov(spec: ExperimentSpec, p: int, cell_id: int, rep: int = 0) -> CovarianceModel:
    if spec.cov_kind == "identity":
        return identity_cov(p)
    return factor_cov(p, derive_rep_rng(spec.master_seed, cell_id, rep, STREAM_COVARIANCE))


def _generate(spec: ExperimentSpec, cov: CovarianceModel, T: int, rng: np.random.Generator,
              null: bool = False) -> np.ndarray:
    if null or spec.model == "null":
        return gen_null(cov, spec.innov, T, rng)
    coeff = coeff_matrix(spec.coeff_kind, cov.p, spec.coeff_value)
    if spec.model == "var1":
        return gen_var1(cov, coeff, spec.innov, T, rng)
    return gen_vma1(cov, coeff, spec.innov, T, rng)


def _replicate(spec: ExperimentSpec, cell_id: int, p: int, T: int,
               fixed_cov: CovarianceModel | None, rep: int) -> dict[str, float]:
    """Z-scores (and baseline values for power studies) of one replication."""
    cov = fixed_cov if fixed_cov is not None else _make_cov(spec, p, cell_id, rep)
    x = _generate(spec, cov, T, derive_rep_rng(spec.master_seed, cell_id, rep, STREAM_DATA))
    raw = order_statistics(x, spec.q, spec.orders, threads=1)
    out: dict[str, float] = {}
    zs = []
    for a in spec.orders:
        u, sig = raw[a]
        if spec.standardizer == "exact":
            sig = sigma_exact(cov, T, spec.q, a)
        z = u / sig if sig > 0.0 else math.nan
        out[f"U({a})"] = z
        zs.append(z)
    out["U(adp)"] = sum(zs) / math.sqrt(len(zs))
    if spec.study == "power":
        for kind, value in baseline_stats(x, spec.q).items():
            out[BASELINE_NAMES[kind]] = value
    return out


def _run_cell(spec: ExperimentSpec, cell_id: int, ratio: float, p: int, T: int,
              pool: ThreadPoolExecutor | None) -> CellResult:
    start = time.perf_counter()
    cell = CellResult(cell_id, ratio, p, T)
    if any(tuple_count(T, spec.q, a) == 0 for a in spec.orders):
        cell.status = "skipped"
        cell.note = f"T={T} < aq+a for some order"
        return cell
    fixed_cov = None if spec.redraw_cov else _make_cov(spec, p, cell_id)

    if spec.study == "power":
        def null_gen(rng, _cov=fixed_cov):
            cov = _cov if _cov is not None else _make_cov(spec, p, cell_id, 0)
            return _generate(spec, cov, T, rng, null=True)

        rngs = (derive_rep_rng(spec.master_seed, cell_id, r, STREAM_CALIBRATION)
                for r in range(spec.calibration_reps))
        cvs = calibrate_many(BASELINE_NAMES, null_gen, spec.calibration_reps, spec.alpha,
                             rngs, q=spec.q)
        cell.critical_values = {BASELINE_NAMES[k]: v for k, v in cvs.items()}

    def job(rep):
        return _replicate(spec, cell_id, p, T, fixed_cov, rep)

    reps = range(spec.nreps)
    results = list(pool.map(job, reps)) if pool is not None else [job(r) for r in reps]

    crit = critical_value(spec.alpha)
    for name in spec.stat_names():
        values = np.array([r[name] for r in results])
        cv = cell.critical_values.get(name, crit)
        # nan (degenerate variance) never rejects
        cell.rates[name] = float(np.mean(values > cv))
        cell.z[name] = values
    cell.runtime = time.perf_counter() - start
    return cell


def run_study(spec: ExperimentSpec, threads: int | None = None, progress=None) -> ResultTable:
    threads = default_threads() if threads is None else max(1, int(threads))
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    cells = []
    try:
        for cell_id, ratio, p, T in spec.cells():
            try:
                cells.append(_run_cell(spec, cell_id, ratio, p, T, pool))
            except HDWhiteError as exc:
                cells.append(CellResult(cell_id, ratio, p, T, status="skipped", note=str(exc)))
            if progress is not None:
                progress(cells[-1])
    finally:
        if pool is not None:
            pool.shutdown()
    return ResultTable(spec, cells)


def run_size_study(spec: ExperimentSpec, threads: int | None = None, progress=None) -> ResultTable:
    if spec.study != "size" or spec.model != "null":
        raise ConfigError("run_size_study needs study='size' and model='null'")
    return run_study(spec, threads=threads, progress=progress)


def run_power_study(spec: ExperimentSpec, threads: int | None = None, progress=None) -> ResultTable:
    if spec.study != "power" or spec.model not in ("var1", "vma1"):
        raise ConfigError("run_power_study needs study='power' and model var1 or vma1")
    return run_study(spec, threads=threads, progress=progress)


def grid_preset(name: str, **overrides) -> ExperimentSpec:
    """Standard ``(p/T, T)`` grids for size (``size_gaussian``, ``size_gamma``) and power
    (``power_var1``, ``power_vma1``) studies.

    The size grids take ``cov_kind``; the power grids take ``coeff_kind``.
    """
    presets = {
        "size_gaussian": dict(study="size", model="null", innov="gaussian",
                              ratios=[0.5, 1.0, 1.5], Ts=[100, 200, 400, 800]),
        "size_gamma": dict(study="size", model="null", innov="shifted_gamma",
                           ratios=[0.5, 1.0, 1.5], Ts=[100, 200, 400, 800]),
        "power_var1": dict(study="power", model="var1", coeff_kind="dense", innov="gaussian",
                           ratios=[0.5, 1.0, 1.5], Ts=[100, 200, 400]),
        "power_vma1": dict(study="power", model="vma1", coeff_kind="dense", innov="gaussian",
                           ratios=[0.5, 1.0, 1.5], Ts=[100, 200, 400]),
    }
    if name not in presets:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(presets)}")
    return ExperimentSpec(**(presets[name] | overrides))

