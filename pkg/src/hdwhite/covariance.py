"""Lag-0 covariance structures used for simulation and for the exact null variance."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from hdwhite.exceptions import InvalidDimensionError, NotPSDError

__all__ = [
    "CovarianceModel",
    "SpectralDiagnostics",
    "identity_cov",
    "factor_cov",
    "psd_sqrt",
    "assumption_diagnostics",
]

PSD_TOL = 1e-10


@dataclass(frozen=True)
class CovarianceModel:
    """A covariance matrix together with its symmetric square root.

    ``is_identity`` lets generators skip the mixing product.
    """

    sigma0: np.ndarray
    sqrt_sigma0: np.ndarray
    is_identity: bool = field(default=False, compare=False)

    def __post_init__(self):
        for arr in (self.sigma0, self.sqrt_sigma0):
            arr.setflags(write=False)

    @property
    def p(self) -> int:
        return self.sigma0.shape[0]

    @classmethod
    def from_matrix(cls, sigma0) -> CovarianceModel:
        m = np.array(sigma0, dtype=float, ndmin=2)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise InvalidDimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
        if not np.array_equal(m, m.T):
            raise NotPSDError("covariance matrix is not symmetric")
        return cls(m, psd_sqrt(m))


@dataclass(frozen=True)
class SpectralDiagnostics:
    spectral_norm_abs: float
    max_row_abs_sum_ratio: float
    max_abs_entry: float
    constant_order_entry_count: int


def _check_dim(p) -> int:
    if int(p) != p or p < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {p!r}")
    return int(p)


def identity_cov(p: int) -> CovarianceModel:
    p = _check_dim(p)
    return CovarianceModel(np.eye(p), np.eye(p), is_identity=True)


def factor_cov(p: int, rng: np.random.Generator | None = None, loadings=None) -> CovarianceModel:
    """Random factor covariance ``(4/p) A A^T`` with ``A_ij ~ U(-1, 1)``.

    Pass ``loadings`` to use a fixed ``A`` instead of drawing one.
    """
    p = _check_dim(p)
    if loadings is None:
        if rng is None:
            rng = np.random.default_rng()
        a0 = rng.uniform(-1.0, 1.0, size=(p, p))
    else:
        a0 = np.asarray(loadings, dtype=float)
        if a0.shape != (p, p):
            raise InvalidDimensionError(f"loadings must be {p}x{p}, got {a0.shape}")
    sigma0 = (4.0 / p) * (a0 @ a0.T)
    # exact symmetry; the product is symmetric only up to rounding
    sigma0 = np.triu(sigma0) + np.triu(sigma0, 1).T
    return CovarianceModel(sigma0, psd_sqrt(sigma0))


def psd_sqrt(m) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition.

    Eigenvalues in ``[-1e-10, 0)`` are clamped to zero; anything more negative
    raises :class:`NotPSDError`.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidDimensionError(f"expected a square matrix, got shape {m.shape}")
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(m).max(initial=0.0))):
        raise NotPSDError("matrix is not symmetric")
    evals, evecs = np.linalg.eigh(m)
    if evals.size and evals[0] < -PSD_TOL:
        raise NotPSDError(f"smallest eigenvalue {evals[0]:.3e} is below -{PSD_TOL:g}")
    root = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.T
    return (root + root.T) / 2.0


def assumption_diagnostics(cov: CovarianceModel, threshold: float = 0.5) -> SpectralDiagnostics:
    """Report the spectral regularity quantities of a covariance matrix.

    Advisory only; nothing downstream refuses to run on bad values.
    """
    abs_sigma = np.abs(cov.sigma0)
    p = cov.p
    return SpectralDiagnostics(
        spectral_norm_abs=float(np.linalg.norm(abs_sigma, 2)),
        max_row_abs_sum_ratio=float(abs_sigma.sum(axis=1).max() / np.sqrt(p)),
        max_abs_entry=float(abs_sigma.max()),
        constant_order_entry_count=int(np.count_nonzero(abs_sigma >= threshold)),
    )
