"""Eigensolvers with residual certification and continuum-limit fits."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import ContractViolation, ResourceError, SolverError
from .operator import OperatorMatrix

log = logging.getLogger(__name__)

MAX_DENSE_DIM = 2**14
RESIDUAL_RTOL = 1e-9
DEGENERATE_ERROR = 1e-14
MIN_R_SQUARED = 0.99


def max_workers() -> int:
    """Worker cap from ``STROBO_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("STROBO_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SpectrumReport:
    """Certified spectrum.

    Attributes:
        eigenvalues: sorted by real part, then imaginary part.
        hermitian: whether the Hermitian solver path applied.
        residual_max: ``max ||A v - lambda v||`` over unit eigenvectors.
        method: ``"eigh"``, ``"eig"`` or ``"circulant"``.
        labels: mode labels ``m`` aligned with ``eigenvalues`` (circulant path only).
    """

    eigenvalues: np.ndarray
    hermitian: bool
    residual_max: float
    method: str
    labels: np.ndarray | None = field(default=None, repr=False)

    def by_label(self, m: int) -> complex:
        if self.labels is None:
            raise ContractViolation("this spectrum carries no mode labels")
        return complex(self.eigenvalues[np.flatnonzero(self.labels == m)[0]])


def _sort_key(ev: np.ndarray) -> np.ndarray:
    ev = np.asarray(ev, dtype=complex)
    return np.lexsort((np.round(ev.imag, 12), np.round(ev.real, 12)))


def circulant_eig(first_row, twist: float = 0.0) -> np.ndarray:
    """Eigenvalues of the twisted circulant ``sum_j r_j T^j`` for ``m = 1..N``.

    ``T`` is the shift with wrap phase ``exp(2 pi i twist)``; its plane-wave
    eigenvectors turn the spectrum into the symbol
    ``sum_j r_j exp(2 pi i (m + twist) j / N)``.
    """
    r = np.asarray(first_row, dtype=complex)
    N = r.size
    j = np.arange(N)
    v = r * np.exp(2j * np.pi * twist * j / N)
    lam = N * np.fft.ifft(v)
    return lam[np.arange(1, N + 1) % N]


def twisted_circulant(first_row, twist: float) -> sp.csr_matrix:
    """Sparse twisted circulant matrix built from its first row."""
    r = np.asarray(first_row, dtype=complex)
    N = r.size
    rows, cols, vals = [], [], []
    wrap = np.exp(2j * np.pi * twist)
    i = np.arange(N)
    for jj in np.flatnonzero(r):
        c = i + jj
        rows.append(i)
        cols.append(c % N)
        vals.append(np.where(c >= N, r[jj] * wrap, r[jj]))
    if not rows:
        return sp.csr_matrix((N, N), dtype=complex)
    return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N))


def _twist_of(A: OperatorMatrix) -> float | None:
    if A.basis.kind != "angular-grid":
        return None
    twist = A.basis.param("delta")
    if twist is None:
        return None
    first = A.entries[0].toarray().ravel() if A.is_sparse else np.asarray(A.entries[0])
    diff = twisted_circulant(first, twist) - sp.csr_matrix(A.entries)
    scale = max(1.0, A.max_norm())
    if diff.nnz and np.abs(diff.data).max() > 1e-12 * scale:
        return None
    return float(twist)


def _residuals(A: OperatorMatrix, lam: np.ndarray, V: np.ndarray, chunk: int = 512) -> float:
    worst = 0.0
    for s in range(0, V.shape[1], chunk):
        Vc = V[:, s:s + chunk]
        R = A.entries @ Vc - Vc * lam[s:s + chunk]
        worst = max(worst, float(np.linalg.norm(R, axis=0).max()))
    return worst


def _circulant_path(A: OperatorMatrix, twist: float) -> SpectrumReport:
    N = A.dim
    first = A.entries[0].toarray().ravel() if A.is_sparse else np.asarray(A.entries[0])
    lam = circulant_eig(first, twist)
    m = np.arange(1, N + 1)
    sites = np.arange(1, N + 1)
    V = np.exp(2j * np.pi * np.outer(sites, m + twist) / N) / math.sqrt(N)
    res = _residuals(A, lam, V)
    order = _sort_key(lam)
    return SpectrumReport(lam[order], A.hermitian, res, "circulant", m[order])


def eig(A: OperatorMatrix, method: str = "auto") -> SpectrumReport:
    """Full spectrum of ``A`` with eigenvector residual certification.

    Args:
        A: operator, at most ``2**14`` in dimension.
        method: ``"auto"`` (circulant fast path for twisted circulants on an
            angular grid, else dense), ``"dense"`` or ``"circulant"``.

    Raises:
        SolverError: if LAPACK fails or the residuals exceed ``1e-9 * max|A|``.
    """
    if A.dim > MAX_DENSE_DIM:
        raise ResourceError(f"dimension {A.dim} exceeds dense cap {MAX_DENSE_DIM}")
    if method not in ("auto", "dense", "circulant"):
        raise ContractViolation(f"unknown method {method!r}")
    twist = _twist_of(A) if method != "dense" else None
    if method == "circulant" and twist is None:
        raise ContractViolation("operator is not a twisted circulant on an angular grid")
    try:
        if twist is not None:
            report = _circulant_path(A, twist)
        else:
            dense = A.toarray()
            if A.hermitian:
                lam, V = scipy.linalg.eigh(dense)
                lam = lam.astype(complex)
                name = "eigh"
            else:
                lam, V = scipy.linalg.eig(dense)
                V = V / np.linalg.norm(V, axis=0)
                name = "eig"
            res = _residuals(A, lam, V)
            order = _sort_key(lam)
            report = SpectrumReport(lam[order], A.hermitian, res, name)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise SolverError(f"eigensolver failed on dim {A.dim} ({A.basis.kind}): {exc}") from exc
    bound = RESIDUAL_RTOL * max(A.max_norm(), 1e-300)
    if report.residual_max > bound:
        raise SolverError(
            f"{report.method} residual {report.residual_max:.3e} exceeds {bound:.3e} on dim {A.dim}"
        )
    return report


@dataclass(frozen=True)
class ConvergenceReport:
    """Errors versus resolution and the fitted log-log slope.

    ``fitted_order`` and ``r_squared`` come from ordinary least squares over
    the largest decade of ``Ns``; ``accepted`` is False (with ``reason``) for
    degenerate, non-monotone or poorly fitting data.
    """

    Ns: np.ndarray
    errors: np.ndarray
    fitted_order: float
    r_squared: float
    accepted: bool
    reason: str = ""

    def as_dict(self) -> dict:
        return {
            "Ns": [int(n) for n in self.Ns],
            "errors": [float(e) for e in self.errors],
            "fitted_order": float(self.fitted_order),
            "r_squared": float(self.r_squared),
            "accepted": bool(self.accepted),
            "reason": self.reason,
        }


def fit_order(Ns, errors) -> tuple[float, float]:
    """OLS slope of ``log(error)`` against ``log(N)`` and its ``R^2``."""
    x = np.log(np.asarray(Ns, dtype=float))
    y = np.log(np.asarray(errors, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float(((y - pred) ** 2).sum()) / ss_tot if ss_tot > 0 else 0.0
    return float(slope), r2


def tracked_errors(report: SpectrumReport, targets: np.ndarray, modes: Sequence[int] | None) -> float:
    """Largest deviation of the tracked modes from their targets.

    With mode labels (circulant path) each target is compared with the
    eigenvalue of the same ``m``; otherwise with the nearest eigenvalue.
    """
    targets = np.asarray(targets, dtype=complex)
    if report.labels is not None and modes is not None:
        got = np.array([report.by_label(m) for m in modes])
        return float(np.abs(got - targets).max())
    return float(max(np.abs(report.eigenvalues - t).min() for t in targets))


def convergence_study(builder: Callable[[int], OperatorMatrix],
                      reference: Callable[[int], Sequence[complex]],
                      Ns: Sequence[int],
                      modes: Sequence[int] | None = tuple(range(1, 9)),
                      workers: int | None = None) -> ConvergenceReport:
    """Spectral error of ``builder(N)`` against ``reference(N)`` over ``Ns``.

    Args:
        builder: ``N -> OperatorMatrix``.
        reference: ``N -> target values``, one per entry of ``modes``.
        Ns: strictly increasing resolutions, at least two.
        modes: mode labels matched to the targets; ``None`` matches by nearest eigenvalue.
        workers: parallel solves, default from ``STROBO_THREADS``.
    """
    Ns = np.asarray(Ns, dtype=int)
    if Ns.size < 2 or np.any(np.diff(Ns) <= 0):
        raise ContractViolation("Ns needs at least two strictly increasing entries")

    def one(N):
        return tracked_errors(eig(builder(int(N))), np.asarray(reference(int(N))), modes)

    with ThreadPoolExecutor(workers or max_workers()) as pool:
        errors = np.array(list(pool.map(one, Ns)))

    if np.all(errors <= DEGENERATE_ERROR):
        return ConvergenceReport(Ns, errors, math.nan, math.nan, False, "degenerate: errors at rounding level")
    if np.any(errors <= 0):
        return ConvergenceReport(Ns, errors, math.nan, math.nan, False, "non-positive errors")
    sel = Ns >= Ns.max() / 10
    if sel.sum() < 2:
        sel[-2:] = True
    slope, r2 = fit_order(Ns[sel], errors[sel])
    if np.any(np.diff(errors) >= 0):
        log.info("non-monotone errors %s", errors)
        return ConvergenceReport(Ns, errors, slope, r2, False, "non-monotone errors")
    if r2 < MIN_R_SQUARED:
        return ConvergenceReport(Ns, errors, slope, r2, False, f"poor fit (R^2={r2:.4f})")
    return ConvergenceReport(Ns, errors, slope, r2, True)
