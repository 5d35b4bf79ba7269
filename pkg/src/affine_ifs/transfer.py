"""Transfer operator on truncated Fourier coefficient vectors and the
fixed-point density iteration built on it.

One application maps ``c_k`` to

    c'_k = sigma_hat((1 - delta) pi k) * sum_{|j| <= M} sinc(pi (j - k delta)) c_j

(sinc(x) = sin(x)/x), followed by a renormalization that pins ``c'_0 = 1``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np

from .density import DensityGrid, norms, reconstruct
from .measures import DomainError, MeasureSpec, fourier_eval

METRICS = ("coeff_sum", "l1", "linf", "bv")


@dataclass
class CoefficientVector:
    """Fourier coefficients ``c_k = mu_hat(pi k)`` for ``k = -M..M``."""

    c: np.ndarray

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=complex)
        if self.c.ndim != 1 or self.c.size % 2 == 0:
            raise DomainError("coefficient vector must have odd length 2M+1")

    @property
    def M(self) -> int:
        return (self.c.size - 1) // 2

    @property
    def k(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    def __getitem__(self, k: int) -> complex:
        if abs(k) > self.M:
            raise IndexError(k)
        return self.c[k + self.M]

    @property
    def nonnegative(self) -> np.ndarray:
        """``c_0, c_1, ..., c_M``."""
        return self.c[self.M:]

    @classmethod
    def uniform(cls, M: int) -> "CoefficientVector":
        c = np.zeros(2 * M + 1, dtype=complex)
        c[M] = 1.0
        return cls(c)

    @classmethod
    def from_measure(cls, spec: MeasureSpec, M: int, eps_stop: float = 1e-13) -> "CoefficientVector":
        k = np.arange(0, M + 1)
        half = fourier_eval(spec, np.pi * k, eps_stop)
        return cls.from_nonnegative(half)

    @classmethod
    def from_nonnegative(cls, half) -> "CoefficientVector":
        """Build a Hermitian vector from ``c_0..c_M``."""
        half = np.asarray(half, dtype=complex)
        return cls(np.concatenate([np.conj(half[:0:-1]), half]))

    def density(self, n_grid: int | None = None) -> DensityGrid:
        return reconstruct(self, n_grid)


class Verdict(str, enum.Enum):
    CONVERGED = "Converged"
    BV_DIVERGING = "BVDiverging"
    MAX_ITERATIONS = "MaxIterations"


@dataclass
class StepRecord:
    n: int
    d1: float
    d2: float
    d3: float
    d4: float
    bv_norm: float
    l1_norm: float

    def distance(self, metric: str) -> float:
        return {"coeff_sum": self.d1, "l1": self.d2, "linf": self.d3, "bv": self.d4}[metric]


@dataclass
class IterationReport:
    records: list = field(default_factory=list)
    verdict: Verdict = Verdict.MAX_ITERATIONS
    n_final: int = 0
    bv_initial: float = 0.0

    def series(self, name: str) -> np.ndarray:
        """Column of the per-step table, e.g. ``"d2"`` or ``"bv_norm"``."""
        return np.array([getattr(r, name) for r in self.records])

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "n_final": self.n_final,
            "records": [vars(r) for r in self.records],
        }


@lru_cache(maxsize=32)
def _transfer_matrix(sigma: MeasureSpec, delta: float, M: int, eps_stop: float) -> np.ndarray:
    # rows k = 0..M only; negative k follow from Hermitian symmetry
    k = np.arange(0, M + 1)
    j = np.arange(-M, M + 1)
    sig = fourier_eval(sigma, (1.0 - delta) * np.pi * k, eps_stop)
    return sig[:, None] * np.sinc(j[None, :] - delta * k[:, None])


def transfer_matrix(sigma: MeasureSpec, delta: float, M: int, eps_stop: float = 1e-13) -> np.ndarray:
    """Rows ``k = 0..M`` of the truncated operator (shape ``(M+1, 2M+1)``)."""
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must satisfy 0 < delta < 1")
    return _transfer_matrix(sigma, float(delta), int(M), float(eps_stop))


def apply_transfer(coeffs: CoefficientVector, sigma: MeasureSpec, delta: float,
                   renormalize: bool = True) -> CoefficientVector:
    """One transfer-operator step on a truncated coefficient vector."""
    A = transfer_matrix(sigma, delta, coeffs.M)
    half = A @ coeffs.c
    if renormalize:
        half = half / half[0]
    return CoefficientVector.from_nonnegative(half)


def distance(a, b, metric: str = "coeff_sum", n_grid: int | None = None) -> float:
    """Distance between two coefficient vectors or two density grids.

    ``coeff_sum`` is ``sum_{j=0..M} |a_j - b_j|`` and needs coefficient
    vectors; ``l1``, ``linf`` and ``bv`` are norms of the density difference.
    """
    if metric not in METRICS:
        raise DomainError(f"unknown metric {metric!r}")
    if isinstance(a, CoefficientVector) != isinstance(b, CoefficientVector):
        raise DomainError("cannot compare a coefficient vector with a grid")
    if isinstance(a, CoefficientVector):
        if a.M != b.M:
            raise DomainError("truncation orders differ")
        if metric == "coeff_sum":
            return float(np.sum(np.abs(a.nonnegative - b.nonnegative)))
        diff = reconstruct(CoefficientVector(a.c - b.c), n_grid)
    else:
        if metric == "coeff_sum":
            raise DomainError("coeff_sum needs coefficient vectors")
        diff = a - b
    return norms(diff)[{"l1": "l1", "linf": "linf", "bv": "bv"}[metric]]


def bv_diverging(bv: list, bv_ref: float, factor: float = 10.0) -> bool:
    """Growth test: ``BV_n > factor * BV_1`` and strictly rising over three steps."""
    if len(bv) < 3:
        return False
    return bv[-1] > factor * bv_ref and bv[-1] > bv[-2] > bv[-3]


def run_iteration(steps: Iterable[CoefficientVector], initial: CoefficientVector,
                  eps_stop: float = 1e-8, monitor_metric: str = "coeff_sum",
                  n_grid: int | None = None, keep: Callable[[int], bool] | None = None,
                  check_divergence: bool = True):
    """Drive any sequence of iterates through the common convergence bookkeeping.

    ``steps`` yields ``mu_1, mu_2, ...``; the loop stops at the first
    verdict or when the iterable is exhausted. ``keep(n)`` selects iterates
    to return in the history dict.
    """
    if monitor_metric not in METRICS:
        raise DomainError(f"unknown metric {monitor_metric!r}")
    report = IterationReport()
    prev = initial
    prev_grid = reconstruct(prev, n_grid)
    report.bv_initial = norms(prev_grid)["bv"]
    history = {0: initial} if keep is not None and keep(0) else {}
    bvs = []
    current = initial
    for n, current in enumerate(steps, start=1):
        grid = reconstruct(current, n_grid)
        diff = norms(grid - prev_grid)
        own = norms(grid)
        rec = StepRecord(
            n=n,
            d1=float(np.sum(np.abs(current.nonnegative - prev.nonnegative))),
            d2=diff["l1"], d3=diff["linf"], d4=diff["bv"],
            bv_norm=own["bv"], l1_norm=own["l1"],
        )
        report.records.append(rec)
        bvs.append(rec.bv_norm)
        if keep is not None and keep(n):
            history[n] = current
        report.n_final = n
        if check_divergence and bv_diverging(bvs, max(bvs[0], 1e-300)):
            report.verdict = Verdict.BV_DIVERGING
            break
        if rec.distance(monitor_metric) < eps_stop:
            report.verdict = Verdict.CONVERGED
            break
        prev, prev_grid = current, grid
    return current, report, history


def iterate_to_fixed_point(initial: CoefficientVector, sigma: MeasureSpec, delta: float,
                           eps_stop: float = 1e-8, max_iter: int = 200,
                           monitor_metric: str = "coeff_sum", n_grid: int | None = None,
                           keep: Callable[[int], bool] | None = None,
                           check_divergence: bool = True):
    """Iterate the truncated transfer operator until a verdict is reached.

    Returns
    -------
    (CoefficientVector, IterationReport)
        The last iterate and the per-step distance table. When ``keep`` is
        given a third element, ``{n: CoefficientVector}``, is returned too.
    """
    if eps_stop <= 0:
        raise DomainError("eps_stop must be positive")
    if max_iter < 1:
        raise DomainError("max_iter must be >= 1")
    A = transfer_matrix(sigma, delta, initial.M)

    def steps():
        c = initial
        for _ in range(max_iter):
            half = A @ c.c
            c = CoefficientVector.from_nonnegative(half / half[0])
            yield c

    final, report, history = run_iteration(steps(), initial, eps_stop, monitor_metric,
                                           n_grid, keep, check_divergence)
    if keep is not None:
        return final, report, history
    return final, report
