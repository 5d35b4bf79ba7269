"""Chaos-game estimates of invariant measures.

A single trajectory ``x_{n+1} = delta x_n + (1 - delta) beta_n`` with
i.i.d. ``beta_n ~ sigma``; its Cesaro averages converge to the invariant
measure. The recursion is a first-order linear filter, so whole chains are
produced with :func:`scipy.signal.lfilter` instead of a Python loop.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .measures import DomainError, MeasureSpec, sample
from .transfer import CoefficientVector

# below these the 1/sqrt(N) error model and the burn-in bias are not trustworthy
MIN_SAMPLES = 10_000
MIN_BURN_IN = 50


@dataclass
class EmpiricalMeasure:
    samples: np.ndarray

    @property
    def n(self) -> int:
        return self.samples.size


def _chain(sigma, delta, n_total, burn_in, rng, inner_burn_in):
    beta = sample(sigma, rng, burn_in=inner_burn_in, size=n_total)
    x, _ = lfilter([1.0 - delta], [1.0, -delta], beta, zi=[0.0])
    return x[burn_in:]


def chaos_game(sigma: MeasureSpec, delta: float, n_samples: int, burn_in: int = 100,
               seed: int = 0, n_chains: int = 1, inner_burn_in: int = 100) -> EmpiricalMeasure:
    """Sample the invariant measure of ``(sigma, delta)`` by random iteration.

    Parameters
    ----------
    sigma : MeasureSpec
        Distribution of the fixed points ``beta``.
    delta : float
        Contraction ratio.
    n_samples : int
        Recorded points (split evenly over ``n_chains`` independent chains).
    burn_in : int
        Discarded leading steps of every chain, starting from ``x0 = 0``.
    seed : int
        Seed of the ``numpy`` generator; the output is a pure function of it.
    n_chains : int
        Independent chains, each spawned from ``seed`` and burnt in separately.
    inner_burn_in : int
        Burn-in used when ``sigma`` is itself IFS-invariant.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError("delta must satisfy 0 < delta < 1")
    if n_samples < MIN_SAMPLES or burn_in < MIN_BURN_IN or n_chains < 1:
        raise DomainError(f"need n_samples >= {MIN_SAMPLES}, burn_in >= {MIN_BURN_IN}, n_chains >= 1")
    seeds = np.random.SeedSequence(seed).spawn(n_chains)
    sizes = np.full(n_chains, n_samples // n_chains)
    sizes[: n_samples % n_chains] += 1
    parts = [
        _chain(sigma, delta, int(m) + burn_in, burn_in, np.random.default_rng(s), inner_burn_in)
        for s, m in zip(seeds, sizes)
    ]
    x = np.clip(np.concatenate(parts), -1.0, 1.0)
    return EmpiricalMeasure(x)


def empirical_coefficients(emp: EmpiricalMeasure, M: int, chunk: int = 200_000):
    """Sample averages ``(1/N) sum_j exp(-i pi k x_j)`` for ``k = -M..M``.

    Returns the coefficient vector and the per-``k`` standard error
    ``1/sqrt(N)`` (zero at ``k = 0``), the bound implied by ``|exp(.)| = 1``.
    """
    acc = np.zeros(M + 1, dtype=complex)
    for start in range(0, emp.n, chunk):
        x = emp.samples[start:start + chunk]
        z = np.exp(-1j * np.pi * x)
        p = np.ones_like(z)
        for k in range(M + 1):
            acc[k] += p.sum()
            p *= z
    half = acc / emp.n
    half[0] = 1.0
    se = np.full(2 * M + 1, 1.0 / np.sqrt(emp.n))
    se[M] = 0.0
    return CoefficientVector.from_nonnegative(half), se


def correlation_sum(x: np.ndarray, radii) -> np.ndarray:
    """Fraction of ordered pairs ``i != j`` with ``|x_i - x_j| < r`` for each radius."""
    xs = np.sort(np.asarray(x, float))
    n = xs.size
    out = []
    for r in np.atleast_1d(radii):
        # pairs (i, j>i) with xs[j] - xs[i] < r
        hi = np.searchsorted(xs, xs + r, side="left")
        pairs = np.sum(hi - np.arange(n) - 1)
        out.append(2.0 * pairs / (n * (n - 1.0)))
    return np.array(out)


def correlation_dimension(x: np.ndarray, r_min: float, r_max: float, n_radii: int = 25):
    """Slope of ``log C(r)`` against ``log r`` on a geometric radius grid.

    Returns ``(slope, stderr)``.
    """
    r = np.geomspace(r_min, r_max, n_radii)
    C = correlation_sum(x, r)
    ok = C > 0
    if ok.sum() < 3:
        raise DomainError("too few radii with non-empty correlation sums")
    fit = np.polyfit(np.log(r[ok]), np.log(C[ok]), 1, cov=True)
    return float(fit[0][0]), float(np.sqrt(fit[1][0, 0]))
