"""Density reconstruction from Fourier coefficients, grid norms, and the exact
piecewise-constant iterates of the symmetric Bernoulli system (delta < 1/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import DomainError

IMAG_TOL = 1e-9


@dataclass
class DensityGrid:
    """Density samples ``rho[i]`` at ``x[i] = -1 + 2 i / n_grid``, ``i = 0..n_grid``."""

    rho: np.ndarray

    @property
    def n_grid(self) -> int:
        return self.rho.size - 1

    @property
    def x(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, self.rho.size)

    @property
    def dx(self) -> float:
        return 2.0 / self.n_grid

    def __sub__(self, other: "DensityGrid") -> "DensityGrid":
        if self.rho.shape != other.rho.shape:
            raise DomainError("grid size mismatch")
        return DensityGrid(self.rho - other.rho)

    def __mul__(self, alpha: float) -> "DensityGrid":
        return DensityGrid(alpha * self.rho)

    __rmul__ = __mul__

    def norms(self) -> dict:
        return norms(self)


def reconstruct(coeffs, n_grid: int | None = None) -> DensityGrid:
    """Synthesize ``rho(x) = 1/2 sum_k c_k exp(i pi k x)`` on a uniform grid.

    Parameters
    ----------
    coeffs : CoefficientVector
        Coefficients ``c_k``, ``k = -M..M``.
    n_grid : int, optional
        Number of grid intervals; defaults to ``8 M``. Must be at least ``4 M``.
    """
    M = coeffs.M
    if n_grid is None:
        n_grid = max(8 * M, 16)
    if n_grid < 4 * M:
        raise DomainError(f"n_grid={n_grid} is below the 4*M={4 * M} margin")
    # x_i = -1 + 2i/N  =>  exp(i pi k x_i) = (-1)^k exp(2 pi i k i / N)
    k = np.arange(-M, M + 1)
    spectrum = np.zeros(n_grid, dtype=complex)
    spectrum[k % n_grid] = coeffs.c * np.where(k % 2, -1.0, 1.0)
    vals = np.fft.ifft(spectrum) * (n_grid / 2.0)
    if np.max(np.abs(vals.imag), initial=0.0) > IMAG_TOL:
        raise DomainError("reconstructed density has a non-negligible imaginary part")
    rho = np.append(vals.real, vals.real[0])
    return DensityGrid(rho)


def norms(grid: DensityGrid) -> dict:
    """L1 (trapezoid), sup and total-variation norms of a sampled density."""
    r = grid.rho
    return {
        "l1": float(np.trapezoid(np.abs(r), dx=grid.dx)),
        "linf": float(np.max(np.abs(r))),
        "bv": float(np.sum(np.abs(np.diff(r)))),
    }


@dataclass
class PiecewiseConstantDensity:
    """Step function ``value[m]`` on ``[left[m], right[m]]``, zero elsewhere."""

    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def __post_init__(self):
        order = np.argsort(self.left)
        self.left = np.asarray(self.left, float)[order]
        self.right = np.asarray(self.right, float)[order]
        self.value = np.asarray(self.value, float)[order]
        if np.any(self.left[1:] < self.right[:-1]):
            raise DomainError("intervals overlap")

    @property
    def mass(self) -> float:
        return float(np.sum(self.value * (self.right - self.left)))

    def _breaks(self):
        return np.concatenate([self.left, self.right])

    def __call__(self, x):
        x = np.asarray(x, float)
        idx = np.searchsorted(self.left, x, side="right") - 1
        ok = idx >= 0
        safe = np.where(ok, idx, 0)
        inside = ok & (x < self.right[safe])
        return np.where(inside, self.value[safe], 0.0)

    def total_variation(self) -> float:
        return total_variation_difference(self, None)

    def fourier_coefficients(self, M: int) -> np.ndarray:
        """Exact ``c_k = int exp(-i pi k x) rho(x) dx`` for ``k = -M..M``."""
        k = np.arange(-M, M + 1)[:, None]
        a, b, v = self.left[None, :], self.right[None, :], self.value[None, :]
        with np.errstate(invalid="ignore", divide="ignore"):
            seg = (np.exp(-1j * np.pi * k * b) - np.exp(-1j * np.pi * k * a)) / (-1j * np.pi * k)
        seg = np.where(k == 0, b - a, seg)
        return (seg * v).sum(axis=1)


def total_variation_difference(f: PiecewiseConstantDensity,
                               g: PiecewiseConstantDensity | None) -> float:
    """Exact total variation of ``f - g`` on the real line (``g`` may be None)."""
    pts = f._breaks() if g is None else np.concatenate([f._breaks(), g._breaks()])
    pts = np.unique(pts)
    # breakpoints built along different rounding paths may differ by a few ulp
    pts = pts[np.concatenate([[True], np.diff(pts) > 1e-12])]
    # value on each open cell, plus zero outside the outermost breakpoints
    mids = np.concatenate([[pts[0] - 1.0], 0.5 * (pts[1:] + pts[:-1]), [pts[-1] + 1.0]])
    vals = f(mids) - (0.0 if g is None else g(mids))
    return float(np.sum(np.abs(np.diff(vals))))


def bernoulli_exact_iterate(delta: float, n: int) -> PiecewiseConstantDensity:
    """n-th iterate of the uniform density under the symmetric Bernoulli system.

    The support is the n-th Cantor generation with ratio ``delta``: ``2**n``
    intervals of half-width ``delta**n`` centred at
    ``sum_{j<n} delta**j (1 - delta) s_j`` with ``s_j = +-1``; the density
    is ``2**(-n-1) delta**(-n)`` on each of them.
    """
    if not 0.0 < delta < 0.5:
        raise DomainError("exact iterates need 0 < delta < 1/2 (disjoint intervals)")
    if n < 0:
        raise DomainError("n must be non-negative")
    centres = np.zeros(1)
    for j in range(n):
        step = delta**j * (1.0 - delta)
        centres = np.concatenate([centres - step, centres + step])
    half = delta**n
    value = np.full(centres.size, 2.0 ** (-n - 1) * delta ** (-n))
    return PiecewiseConstantDensity(centres - half, centres + half, value)


def cantor_distance(x, delta: float, depth: int) -> np.ndarray:
    """Distance from ``x`` to the depth-``depth`` Cantor generation with ratio ``delta``.

    Only meaningful for ``delta < 1/2``; intended for test oracles.
    """
    it = bernoulli_exact_iterate(delta, depth)
    x = np.atleast_1d(np.asarray(x, float))[:, None]
    d = np.maximum(it.left[None, :] - x, x - it.right[None, :])
    return np.maximum(d, 0.0).min(axis=1)


def lebesgue_self_consistency(coeffs, delta: float, n_grid: int | None = None,
                              return_profile: bool = False):
    """Residual of ``rho(x) = mu([(x - db)/delta, (x + db)/delta]) / (2 db)``.

    ``db = 1 - delta``. Both sides use the same reconstructed density; the
    interval mass comes from a cumulative trapezoid rule, linearly
    interpolated at the (clipped) interval endpoints.
    """
    grid = reconstruct(coeffs, n_grid)
    x, rho = grid.x, grid.rho
    db = 1.0 - delta
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (rho[1:] + rho[:-1]) * grid.dx)])
    lo = np.clip((x - db) / delta, -1.0, 1.0)
    hi = np.clip((x + db) / delta, -1.0, 1.0)
    mass = np.interp(hi, x, cdf) - np.interp(lo, x, cdf)
    resid = np.abs(rho - mass / (2.0 * db))
    if return_profile:
        return float(resid.max()), resid
    return float(resid.max())
