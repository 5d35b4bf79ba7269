"""Measure descriptions, their Fourier transforms and random sampling.

All measures live on [-1, 1] (the Gaussian initial condition excepted) and
the transform convention is ``nu_hat(y) = int exp(-i y x) dnu(x)``.

An :class:`IFSInvariant` is the invariant measure of the homogeneous affine
system ``x -> delta * x + (1 - delta) * beta`` with ``beta ~ sigma``. Its
transform is the infinite product ``prod_j sigma_hat(delta**j (1-delta) y)``,
evaluated factor by factor until the remaining tail cannot move the result
by more than ``eps_stop``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

MAX_FACTORS = 10_000
DEFAULT_EPS = 1e-13
# closed-form values this small are rounding residue of an exact zero
ZERO_SNAP = 8 * np.finfo(float).eps


def _snap_zeros(v):
    v[np.abs(v) < ZERO_SNAP] = 0.0
    return v


class DomainError(ValueError):
    """Raised for invalid measure parameters or arguments."""


class TruncationError(RuntimeError):
    """Raised when an infinite product needs more factors than allowed."""


@dataclass(frozen=True)
class Atoms:
    """Finite atomic measure ``sum_m w_m Delta_{b_m}``."""

    locations: tuple
    weights: tuple

    def __post_init__(self):
        loc = tuple(float(b) for b in self.locations)
        w = tuple(float(p) for p in self.weights)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", w)
        if len(loc) == 0 or len(loc) != len(w):
            raise DomainError("atoms need matching, non-empty locations and weights")
        if any(p <= 0 for p in w):
            raise DomainError("atom weights must be positive")
        if abs(sum(w) - 1.0) > 1e-12:
            raise DomainError(f"atom weights sum to {sum(w)!r}, not 1")
        if any(not -1.0 <= b <= 1.0 for b in loc):
            raise DomainError("atom locations must lie in [-1, 1]")

    @property
    def abs_moment(self) -> float:
        return float(np.dot(np.abs(self.locations), self.weights))

    def _ft(self, y, eps, max_factors):
        b = np.asarray(self.locations)
        w = np.asarray(self.weights)
        if np.all(b == -b[::-1]) and np.allclose(w, w[::-1], rtol=0, atol=0):
            # symmetric: real cosine sum, no complex exponentials
            return _snap_zeros((np.cos(np.multiply.outer(y, b)) @ w).astype(complex))
        return _snap_zeros(np.exp(-1j * np.multiply.outer(y, b)) @ w)

    def _sample(self, rng, size, burn_in):
        return rng.choice(np.asarray(self.locations), size=size, p=np.asarray(self.weights))


@dataclass(frozen=True)
class Lebesgue:
    """Uniform probability measure on [-1, 1]."""

    abs_moment = 0.5

    def _ft(self, y, eps, max_factors):
        return _snap_zeros(np.sinc(y / np.pi).astype(complex))

    def _sample(self, rng, size, burn_in):
        return rng.uniform(-1.0, 1.0, size=size)


@dataclass(frozen=True)
class GaussianDensity:
    """Centered Gaussian with variance ``sqrt(2) / omega``.

    Used only as an initial condition; its transform is the untruncated
    Gaussian one and samples are rejection-restricted to [-1, 1].
    """

    omega: float

    def __post_init__(self):
        if not 0.0 < self.omega < 1.0:
            raise DomainError("omega must lie in (0, 1)")

    @property
    def variance(self) -> float:
        return math.sqrt(2.0) / self.omega

    @property
    def abs_moment(self) -> float:
        return math.sqrt(2.0 * self.variance / math.pi)

    def _ft(self, y, eps, max_factors):
        return np.exp(-0.5 * self.variance * y**2).astype(complex)

    def _sample(self, rng, size, burn_in):
        sd = math.sqrt(self.variance)
        out = np.empty(size)
        filled = 0
        while filled < size:
            draw = rng.normal(0.0, sd, size=2 * (size - filled) + 16)
            draw = draw[np.abs(draw) <= 1.0][: size - filled]
            out[filled : filled + draw.size] = draw
            filled += draw.size
        return out


@dataclass(frozen=True)
class IFSInvariant:
    """Invariant measure of ``x -> delta x + (1 - delta) beta``, ``beta ~ sigma``."""

    sigma: "MeasureSpec"
    delta: float

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise DomainError("delta must satisfy 0 < delta < 1")
        if not isinstance(self.sigma, (Atoms, Lebesgue, GaussianDensity, IFSInvariant)):
            raise DomainError(f"unsupported driving measure {self.sigma!r}")

    @property
    def abs_moment(self) -> float:
        # |x| <= sum_j delta^j (1-delta) |beta_j|
        return self.sigma.abs_moment

    def _ft(self, y, eps, max_factors):
        delta = self.delta
        m1 = self.sigma.abs_moment
        arg = (1.0 - delta) * np.asarray(y, dtype=float)
        # bound on the tail beyond the current factor: delta^(n+1) |y| E|beta|
        tail = np.abs(np.asarray(y, dtype=float)) * m1 * delta
        out = np.ones(arg.shape, dtype=complex)
        active = np.flatnonzero(tail >= 0)
        for _ in range(max_factors):
            psi = self.sigma._ft(arg[active], eps, max_factors)
            out[active] *= psi
            done = (np.abs(psi - 1.0) < eps) & (tail[active] < eps)
            active = active[~done]
            if active.size == 0:
                return out
            arg[active] *= delta
            tail[active] *= delta
        raise TruncationError(
            f"product for delta={delta} not converged after {max_factors} factors "
            f"(largest pending |y| = {np.abs(arg[active]).max() / (1 - delta):.3g})"
        )

    def _sample(self, rng, size, burn_in):
        if burn_in < 1:
            raise DomainError("burn_in must be >= 1 for IFS-invariant measures")
        x = np.zeros(size)
        for _ in range(burn_in):
            x = self.delta * x + (1.0 - self.delta) * self.sigma._sample(rng, size, burn_in)
        return x


MeasureSpec = Union[Atoms, Lebesgue, GaussianDensity, IFSInvariant]


def bernoulli(p: float = 0.5) -> Atoms:
    """Two atoms at -1 and +1 with weights ``1 - p`` and ``p``."""
    return Atoms((-1.0, 1.0), (1.0 - p, p))


def cascade(mu0: MeasureSpec, *deltas: float) -> MeasureSpec:
    """Nest ``mu0`` inside one IFS level per contraction ratio, innermost first."""
    spec = mu0
    for d in deltas:
        spec = IFSInvariant(spec, d)
    return spec


def fourier_eval(spec: MeasureSpec, y, eps_stop: float = DEFAULT_EPS,
                 max_factors: int = MAX_FACTORS):
    """Fourier transform ``int exp(-i y x) dnu(x)`` at one or many frequencies.

    Parameters
    ----------
    spec : MeasureSpec
        Measure to transform.
    y : float or array_like
        Frequencies (radians). Must be finite.
    eps_stop : float
        Product termination threshold; only used by IFS-invariant measures.
    max_factors : int
        Hard cap on product factors per nesting level.

    Returns
    -------
    complex or ndarray of complex
        Same shape as ``y``.
    """
    if eps_stop <= 0:
        raise DomainError("eps_stop must be positive")
    arr = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("frequencies must be finite")
    out = spec._ft(arr.ravel(), eps_stop, max_factors).reshape(arr.shape)
    if arr.ndim == 0:
        return complex(out)
    return out


def log_abs_ft(spec: MeasureSpec, y, eps_stop: float = DEFAULT_EPS):
    """``log |nu_hat(y)|``; ``-inf`` where the transform vanishes."""
    val = np.abs(fourier_eval(spec, y, eps_stop))
    with np.errstate(divide="ignore"):
        out = np.log(val)
    # rounding can push |nu_hat(0)| a hair above 1
    out = np.minimum(out, 0.0)
    if np.ndim(out) == 0:
        return float(out)
    return out


def sample(spec: MeasureSpec, rng: np.random.Generator, burn_in: int = 100,
           size: int | None = None):
    """Draw from ``spec``.

    IFS-invariant measures are sampled by running the random iteration for
    ``burn_in`` steps from ``x0 = 0``; the result is within
    ``delta**burn_in`` of an exact draw.
    """
    n = 1 if size is None else int(size)
    out = spec._sample(rng, n, burn_in)
    return float(out[0]) if size is None else out
