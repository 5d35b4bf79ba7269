"""Infinite-product Fourier transforms of invariant measures and of finite
iterates, plus the "refined" density mapping that uses the exact iterate
coefficients instead of the truncated transfer matrix.
"""

from __future__ import annotations

import numpy as np

from .measures import (DEFAULT_EPS, DomainError, IFSInvariant, MeasureSpec,
                       fourier_eval)
from .transfer import CoefficientVector, run_iteration

# smallest Pisot number (real root of x^3 = x + 1); 1/P gives a singular
# Bernoulli convolution
PLASTIC_NUMBER = 1.3247179572447460


def _check_grid(grid) -> np.ndarray:
    y = np.asarray(grid, dtype=float)
    if y.ndim != 1:
        raise DomainError("frequency grid must be one-dimensional")
    if y.size > 1 and np.any(np.diff(y) <= 0):
        raise DomainError("frequency grid must be strictly increasing")
    return y


def coefficient_grid(k_max: int, k_min: int = 1) -> np.ndarray:
    """Frequencies ``pi k`` for ``k = k_min..k_max``."""
    return np.pi * np.arange(k_min, k_max + 1)


def product_transform(sigma: MeasureSpec, delta: float, grid, eps_stop: float = DEFAULT_EPS) -> np.ndarray:
    """``mu_hat(y) = prod_{j>=0} sigma_hat(delta^j (1-delta) y)`` on a grid."""
    y = _check_grid(grid)
    return fourier_eval(IFSInvariant(sigma, delta), y, eps_stop)


def partial_products(sigma: MeasureSpec, delta: float, y, n: int,
                     eps_stop: float = DEFAULT_EPS) -> np.ndarray:
    """Running products ``P_m(y) = prod_{j<m} sigma_hat(delta^j (1-delta) y)``.

    Row ``m`` (``m = 0..n``) holds ``P_m``; row 0 is all ones.
    """
    y = np.asarray(y, dtype=float)
    out = np.ones((n + 1, y.size), dtype=complex)
    arg = (1.0 - delta) * y
    for m in range(n):
        out[m + 1] = out[m] * fourier_eval(sigma, arg, eps_stop)
        arg = arg * delta
    return out


def finite_iterate_transform(mu0: MeasureSpec, sigma: MeasureSpec, delta: float, n: int,
                             grid, eps_stop: float = DEFAULT_EPS) -> np.ndarray:
    """Exact transform of the n-th iterate: ``mu0_hat(delta^n y) prod_{j<n} sigma_hat(...)``."""
    if n < 0:
        raise DomainError("n must be non-negative")
    y = _check_grid(grid)
    P = partial_products(sigma, delta, y, n, eps_stop)[-1]
    return fourier_eval(mu0, delta**n * y, eps_stop) * P


def refined_iterates(mu0: MeasureSpec, sigma: MeasureSpec, delta: float, M: int,
                     max_iter: int, eps_stop: float = DEFAULT_EPS):
    """Yield the exact coefficient vectors of ``mu_1, mu_2, ...`` truncated to ``|k| <= M``."""
    y = np.pi * np.arange(0, M + 1)
    P = np.ones(M + 1, dtype=complex)
    arg = (1.0 - delta) * y
    scale = delta
    for _ in range(max_iter):
        P = P * fourier_eval(sigma, arg, eps_stop)
        arg = arg * delta
        yield CoefficientVector.from_nonnegative(fourier_eval(mu0, scale * y, eps_stop) * P)
        scale *= delta


def refined_density_mapping(mu0: MeasureSpec, sigma: MeasureSpec, delta: float, M: int,
                            eps_stop: float = 1e-8, max_iter: int = 200,
                            monitor_metric: str = "coeff_sum", n_grid: int | None = None,
                            check_divergence: bool = True, keep=None):
    """Density mapping driven by exact iterate coefficients.

    Same bookkeeping and verdicts as
    :func:`affine_ifs.transfer.iterate_to_fixed_point`, but with no
    truncation of the inner sum: only the reconstruction is band-limited.
    """
    initial = CoefficientVector.from_measure(mu0, M)
    steps = refined_iterates(mu0, sigma, delta, M, max_iter)
    final, report, history = run_iteration(steps, initial, eps_stop, monitor_metric,
                                           n_grid, keep, check_divergence)
    if keep is not None:
        return final, report, history
    return final, report
