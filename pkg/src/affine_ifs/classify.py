"""Continuity verdicts from iteration reports, coefficient decay and the
Sobolev dimension.

Two kinds of evidence are combined:

* the density mapping: geometric convergence of successive densities
  (absolute continuity) against exponential growth of their total
  variation (singularity);
* Fourier asymptotics: the decay exponent of ``|c_k|`` and the growth
  exponent of the Cesaro average of ``|mu_hat|^2``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from .measures import MeasureSpec, fourier_eval
from .transfer import IterationReport, Verdict

# decay slower than k^(-1/4) over the fitted range is treated as non-decay
NON_DECAY_SLOPE = 0.25
# square-summable coefficients need decay faster than k^(-1/2)
L2_SLOPE = 0.5
# moduli below this are round-off, not signal
NOISE_FLOOR = 1e-14


class Continuity(str, enum.Enum):
    ABSOLUTELY_CONTINUOUS = "AbsolutelyContinuous"
    SINGULAR_CONTINUOUS = "SingularContinuous"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class DecayFit:
    """Power-law fit ``|c_k| ~ k^(-gamma)`` on the upper envelope."""

    gamma: float | None
    stderr: float | None
    n_points: int
    rejected: bool = False

    @property
    def non_decaying(self) -> bool:
        return self.rejected or self.gamma < NON_DECAY_SLOPE

    @property
    def square_summable(self) -> bool:
        return not self.rejected and self.gamma > L2_SLOPE


def estimate_decay_exponent(k, moduli, k_min: int = 100, n_bins: int = 24,
                            min_points: int = 20) -> DecayFit:
    """Least-squares slope of the log envelope of ``|c_k|`` against ``log k``.

    The envelope is the maximum of ``|c_k|`` over ``n_bins`` logarithmic
    bins of ``k >= k_min``; fitting maxima keeps the zeros of oscillating
    transforms from dominating the fit. Too few usable points gives a
    rejected fit instead of an error. Coefficients that are all at round-off
    level give ``gamma = inf``.
    """
    k = np.asarray(k, float)
    m = np.abs(np.asarray(moduli))
    use = (k >= k_min) & (m > NOISE_FLOOR) & np.isfinite(m)
    if use.sum() < min_points:
        tiny = (k >= k_min) & (m <= NOISE_FLOOR)
        if tiny.sum() >= min_points and not use.any():
            return DecayFit(float("inf"), 0.0, 0)
        return DecayFit(None, None, int(use.sum()), rejected=True)
    k, m = k[use], m[use]
    edges = np.geomspace(k.min(), k.max() * (1 + 1e-12), n_bins + 1)
    kc, env = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (k >= lo) & (k < hi)
        if sel.any():
            i = np.argmax(np.where(sel, m, -np.inf))
            kc.append(k[i])
            env.append(m[i])
    if len(env) < 3:
        return DecayFit(None, None, int(use.sum()), rejected=True)
    coef, cov = np.polyfit(np.log(kc), np.log(env), 1, cov=True)
    return DecayFit(float(-coef[0]), float(np.sqrt(cov[0, 0])), int(use.sum()))


@dataclass
class SobolevEstimate:
    """Sobolev-dimension estimate.

    ``alpha`` is the fitted exponent of ``H(Y) = (1/Y) int_0^Y |mu_hat|^2``.
    ``value`` equals ``alpha`` when ``alpha < 1``; otherwise it is
    ``max(1, 2 gamma)`` from the transform's decay and ``lower_bound_only``
    is set. ``value`` is None when the quadrature did not settle.
    """

    value: float | None
    stderr: float | None
    alpha: float
    alpha_stderr: float
    lower_bound_only: bool = False
    quadrature_change: float = 0.0


def cesaro_power(spec: MeasureSpec, y_max: float, step: float = 0.02):
    """``Y`` grid and ``H(Y) = (1/Y) int_0^Y |mu_hat(y)|^2 dy`` via cumulative Simpson."""
    y = np.arange(0.0, y_max + 0.5 * step, step)
    power = np.abs(fourier_eval(spec, y)) ** 2
    integral = cumulative_simpson(power, x=y, initial=0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        H = np.where(y > 0, integral / np.where(y > 0, y, 1.0), 1.0)
    return y, H, power


def estimate_sobolev_dimension(spec: MeasureSpec, y_max: float = 1e4, n_windows: int = 40,
                               y_min: float = 10.0, step: float = 0.02,
                               rtol: float = 1e-3) -> SobolevEstimate:
    """Estimate the Sobolev dimension from the growth of the Cesaro average.

    ``H(Y)`` is sampled at ``n_windows`` geometric window edges between
    ``y_min`` and ``y_max`` and ``H ~ Y^(-alpha)`` is fitted. The quadrature
    is repeated with a doubled step; a relative change above ``rtol`` makes
    the estimate inconclusive.
    """
    if n_windows < 5:
        raise ValueError("need at least 5 windows")
    y, H, power = cesaro_power(spec, y_max, step)
    y2, H2, _ = cesaro_power(spec, y_max, 2 * step)
    Y = np.geomspace(y_min, y_max, n_windows)
    h = np.interp(Y, y, H)
    h2 = np.interp(Y, y2, H2)
    change = float(np.max(np.abs(h - h2) / np.abs(h)))
    coef, cov = np.polyfit(np.log(Y), np.log(h), 1, cov=True)
    alpha, alpha_se = float(-coef[0]), float(np.sqrt(cov[0, 0]))
    if change > rtol:
        return SobolevEstimate(None, None, alpha, alpha_se, quadrature_change=change)
    if alpha < 1.0 - 3 * max(alpha_se, 0.01):
        return SobolevEstimate(alpha, alpha_se, alpha, alpha_se, quadrature_change=change)
    # square-integrable transform: only the pointwise decay says more
    sel = y >= y_min
    fit = estimate_decay_exponent(y[sel], np.sqrt(power[sel]), k_min=y_min)
    value = 1.0 if fit.rejected else max(1.0, 2.0 * fit.gamma)
    se = None if fit.rejected else 2.0 * fit.stderr
    return SobolevEstimate(value, se, alpha, alpha_se, lower_bound_only=True,
                           quadrature_change=change)


@dataclass
class Classification:
    verdict: Continuity
    decay_exponent: float | None = None
    sobolev_dim: float | None = None
    iteration_verdict: str | None = None
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "evidence": {
                "decay_exponent": self.decay_exponent,
                "sobolev_dim": self.sobolev_dim,
                "iteration_verdict": self.iteration_verdict,
            },
            "flags": list(self.flags),
        }


def classify(report: IterationReport | None = None, decay: DecayFit | None = None,
             sobolev: float | SobolevEstimate | None = None,
             mass_tol: float = 0.1) -> Classification:
    """Combine iteration, decay and Sobolev evidence into one verdict.

    Converged iteration with square-summable coefficients gives absolute
    continuity; total-variation blow-up with non-decaying coefficients (or a
    Sobolev dimension at most one) gives singularity. Anything else, or a
    converged density whose L1 norm drifted from one, is inconclusive.
    """
    if isinstance(sobolev, SobolevEstimate):
        sobolev = sobolev.value
    if report is None and decay is None and sobolev is None:
        raise ValueError("no evidence supplied")

    out = Classification(
        Continuity.INCONCLUSIVE,
        decay_exponent=None if decay is None else decay.gamma,
        sobolev_dim=sobolev,
        iteration_verdict=None if report is None else report.verdict.value,
    )
    decay_ok = decay is not None and decay.square_summable
    singular_fourier = (decay is not None and decay.non_decaying) or (
        sobolev is not None and sobolev <= 1.0)
    smooth_fourier = decay_ok and not (sobolev is not None and sobolev <= 1.0)
    if decay is not None and decay.rejected:
        out.flags.append("decay_fit_rejected")

    if report is None:
        if smooth_fourier and (sobolev is None or sobolev > 1.0):
            out.verdict = Continuity.ABSOLUTELY_CONTINUOUS
        elif singular_fourier and not decay_ok:
            out.verdict = Continuity.SINGULAR_CONTINUOUS
        else:
            out.flags.append("conflicting_fourier_evidence")
        return out

    if report.verdict is Verdict.CONVERGED:
        l1 = report.records[-1].l1_norm if report.records else 1.0
        if abs(l1 - 1.0) > mass_tol:
            out.flags.append("l1_not_conserved")
        elif smooth_fourier:
            out.verdict = Continuity.ABSOLUTELY_CONTINUOUS
        else:
            out.flags.append("converged_but_fourier_disagrees")
    elif report.verdict is Verdict.BV_DIVERGING:
        if singular_fourier and not decay_ok:
            out.verdict = Continuity.SINGULAR_CONTINUOUS
        else:
            out.flags.append("bv_diverging_but_fourier_disagrees")
    else:
        out.flags.append("iteration_undecided")
    return out
