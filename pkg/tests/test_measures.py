import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from affine_ifs.measures import (Atoms, DomainError, GaussianDensity, IFSInvariant, Lebesgue,
                                 TruncationError, bernoulli, cascade, fourier_eval, log_abs_ft,
                                 sample)
from affine_ifs.density import cantor_distance

BERN = bernoulli()


def test_lebesgue_at_zero_is_one():
    assert fourier_eval(Lebesgue(), 0.0) == 1.0


def test_bernoulli_at_pi():
    assert fourier_eval(BERN, math.pi) == pytest.approx(-1.0, abs=1e-15)


def test_viete_value_at_two():
    val = fourier_eval(IFSInvariant(BERN, 0.5), 2.0, eps_stop=1e-13)
    assert abs(val - math.sin(2.0) / 2.0) < 1e-12


def test_viete_identity_on_range():
    y = np.linspace(0.1, 100.0, 500)
    got = fourier_eval(IFSInvariant(BERN, 0.5), y, eps_stop=1e-12)
    assert np.max(np.abs(got - np.sin(y) / y)) < 1e-10


def test_gaussian_transform_uses_variance():
    g = GaussianDensity(0.5)
    v = math.sqrt(2.0) / 0.5
    assert fourier_eval(g, 1.3).real == pytest.approx(math.exp(-v * 1.3**2 / 2))


def test_asymmetric_atoms():
    a = Atoms((-0.5, 1.0), (0.25, 0.75))
    y = 0.7
    want = 0.25 * np.exp(0.5j * y) + 0.75 * np.exp(-1j * y)
    assert fourier_eval(a, y) == pytest.approx(want)


def test_log_abs_ft_sentinels():
    assert log_abs_ft(Lebesgue(), math.pi) == -math.inf
    assert log_abs_ft(BERN, 0.0) == 0.0


def test_log_abs_ft_matches_direct_log_sum():
    j = np.arange(200)
    direct = np.sum(np.log(np.abs(np.cos(0.6 * 0.4**j))))
    got = log_abs_ft(IFSInvariant(BERN, 0.4), 1.0)
    assert got <= 0
    assert got == pytest.approx(direct, abs=1e-12)


def test_scalar_and_array_shapes():
    spec = IFSInvariant(BERN, 0.4)
    assert isinstance(fourier_eval(spec, 1.0), complex)
    assert fourier_eval(spec, np.ones((3, 2))).shape == (3, 2)


@pytest.mark.parametrize("bad", [np.inf, -np.inf, np.nan])
def test_non_finite_frequency_rejected(bad):
    with pytest.raises(DomainError):
        fourier_eval(Lebesgue(), bad)


def test_truncation_error_reports_pending_frequency():
    spec = IFSInvariant(BERN, 0.999)
    with pytest.raises(TruncationError, match="not converged"):
        fourier_eval(spec, 1e6, max_factors=50)


@pytest.mark.parametrize("kwargs", [
    dict(locations=(0.0, 1.0), weights=(0.5, 0.6)),
    dict(locations=(0.0, 1.5), weights=(0.5, 0.5)),
    dict(locations=(0.0,), weights=(-1.0,)),
    dict(locations=(), weights=()),
])
def test_invalid_atoms(kwargs):
    with pytest.raises(DomainError):
        Atoms(**kwargs)


@pytest.mark.parametrize("delta", [0.0, 1.0, -0.2, 1.5])
def test_invalid_delta(delta):
    with pytest.raises(DomainError):
        IFSInvariant(BERN, delta)


@pytest.mark.parametrize("omega", [0.0, 1.0])
def test_invalid_omega(omega):
    with pytest.raises(DomainError):
        GaussianDensity(omega)


SPECS = [Lebesgue(), BERN, IFSInvariant(BERN, 0.4), IFSInvariant(Lebesgue(), 0.4),
         cascade(BERN, 0.4, 0.2), IFSInvariant(Atoms((-1.0, 0.3), (0.3, 0.7)), 0.6)]


@settings(max_examples=60, deadline=None)
@given(i=st.integers(0, len(SPECS) - 1), y=st.floats(-500, 500))
def test_modulus_bounded_and_hermitian(i, y):
    spec = SPECS[i]
    a = fourier_eval(spec, y)
    b = fourier_eval(spec, -y)
    assert abs(a) <= 1.0 + 1e-12
    assert abs(b - np.conj(a)) < 1e-12


@pytest.mark.parametrize("spec", SPECS)
def test_value_at_zero(spec):
    assert abs(fourier_eval(spec, 0.0) - 1.0) < 1e-12


def test_factor_count_is_logarithmic():
    # each factor shrinks the argument by delta: count calls through a wrapper
    calls = []

    class Counting(Atoms):
        def _ft(self, y, eps, mf):
            calls.append(np.size(y))
            return super()._ft(y, eps, mf)

    spec = IFSInvariant(Counting((-1.0, 1.0), (0.5, 0.5)), 0.5)
    fourier_eval(spec, 1e4, eps_stop=1e-12)
    bound = math.log(1e4 / 1e-12) / math.log(2.0) + 5
    assert len(calls) <= bound


def test_bernoulli_samples_are_signs():
    rng = np.random.default_rng(0)
    x = sample(BERN, rng, size=100_000)
    assert set(np.unique(x)) == {-1.0, 1.0}
    assert abs(np.mean(x == 1.0) - 0.5) < 3 * 0.5 / math.sqrt(x.size)


def test_lebesgue_sample_mean():
    rng = np.random.default_rng(1)
    x = sample(Lebesgue(), rng, size=100_000)
    assert abs(x.mean()) < 3 * (2 / math.sqrt(12)) / math.sqrt(x.size)


def test_cantor_samples_land_on_cantor_set():
    rng = np.random.default_rng(2)
    x = sample(IFSInvariant(BERN, 1 / 3), rng, burn_in=60, size=200)
    # 60 contractions from 0 leave the sample within 3^-60 of the Cantor set,
    # so it must sit inside the depth-16 generation up to rounding
    assert np.all(cantor_distance(x, 1 / 3, 16) < 2.0**-50)
    assert np.all(np.abs(x) <= 1.0)


def test_gaussian_samples_restricted():
    x = sample(GaussianDensity(0.5), np.random.default_rng(3), size=5000)
    assert np.all(np.abs(x) <= 1.0)


def test_sampling_is_deterministic():
    spec = cascade(BERN, 0.4, 0.3)
    a = sample(spec, np.random.default_rng(7), size=50)
    b = sample(spec, np.random.default_rng(7), size=50)
    np.testing.assert_array_equal(a, b)
    assert isinstance(sample(spec, np.random.default_rng(7)), float)


def test_ifs_sampling_needs_burn_in():
    with pytest.raises(DomainError):
        sample(IFSInvariant(BERN, 0.4), np.random.default_rng(0), burn_in=0)
