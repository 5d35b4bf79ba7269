import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from affine_ifs.density import reconstruct
from affine_ifs.measures import (Atoms, DomainError, GaussianDensity, Lebesgue, bernoulli,
                                 fourier_eval)
from affine_ifs.products import product_transform
from affine_ifs.transfer import (CoefficientVector, IterationReport, Verdict, apply_transfer,
                                 bv_diverging, distance, iterate_to_fixed_point, transfer_matrix)

BERN = bernoulli()


def _sinc(x):
    return np.sinc(np.asarray(x) / np.pi)


@pytest.mark.parametrize("sigma", [Lebesgue(), BERN, Atoms((-0.2, 0.9), (0.6, 0.4))])
@pytest.mark.parametrize("delta", [0.3, 0.75])
def test_uniform_start_single_term(sigma, delta):
    M = 12
    out = apply_transfer(CoefficientVector.uniform(M), sigma, delta, renormalize=False)
    k = np.arange(0, M + 1)
    want = fourier_eval(sigma, (1 - delta) * np.pi * k) * _sinc(np.pi * k * delta)
    np.testing.assert_allclose(out.nonnegative, want, atol=1e-14)


def test_spot_value_bernoulli():
    out = apply_transfer(CoefficientVector.uniform(4), BERN, 0.4)
    assert out[1].real == pytest.approx(np.cos(0.6 * np.pi) * np.sin(0.4 * np.pi) / (0.4 * np.pi), abs=1e-12)
    assert out[1].real == pytest.approx(-0.2338723209, abs=1e-9)


@pytest.mark.parametrize("delta", [0.1, 0.4, 0.9])
def test_lebesgue_keeps_mass(delta):
    rng = np.random.default_rng(1)
    half = rng.normal(size=11) * 0.1
    half[0] = 1.0
    out = apply_transfer(CoefficientVector.from_nonnegative(half), Lebesgue(), delta, renormalize=False)
    assert out[0] == pytest.approx(1.0, abs=1e-14)


def test_coeff_sum_hand_value():
    a = CoefficientVector.uniform(2)
    b = apply_transfer(a, BERN, 0.4)
    hand = abs(np.cos(0.6 * np.pi) * _sinc(0.4 * np.pi)) + abs(np.cos(1.2 * np.pi) * _sinc(0.8 * np.pi))
    assert distance(a, b, "coeff_sum") == pytest.approx(hand, abs=1e-12)
    assert hand == pytest.approx(0.423079, abs=1e-6)


@pytest.mark.parametrize("metric", ["coeff_sum", "l1", "linf", "bv"])
def test_distance_to_self_is_zero(metric):
    c = CoefficientVector.from_measure(BERN, 8)
    assert distance(c, c, metric) == 0.0


def test_distance_errors():
    with pytest.raises(DomainError):
        distance(CoefficientVector.uniform(2), CoefficientVector.uniform(3))
    with pytest.raises(DomainError):
        distance(CoefficientVector.uniform(2), CoefficientVector.uniform(2), "sup")
    g = reconstruct(CoefficientVector.uniform(2))
    with pytest.raises(DomainError):
        distance(g, g, "coeff_sum")
    with pytest.raises(DomainError):
        distance(g, CoefficientVector.uniform(2), "l1")


def test_distance_on_grids():
    a = reconstruct(CoefficientVector.uniform(4))
    b = reconstruct(apply_transfer(CoefficientVector.uniform(4), Lebesgue(), 0.4))
    assert distance(a, b, "linf") == pytest.approx(np.max(np.abs(a.rho - b.rho)))


def test_coefficient_vector_validation():
    with pytest.raises(DomainError):
        CoefficientVector(np.ones(4))
    c = CoefficientVector.from_measure(Atoms((-0.5, 1.0), (0.5, 0.5)), 5)
    assert c[-3] == np.conj(c[3])
    with pytest.raises(IndexError):
        c[6]


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), alpha=st.floats(0, 1), delta=st.floats(0.05, 0.95))
def test_linearity_before_renormalization(seed, alpha, delta):
    rng = np.random.default_rng(seed)
    a = CoefficientVector.from_nonnegative(np.r_[1.0, rng.normal(size=6) * 0.3])
    b = CoefficientVector.from_nonnegative(np.r_[1.0, rng.normal(size=6) * 0.3])
    mix = CoefficientVector(alpha * a.c + (1 - alpha) * b.c)
    lhs = apply_transfer(mix, BERN, delta, renormalize=False).c
    rhs = (alpha * apply_transfer(a, BERN, delta, renormalize=False).c
           + (1 - alpha) * apply_transfer(b, BERN, delta, renormalize=False).c)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000), delta=st.floats(0.05, 0.95))
def test_renormalized_output_is_hermitian_probability(seed, delta):
    rng = np.random.default_rng(seed)
    c = CoefficientVector.from_nonnegative(np.r_[1.0, rng.normal(size=8) * 0.2 + 0.1j * rng.normal(size=8)])
    out = apply_transfer(c, Atoms((-1.0, 0.2), (0.3, 0.7)), delta)
    assert out[0] == 1.0
    np.testing.assert_array_equal(out.c[::-1], np.conj(out.c))


def test_transfer_matrix_cached_and_checked():
    assert transfer_matrix(BERN, 0.4, 10) is transfer_matrix(BERN, 0.4, 10)
    assert transfer_matrix(BERN, 0.4, 10).shape == (11, 21)
    with pytest.raises(DomainError):
        transfer_matrix(BERN, 1.2, 10)


def test_bv_divergence_rule():
    assert not bv_diverging([1, 20], 1)
    assert bv_diverging([1, 5, 11, 12], 1)
    assert not bv_diverging([1, 12, 11, 12], 1)  # not strictly rising
    assert not bv_diverging([1, 2, 3, 4], 1)  # below ten times BV_1


def test_lebesgue_fixed_point():
    c, rep, hist = iterate_to_fixed_point(CoefficientVector.uniform(100), Lebesgue(), 0.4,
                                          eps_stop=1e-12, keep=lambda n: n in (4, 5))
    assert rep.verdict is Verdict.CONVERGED
    assert [r.n for r in rep.records] == list(range(1, rep.n_final + 1))
    # n = 4 and n = 5 densities are practically indistinguishable
    assert distance(hist[4], hist[5], "linf") < 1e-3
    ref = product_transform(Lebesgue(), 0.4, np.pi * np.arange(0, 51))
    np.testing.assert_allclose(c.nonnegative[:51], ref, atol=1e-6)
    assert rep.records[-1].l1_norm == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("metric", ["d1", "d2", "d3", "d4"])
def test_lebesgue_distances_decay_exponentially(metric):
    _, rep = iterate_to_fixed_point(CoefficientVector.uniform(100), Lebesgue(), 0.4, eps_stop=1e-12)
    d = rep.series(metric)
    n = rep.series("n")
    use = d > 1e-12
    slope, icpt = np.polyfit(n[use], np.log(d[use]), 1)
    pred = slope * n[use] + icpt
    ss = np.sum((np.log(d[use]) - pred) ** 2)
    r2 = 1 - ss / np.sum((np.log(d[use]) - np.log(d[use]).mean()) ** 2)
    assert slope < 0 and r2 > 0.99


@pytest.mark.parametrize("M", [100, 200])
def test_bernoulli_bv_diverges(M):
    _, rep = iterate_to_fixed_point(CoefficientVector.uniform(M), BERN, 0.4)
    assert rep.verdict is Verdict.BV_DIVERGING


def test_bernoulli_bv_saturation_grows_with_m():
    levels = []
    for M in (100, 200):
        _, rep = iterate_to_fixed_point(CoefficientVector.uniform(M), BERN, 0.4, max_iter=25,
                                        check_divergence=False)
        bv = rep.series("bv_norm")
        assert bv[3] > 2 * bv[0]  # early exponential growth
        levels.append(bv[-5:].mean())
    assert levels[1] > 1.5 * levels[0]


def test_bounded_density_driver_keeps_linf_bounded():
    _, rep, hist = iterate_to_fixed_point(CoefficientVector.from_measure(GaussianDensity(0.5), 100),
                                          Lebesgue(), 0.6, eps_stop=1e-12, keep=lambda n: True)
    assert rep.verdict is Verdict.CONVERGED
    sup = [reconstruct(c).norms()["linf"] for c in hist.values()]
    # each iterate is bounded by sup(driver density) / (1 - delta) = 0.5 / 0.4
    assert max(sup) < 0.5 / 0.4 + 0.05


def test_max_iterations_and_arguments():
    _, rep = iterate_to_fixed_point(CoefficientVector.uniform(20), Lebesgue(), 0.4, max_iter=2)
    assert rep.verdict is Verdict.MAX_ITERATIONS and rep.n_final == 2
    assert isinstance(rep, IterationReport)
    assert rep.to_dict()["verdict"] == "MaxIterations"
    with pytest.raises(DomainError):
        iterate_to_fixed_point(CoefficientVector.uniform(4), Lebesgue(), 0.4, eps_stop=0)
    with pytest.raises(DomainError):
        iterate_to_fixed_point(CoefficientVector.uniform(4), Lebesgue(), 0.4, max_iter=0)
    with pytest.raises(DomainError):
        iterate_to_fixed_point(CoefficientVector.uniform(4), Lebesgue(), 0.4, monitor_metric="sup")
