import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.integrate import dblquad

from app.core import frailty
from app.core.exceptions import CapabilityError, DomainError, StructuralError
from app.core.lattice import mixed_partial_log
from app.models.chisq import GaussianCovariance, TrivariateChiSqParams
from app.models.laplace import LaplaceModel
from app.models.lattice import IndexSet


def sigma3(r12: float, r13: float, r23: float) -> TrivariateChiSqParams:
    return TrivariateChiSqParams(sigma=((1.0, r12, r13), (r12, 1.0, r23), (r13, r23, 1.0)))


# ==================== SURVIE ET DENSITÉS ====================

def test_clayton_survival_and_density():
    model = frailty.clayton(2)
    assert frailty.survival(model, (1.0, 1.0)) == pytest.approx(1 / 3)
    assert frailty.density(model, (1.0, 1.0)) == pytest.approx(2 / 27, abs=1e-10)


def test_survival_rejects_negative_time():
    with pytest.raises(DomainError):
        frailty.survival(frailty.clayton(2), (-0.1, 1.0))


def test_invgauss_laplace_transform():
    model = frailty.invgauss(2.0, 2)
    assert frailty.survival(model, (0.5, 0.5)) == pytest.approx(math.exp(-2.0))


def test_invgauss_rejects_non_positive_theta():
    with pytest.raises(DomainError):
        frailty.invgauss(0.0)


@pytest.mark.parametrize("t", [(0.1, 0.1), (0.5, 0.2), (2.0, 1.0)])
def test_clayton_pair_lambda(t):
    expected = 1.0 / (1 + sum(t)) ** 2
    assert frailty.lambda_I(frailty.clayton(2), IndexSet.full(2), t) == pytest.approx(expected, rel=1e-12)


def test_clayton_marginal_hazard_at_origin():
    assert frailty.marginal_hazard_rate(frailty.clayton(2), 1, 0.0) == pytest.approx(1.0)


def test_shared_gamma_analytic_lambda_matches_finite_differences():
    model = frailty.shared_gamma(2.5, 3)
    t = (0.3, 0.6, 0.9)
    for I in IndexSet.full(3).subsets():
        fd = mixed_partial_log(model, I, t)
        assert frailty.lambda_I(model, I, t) == pytest.approx(fd, rel=1e-5, abs=1e-6)


def test_independence_has_zero_cross_densities():
    model = frailty.degenerate(3)
    assert frailty.lambda_I(model, IndexSet.of(3, 1, 3), (0.2, 0.0, 0.4)) == 0.0
    assert frailty.lambda_I(model, IndexSet.of(3, 2), (0.0, 5.0, 0.0)) == 1.0


# ==================== χ² ====================

def test_chisq_corner_pair_density_is_twice_squared_covariance():
    model = frailty.chisq(GaussianCovariance(sigma=((1.0, 0.5), (0.5, 1.0))))
    assert frailty.lambda_I(model, IndexSet.full(2), (0.0, 0.0)) == pytest.approx(0.5)


def test_chisq_rejects_non_positive_definite_sigma():
    with pytest.raises(ValidationError):
        GaussianCovariance(sigma=((1.0, 2.0), (2.0, 1.0)))


def test_chisq3_survival_matches_laplace_transform():
    p = sigma3(0.5, 0.4, 0.3)
    t = (0.3, 0.7, 1.1)
    assert frailty.chisq3_survival(p, t) == pytest.approx(frailty.survival(frailty.chisq3(p), t), rel=1e-12)


def test_chisq3_independent_components():
    p = sigma3(0.0, 0.0, 0.0)
    t = (0.5, 1.0, 2.0)
    expected = math.prod((1 + 2 * v) ** -0.5 for v in t)
    assert frailty.chisq3_survival(p, t) == pytest.approx(expected)


@pytest.mark.parametrize("t", [(0.3, 0.7, 1.1), (0.1, 0.1, 0.1), (2.0, 0.5, 1.0)])
def test_chisq3_parts_multiply_to_survival(t):
    parts = frailty.chisq3_parts(sigma3(0.5, 0.4, 0.3), t)
    product = math.prod(parts.S_i) * math.prod(parts.S_dep_pair.values()) * parts.S_dep_triple
    assert product == pytest.approx(parts.S, abs=1e-12)


def test_chisq3_triple_part_vanishes_without_first_axis_correlation():
    parts = frailty.chisq3_parts(sigma3(0.0, 0.0, 0.6), (1.0, 1.0, 1.0))
    assert parts.S_dep_triple == pytest.approx(1.0, abs=1e-12)


def test_chisq3_pair_densities_match_analytic_lambda():
    p = sigma3(0.5, 0.4, 0.3)
    model = frailty.chisq3(p)
    t = (0.4, 0.8, 0.0)
    parts = frailty.chisq3_parts(p, t)
    assert parts.lambda_pair[(1, 2)] == pytest.approx(frailty.lambda_I(model, IndexSet.of(3, 1, 2), t), rel=1e-10)


# ==================== ÉCHANTILLONNAGE ====================

def test_sampling_is_deterministic_for_a_seed():
    model = frailty.clayton(3)
    first = frailty.sample_lifetimes(model, 1000, seed=42)
    again = frailty.sample_lifetimes(model, 1000, seed=42)
    other = frailty.sample_lifetimes(model, 1000, seed=43)
    assert first.shape == (1000, 3)
    np.testing.assert_array_equal(first, again)
    assert not np.array_equal(first, other)
    assert np.all(first > 0)


def test_clayton_sampler_joint_survival():
    n = 100_000
    draws = frailty.sample_lifetimes(frailty.clayton(2), n, seed=7)
    empirical = float(np.mean(np.all(draws > 1.0, axis=1)))
    assert abs(empirical - 1 / 3) <= 4 * math.sqrt((1 / 3) * (2 / 3) / n)


def test_sampling_without_sampler_raises():
    model = LaplaceModel(name="bare", d=2, psi=lambda x: np.exp(-x.sum(axis=1)))
    with pytest.raises(CapabilityError):
        frailty.sample_lifetimes(model, 10, seed=0)


# ==================== COMBINAISON ====================

def test_min_combine_of_claytons_is_shared_gamma_two():
    combined = frailty.min_combine(frailty.clayton(2), frailty.clayton(2))
    points = np.array([[0.5, 0.7], [1.0, 2.0], [0.0, 3.0]])
    np.testing.assert_allclose(combined.psi(points), frailty.shared_gamma(2.0, 2).psi(points), atol=1e-12)


def test_min_combine_adds_cross_densities():
    combined = frailty.min_combine(frailty.clayton(2), frailty.invgauss(1.0, 2))
    t = (0.4, 0.6)
    I = IndexSet.full(2)
    expected = frailty.lambda_I(frailty.clayton(2), I, t) + frailty.lambda_I(frailty.invgauss(1.0, 2), I, t)
    assert frailty.lambda_I(combined, I, t) == pytest.approx(expected)


def test_min_combine_rejects_mixed_dimensions():
    with pytest.raises(StructuralError):
        frailty.min_combine(frailty.clayton(2), frailty.clayton(3))


# ==================== COVARIANCE ====================

def test_covariance_estimate_matches_pair_density():
    model = frailty.clayton(2)
    t = (0.5, 0.2)
    estimate = frailty.cov_lambda_ij(model, 1, 2, t, n=100_000, seed=101)
    expected = frailty.lambda_I(model, IndexSet.full(2), t)
    assert abs(estimate.estimate - expected) <= max(1e-5, 4 * estimate.stderr)


def test_tilted_marginal_hazard_matches_clayton():
    estimate = frailty.marginal_hazard_rate_tilted(frailty.clayton(2), 1, 0.5, n=100_000, seed=5)
    assert abs(estimate.estimate - 1 / 1.5) <= 4 * estimate.stderr
    assert not estimate.degenerate


def test_tilted_marginal_hazard_on_second_axis():
    estimate = frailty.marginal_hazard_rate_tilted(frailty.clayton(2), 2, 1.0, n=100_000, seed=6)
    assert abs(estimate.estimate - 0.5) <= 4 * estimate.stderr


# ==================== LOG-NORMALE ====================

LOGNORMAL_SIGMA = GaussianCovariance(sigma=((1.0, 0.3), (0.3, 1.0)))


def test_lognormal_corner_densities():
    model = frailty.lognormal(LOGNORMAL_SIGMA)
    expected_pair = math.exp(1.0) * (math.exp(0.3) - 1.0)
    assert frailty.lambda_I(model, IndexSet.full(2), (0.0, 0.0)) == pytest.approx(expected_pair, rel=1e-10)
    assert frailty.marginal_hazard_rate(model, 1, 0.0) == pytest.approx(math.exp(0.5), rel=1e-10)


def test_lognormal_laplace_transform_matches_monte_carlo():
    model = frailty.lognormal(LOGNORMAL_SIGMA)
    t = np.array([0.4, 0.9])
    n = 200_000
    values = np.exp(-frailty.sample_frailty(model, n, seed=17) @ t)
    bound = 4 * values.std() / math.sqrt(n)
    assert abs(values.mean() - frailty.survival(model, t)) <= bound


@pytest.mark.parametrize("t", [(0.1, 0.2), (0.4, 0.9), (1.5, 0.3)])
def test_lognormal_analytic_lambda_matches_finite_differences(t):
    model = frailty.lognormal(LOGNORMAL_SIGMA)
    for I in IndexSet.full(2).subsets():
        fd = mixed_partial_log(model, I, t)
        assert frailty.lambda_I(model, I, t) == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_lognormal_rejects_dimension_above_three():
    sigma = tuple(tuple(1.0 if i == j else 0.0 for j in range(4)) for i in range(4))
    with pytest.raises(CapabilityError):
        frailty.lognormal(GaussianCovariance(sigma=sigma))


# ==================== MASSE DE LA DENSITÉ ====================

@pytest.mark.parametrize(
    ("model", "low"),
    [(frailty.clayton(2), 0.0), (frailty.shared_gamma(2.0, 2), 0.0), (frailty.invgauss(1.0, 2), 0.5)],
    ids=["clayton", "shared_gamma", "invgauss"],
)
def test_density_integrates_to_box_mass(model, low):
    high = 60.0
    mass, _ = dblquad(lambda y, x: frailty.density(model, (x, y)), low, high, low, high)
    expected = (
        frailty.survival(model, (low, low))
        - frailty.survival(model, (high, low))
        - frailty.survival(model, (low, high))
        + frailty.survival(model, (high, high))
    )
    assert mass == pytest.approx(expected, abs=1e-3)
