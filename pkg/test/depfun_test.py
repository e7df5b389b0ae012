import math

import numpy as np
import pytest

from app.core import depfun, frailty
from app.core.exceptions import CapabilityError, DomainError, StructuralError
from app.core.lattice import exponent_of_parts, factorize
from app.models.chisq import GaussianCovariance, TrivariateChiSqParams
from app.models.depfun import MarginalSpec, exponential, lomax, weibull
from app.models.lattice import GridSpec, IndexSet


def chisq3_with_rho2(rho2: float):
    rho = math.sqrt(rho2)
    return frailty.chisq3(TrivariateChiSqParams(sigma=((1.0, rho, 0.0), (rho, 1.0, 0.0), (0.0, 0.0, 1.0))))


# ==================== FORMES CLOSES ====================

def test_clayton_gamma_values():
    model = frailty.clayton(2)
    assert depfun.gamma_0I(model, None, (0.5, 0.5)) == pytest.approx(4 / 9, abs=1e-10)
    assert depfun.gamma_0I(model, None, (0.0, 0.0)) == pytest.approx(1.0, abs=1e-10)
    assert depfun.exp_margin_gamma(model, IndexSet.full(2), (math.log(2), math.log(2))) == pytest.approx(4 / 9, abs=1e-10)


@pytest.mark.parametrize("rho2", [0.9, 0.5, 0.1])
def test_chisq_gamma_at_origin_is_twice_rho_squared(rho2):
    value = depfun.gamma_0I(chisq3_with_rho2(rho2), None, (0.0, 0.0), IndexSet.of(3, 1, 2))
    assert value == pytest.approx(2 * rho2, abs=1e-10)


def test_prop_gamma_is_constant():
    grid = depfun.gamma_grid(depfun.prop_model(0.7), resolution=21)
    assert np.all(grid.values == -0.7)
    assert grid.provenance == "closed-form"


def test_prop_survival_with_exponential_margins():
    value = depfun.prop_survival(MarginalSpec.repeat(exponential(), 2), 0.5, (1.0, 1.0))
    assert value == pytest.approx(math.exp(-2.5), abs=1e-10)


def test_prop_rejects_beta_above_one():
    with pytest.raises(DomainError):
        depfun.catalog_gamma0("prop", {"beta": 1.5}, 0.5, 0.5)


def test_frank_rejects_zero_theta():
    with pytest.raises(DomainError):
        depfun.catalog_gamma0("frank", {"theta": 0.0}, 0.5, 0.5)


def test_unknown_closed_form_is_a_capability_error():
    with pytest.raises(CapabilityError):
        depfun.catalog_gamma0("lognormal", {}, 0.5, 0.5)


# ==================== ROUTES ====================

@pytest.mark.parametrize("model", [
    frailty.clayton(2),
    depfun.frank_model(-5.0),
    depfun.frank_model(2.0),
    depfun.frank_model(10.0),
    frailty.invgauss(1.0, 2),
    depfun.prop_model(1.0),
], ids=lambda m: m.name)
def test_closed_form_matches_finite_differences(model):
    axis = np.linspace(0.05, 0.95, 7)
    u = np.stack([m.ravel() for m in np.meshgrid(axis, axis, indexing="ij")], axis=-1)
    closed = depfun.gamma_0I(model, None, u, route="closed-form")
    fd = depfun.gamma_0I(model, None, u, route="fd")
    np.testing.assert_allclose(closed, fd, atol=1e-4)


def test_chisq_closed_form_matches_analytic_route():
    model = chisq3_with_rho2(0.5)
    u = np.array([[0.1, 0.2], [0.5, 0.5], [0.9, 0.3]])
    I = IndexSet.of(3, 1, 2)
    closed = depfun.gamma_0I(model, None, u, I, route="closed-form")
    analytic = depfun.gamma_0I(model, None, u, I, route="analytic")
    np.testing.assert_allclose(closed, analytic, atol=1e-8)


def scaled_chisq3(scales, rho12: float = 0.5, rho13: float = 0.4, rho23: float = 0.3):
    rho = np.array([[1.0, rho12, rho13], [rho12, 1.0, rho23], [rho13, rho23, 1.0]])
    s = np.asarray(scales, dtype=float)
    sigma = rho * np.outer(s, s)
    return frailty.chisq3(TrivariateChiSqParams(sigma=tuple(tuple(float(v) for v in row) for row in sigma)))


@pytest.mark.parametrize("pair", [(1, 2), (1, 3), (2, 3)])
def test_chisq_gamma_depends_only_on_correlations(pair):
    unit = scaled_chisq3((1.0, 1.0, 1.0))
    scaled = scaled_chisq3((2.0, 0.5, 1.5))
    I = IndexSet.of(3, *pair)
    u = np.array([[0.05, 0.1], [0.3, 0.7], [0.5, 0.5], [0.9, 0.2]])
    np.testing.assert_allclose(
        depfun.gamma_0I(scaled, None, u, I, route="analytic"),
        depfun.gamma_0I(unit, None, u, I, route="analytic"),
        atol=1e-8,
    )


def test_chisq_survival_copula_depends_only_on_correlations():
    unit = scaled_chisq3((1.0, 1.0, 1.0))
    scaled = scaled_chisq3((2.0, 0.5, 1.5))
    w = np.array([[0.2, 0.5, 0.9], [0.7, 0.7, 0.7], [0.95, 0.1, 0.4]])
    np.testing.assert_allclose(
        depfun.survival_copula(scaled, scaled.marginals, w),
        depfun.survival_copula(unit, unit.marginals, w),
        atol=1e-10,
    )


def test_unknown_route_is_rejected():
    with pytest.raises(StructuralError):
        depfun.gamma_0I(frailty.clayton(2), None, (0.5, 0.5), route="spline")


def test_copula_coordinates_must_stay_below_one_minus_delta():
    with pytest.raises(DomainError):
        depfun.gamma_0I(frailty.clayton(2), None, (0.5, 0.9999), delta=1e-3)


def test_closed_form_route_without_formula_raises():
    model = frailty.lognormal(GaussianCovariance(sigma=((1.0, 0.3), (0.3, 1.0))))
    with pytest.raises(CapabilityError):
        depfun.gamma_0I(model, None, (0.5, 0.5), route="closed-form")


# ==================== INVARIANCES ====================

def test_invgauss_gamma_does_not_depend_on_theta():
    grids = [depfun.gamma_grid(frailty.invgauss(theta, 2), resolution=11).values for theta in (0.5, 1.0, 3.0)]
    finite = ~np.isnan(grids[0])
    for values in grids[1:]:
        np.testing.assert_allclose(values[finite], grids[0][finite], atol=1e-10)


def test_invgauss_origin_is_masked():
    grid = depfun.gamma_grid(frailty.invgauss(1.0, 2), resolution=11)
    assert grid.masked == ((0, 0),)
    assert np.isnan(grid.values[0, 0])


@pytest.mark.parametrize("target", [
    MarginalSpec.repeat(weibull(2.0, 1.5), 2),
    MarginalSpec((lomax(3.0, 2.0), exponential(0.5))),
], ids=["weibull", "mixed"])
def test_gamma_is_invariant_under_remarginalization(target):
    base = frailty.clayton(2)
    u = np.random.default_rng(23).uniform(0.05, 0.9, (20, 2))
    closed = depfun.gamma_0I(base, None, u, route="closed-form")
    moved = depfun.gamma_0I(depfun.remarginalize(base, target), None, u, route="analytic")
    np.testing.assert_allclose(moved, closed, atol=1e-6)


def test_multi_prop_has_no_higher_order_exponent():
    pairs = {(1, 2): 0.25, (1, 3): 0.25, (2, 3): 0.25}
    model = depfun.multi_prop_model(pairs, 3)
    J = IndexSet.full(3)
    table = exponent_of_parts(factorize(model.oracle(), J, GridSpec.uniform(3, 7, 2.0)))
    np.testing.assert_allclose(table.exponent(J), 0.0, atol=1e-8)


def test_copula_scale_survival_of_clayton():
    model = frailty.clayton(2)
    assert depfun.copula_scale_survival(model, model.marginals, (0.5, 0.5)) == pytest.approx(1 / 3, abs=1e-10)


# ==================== GRILLES ====================

def test_gamma_grid_shape_and_axis():
    grid = depfun.gamma_grid(frailty.clayton(2), resolution=5, delta=0.2)
    assert grid.values.shape == (5, 5)
    np.testing.assert_allclose(grid.axes[0], [0.0, 0.2, 0.4, 0.6, 0.8])
    assert str(grid.I) == "{1,2}"


def test_gamma_grid_rejects_pair_outside_dimension():
    with pytest.raises(CapabilityError):
        depfun.gamma_grid(frailty.clayton(2), pair=(1, 3), resolution=5)
