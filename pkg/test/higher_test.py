import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from app.core import higher
from app.core.exceptions import DomainError, StructuralError
from app.core.lattice import exponent_of_parts, factorize
from app.models.lattice import GridSpec, IndexSet
from app.models.score import GridFactor, PolynomialFactor, ScoreFunction, ScoreTerm, TransformedScore


def product_score(d: int, coef: float = 1.0) -> ScoreFunction:
    return ScoreFunction((ScoreTerm(coef, tuple(PolynomialFactor(1) for _ in range(d))),))


# ==================== COMPOSANTES ====================

def test_even_degree_requires_plain_legendre():
    with pytest.raises(DomainError):
        PolynomialFactor(2)
    assert PolynomialFactor(2, "legendre")(0.5) == pytest.approx(-0.5)


def test_grid_factor_must_integrate_to_zero():
    with pytest.raises(DomainError):
        GridFactor(tuple(np.linspace(0.0, 1.0, 11)))


def test_score_terms_share_dimension():
    with pytest.raises(StructuralError):
        ScoreFunction((
            ScoreTerm(1.0, (PolynomialFactor(1),)),
            ScoreTerm(1.0, (PolynomialFactor(1), PolynomialFactor(1))),
        ))


# ==================== ISOMÉTRIE ====================

def test_transform_of_linear_factor():
    x = np.linspace(0.01, 0.99, 99)
    np.testing.assert_allclose(higher.R_univ(PolynomialFactor(1), x), x - 1, atol=1e-12)


def test_transform_of_spline_factor_matches_polynomial():
    factor = GridFactor(tuple(2 * np.linspace(0.0, 1.0, 11) - 1))
    x = np.linspace(0.05, 0.95, 19)
    np.testing.assert_allclose(higher.R_univ(factor, x), x - 1, atol=1e-9)


def test_transform_is_undefined_at_one():
    with pytest.raises(DomainError):
        higher.R_univ(PolynomialFactor(1), 1.0)


def test_norm_of_first_legendre_factor():
    g = ScoreFunction((ScoreTerm(1.0, (PolynomialFactor(1),)),))
    assert higher.score_norm(g) == pytest.approx(1 / math.sqrt(3), abs=1e-8)


@pytest.mark.parametrize("degree", [1, 3, 5, 7])
def test_isometry_for_odd_legendre(degree):
    g = ScoreFunction((ScoreTerm(1.0, (PolynomialFactor(degree), PolynomialFactor(1))),))
    assert higher.isometry_defect(g) <= 1e-6


def test_isometry_for_sum_of_terms():
    g = ScoreFunction((
        ScoreTerm(1.0, (PolynomialFactor(1), PolynomialFactor(3))),
        ScoreTerm(0.5, (PolynomialFactor(5), PolynomialFactor(1))),
    ))
    assert higher.isometry_defect(g) <= 1e-6


def test_R_d_is_multiplicative():
    g = product_score(2, 2.0)
    x = np.array([[0.2, 0.7], [0.5, 0.5]])
    np.testing.assert_allclose(higher.R_d_apply(g, x), 2.0 * (x[:, 0] - 1) * (x[:, 1] - 1), atol=1e-12)


# ==================== PARTS DE DÉPENDANCE ====================

def test_dependence_part_routes_agree():
    g = product_score(2)
    x = np.array([[0.5, 0.5], [0.2, 0.7], [0.9, 0.1]])
    expected = 1 + x[:, 0] * x[:, 1]
    np.testing.assert_allclose(higher.S_dep_from_score(g, x), expected, atol=1e-12)
    np.testing.assert_allclose(higher.S_dep_from_gamma(TransformedScore(g), x), expected, atol=1e-8)
    np.testing.assert_allclose(higher.copula_family(g, 1.0).dependence_part(x), expected, atol=1e-12)


def test_generic_gamma_uses_tensor_quadrature():
    g = product_score(2)
    transformed = TransformedScore(g)
    x = np.array([[0.3, 0.6], [0.8, 0.4]])
    generic = higher.S_dep_from_gamma(lambda u: transformed(u), x)
    np.testing.assert_allclose(generic, 1 + x[:, 0] * x[:, 1], atol=1e-6)


@hsettings(max_examples=20, deadline=None)
@given(st.floats(0.01, 0.95), st.floats(0.01, 0.95), st.floats(0.01, 0.95))
def test_lemma_identity_in_three_dimensions(x1, x2, x3):
    g = ScoreFunction((ScoreTerm(0.7, (PolynomialFactor(1), PolynomialFactor(3), PolynomialFactor(1))),))
    assert higher.lemma_identity_defect(g, [[x1, x2, x3]]) <= 1e-7


# ==================== COPULES ====================

def test_copula_rejects_negative_density():
    with pytest.raises(DomainError):
        higher.copula_family(product_score(2, 2.0), 1.0)
    with pytest.raises(DomainError):
        higher.copula_family(product_score(2), 1.5)


def test_copula_margins_are_uniform():
    copula = higher.copula_family(product_score(2), 0.8)
    u = np.linspace(0.0, 0.95, 11)
    np.testing.assert_allclose(copula.survival(np.column_stack([u, np.zeros_like(u)])), 1 - u, atol=1e-12)


def test_proper_margins_of_copula_are_independent():
    copula = higher.copula_family(product_score(3), 1.0)
    J = IndexSet.full(3)
    table = exponent_of_parts(factorize(copula.oracle(), J, GridSpec.unit_cube(3, 9)))
    for I in J.subsets():
        if I.size == 2:
            np.testing.assert_allclose(table.exponent(I), 0.0, atol=1e-8)
    assert np.max(np.abs(table.exponent(J))) > 1e-3


def test_conditions_accept_fgm_density():
    verdict = higher.check_conditions(lambda x: 1 + 0.5 * (2 * x[:, 0] - 1) * (2 * x[:, 1] - 1), d=2)
    assert verdict.holds
    assert verdict.proper_marginals_independent
    assert verdict.integral == pytest.approx(1.0, abs=1e-6)


def test_conditions_reject_non_vanishing_margin():
    verdict = higher.check_conditions(lambda x: 1 + 0.5 * (2 * x[:, 0] - 1), d=2)
    assert not verdict.holds
    assert not verdict.axis_integrals_vanish


def test_conditions_require_a_density():
    with pytest.raises(DomainError):
        higher.check_conditions(np.full((11, 11), 2.0))


def test_first_order_remainder_shrinks_with_theta():
    g = product_score(2)
    x = np.array([[0.2, 0.3], [0.5, 0.5], [0.9, 0.8]])
    sizes = [float(np.max(np.abs(higher.first_order_remainder(g, theta, x)))) for theta in (0.1, 0.05, 0.025)]
    assert sizes[0] > sizes[1] > sizes[2]
