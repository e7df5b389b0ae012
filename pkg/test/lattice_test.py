import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st

from app.core import frailty
from app.core.exceptions import DomainError, StructuralError
from app.core.lattice import (
    exponent_of_parts,
    factorize,
    is_survival_function,
    mixed_partial_log,
    recompose,
    rectangle_increments,
    univariate_hazard,
)
from app.models.lattice import GridSpec, IndexSet, PartTable, SurvivalOracle, nonempty_subsets


# ==================== ENSEMBLES D'INDICES ====================

def test_index_set_members_and_str():
    I = IndexSet.of(4, 3, 1)
    assert I.members == (1, 3)
    assert I.axes == (0, 2)
    assert I.size == 2
    assert str(I) == "{1,3}"


def test_index_set_rejects_out_of_range():
    with pytest.raises(StructuralError):
        IndexSet.of(2, 3)
    with pytest.raises(StructuralError):
        IndexSet.parse("1,x", 3)


def test_index_set_parse_accepts_braces():
    assert IndexSet.parse("{1,2}", 3) == IndexSet.of(3, 1, 2)


def test_subsets_are_ordered_by_size():
    subsets = IndexSet.full(3).subsets()
    assert len(subsets) == 7
    assert [s.size for s in subsets] == [1, 1, 1, 2, 2, 2, 3]
    assert len(nonempty_subsets(4)) == 15


def test_embed_fills_missing_axes():
    I = IndexSet.of(3, 2)
    np.testing.assert_array_equal(I.embed(np.array([[5.0]]), 1.0), [[1.0, 5.0, 1.0]])


# ==================== GRILLES ====================

def test_grid_rejects_non_increasing_axis():
    with pytest.raises(StructuralError):
        GridSpec((np.array([0.0, 0.5, 0.5]),))


def test_unit_grid_stops_before_one():
    with pytest.raises(DomainError):
        GridSpec((np.array([0.0, 1.0]),), "unit", 1e-3)


def test_part_table_is_read_only():
    grid = GridSpec((np.array([0.0, 1.0]),))
    table = PartTable(grid, IndexSet.full(1), "exponent", {IndexSet.full(1): np.array([0.0, 1.0])})
    with pytest.raises(ValueError):
        table.exponent(IndexSet.full(1))[0] = 3.0
    with pytest.raises(StructuralError):
        table.exponent(IndexSet.of(1))


# ==================== FACTORISATION ====================

def test_clayton_pair_exponent_at_one():
    axis = np.array([0.5, 1.0])
    parts = factorize(frailty.clayton(2).oracle(), IndexSet.full(2), GridSpec((axis, axis)))
    value = exponent_of_parts(parts).exponent(IndexSet.full(2))[1, 1]
    assert value == pytest.approx(math.log(4 / 3), abs=1e-10)


def test_clayton_parts_at_one():
    axis = np.array([0.5, 1.0])
    parts = factorize(frailty.clayton(2).oracle(), IndexSet.full(2), GridSpec((axis, axis)))
    assert parts.part(IndexSet.of(2, 1))[1] == pytest.approx(0.5, abs=1e-12)
    assert parts.part(IndexSet.full(2))[1, 1] == pytest.approx(4 / 3, abs=1e-12)


@pytest.mark.parametrize("model", [
    frailty.clayton(3),
    frailty.shared_gamma(2.0, 3),
    frailty.invgauss(1.0, 2),
    frailty.degenerate(3),
], ids=lambda m: f"{m.name}-{m.d}")
def test_recompose_returns_survival(model):
    grid = GridSpec.uniform(model.d, 7, 2.0)
    J = IndexSet.full(model.d)
    oracle = model.oracle()
    rebuilt = recompose(factorize(oracle, J, grid), J)
    np.testing.assert_allclose(rebuilt, oracle(grid.points()).reshape(grid.shape), rtol=0, atol=1e-12)


def test_independence_has_no_dependence_parts():
    J = IndexSet.full(3)
    parts = factorize(frailty.degenerate(3).oracle(), J, GridSpec.uniform(3, 5, 1.0))
    for I in J.subsets():
        if I.size >= 2:
            np.testing.assert_allclose(parts.part(I), 1.0, atol=1e-12)


def test_factorize_rejects_vanishing_survival():
    zero = SurvivalOracle(d=2, evaluator=lambda x: np.zeros(x.shape[0]))
    with pytest.raises(DomainError):
        factorize(zero, IndexSet.full(2), GridSpec.uniform(2, 3, 1.0))


# ==================== DIFFÉRENCES FINIES ====================

def test_clayton_pair_density_near_corner():
    t = 1e-6
    value = mixed_partial_log(frailty.clayton(2), IndexSet.full(2), (t, t))
    assert value == pytest.approx(1.0 / (1 + 2 * t) ** 2, abs=1e-5)


def test_independence_triple_density_vanishes():
    assert abs(mixed_partial_log(frailty.degenerate(3), IndexSet.full(3), (0.5, 0.7, 0.9))) <= 1e-8


def test_cumulative_hazard_of_exponential():
    assert univariate_hazard(lambda t: math.exp(-2.0 * t), 0.7) == pytest.approx(1.4, rel=1e-12)
    with pytest.raises(DomainError):
        univariate_hazard(lambda t: 0.0, 1.0)


@hsettings(max_examples=25, deadline=None)
@given(st.floats(0.05, 3.0), st.floats(0.05, 3.0))
def test_clayton_pair_density_matches_closed_form(t1, t2):
    value = mixed_partial_log(frailty.clayton(2), IndexSet.full(2), (t1, t2))
    assert value == pytest.approx(1.0 / (1 + t1 + t2) ** 2, rel=1e-5, abs=1e-6)


def test_rectangle_increments_of_survival():
    axis = np.linspace(0.0, 2.0, 6)
    grid = GridSpec((axis, axis))
    values = frailty.clayton(2).oracle()(grid.points()).reshape(grid.shape)
    assert np.all(rectangle_increments(values) >= -1e-12)
    assert is_survival_function(values)
    assert not is_survival_function(-values)
