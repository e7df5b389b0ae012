import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.core import minid
from app.core.exceptions import DomainError
from app.core.lattice import exponent_of_parts, factorize
from app.models.lattice import GridSpec, IndexSet
from app.models.minid import DiscreteExponentMeasure, MinIdAtom

THREE_ATOMS = DiscreteExponentMeasure(
    d=2,
    atoms=(
        MinIdAtom(w=0.4, p=(0.3, 1.0)),
        MinIdAtom(w=0.5, p=(1.0, 0.6)),
        MinIdAtom(w=0.2, p=(0.5, 0.5)),
    ),
)


def random_measure(rng, d: int, atoms: int, boundary: bool = False) -> DiscreteExponentMeasure:
    out = []
    while len(out) < atoms:
        p = np.ceil(rng.uniform(0.0, 1.0, d) * 10) / 10
        p[rng.uniform(size=d) < 0.3] = 1.0
        if np.all(p == 1.0):
            continue
        out.append(MinIdAtom(w=float(rng.uniform(0.05, 1.0)), p=tuple(float(v) for v in p)))
    return DiscreteExponentMeasure(d=d, atoms=tuple(out), uniform_margin_boundary=boundary)


# ==================== MESURES ====================

def test_atom_at_upper_corner_is_rejected():
    with pytest.raises(ValidationError):
        MinIdAtom(w=1.0, p=(1.0, 1.0))


def test_atom_outside_cube_is_rejected():
    with pytest.raises(ValidationError):
        MinIdAtom(w=1.0, p=(0.5, 1.5))


def test_atom_dimension_must_match():
    with pytest.raises(ValidationError):
        DiscreteExponentMeasure(d=3, atoms=(MinIdAtom(w=1.0, p=(0.5, 0.5)),))


# ==================== SURVIE ====================

def test_three_atom_survival():
    x = (0.4, 0.4)
    assert minid.survival_from_mu(THREE_ATOMS, x) == pytest.approx(math.exp(-0.4), abs=1e-14)
    assert minid.survival_incl_excl(THREE_ATOMS, x) == pytest.approx(math.exp(-0.4), abs=1e-14)


def test_three_atom_pair_exponent():
    grid = GridSpec((np.array([0.0, 0.6]),) * 2, "unit")
    table = exponent_of_parts(factorize(minid.exponent_measure_oracle(THREE_ATOMS), IndexSet.full(2), grid))
    assert table.exponent(IndexSet.full(2))[1, 1] == pytest.approx(0.2, abs=1e-14)


def test_survival_is_one_at_origin_without_boundary():
    assert minid.survival_from_mu(THREE_ATOMS, (0.0, 0.0)) == pytest.approx(1.0)


def test_boundary_gives_uniform_margins():
    mu = DiscreteExponentMeasure(d=2, uniform_margin_boundary=True)
    assert minid.survival_from_mu(mu, (0.3, 0.5)) == pytest.approx(0.7 * 0.5)
    assert minid.is_copula(mu)
    assert not minid.is_copula(THREE_ATOMS)


def test_points_outside_cube_are_rejected():
    with pytest.raises(DomainError):
        minid.survival_from_mu(THREE_ATOMS, (0.5, 1.0))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_survival_routes_agree(d):
    rng = np.random.default_rng(13 + d)
    mu = random_measure(rng, d, 10)
    x = rng.uniform(0.0, 0.999, (100, d))
    np.testing.assert_allclose(minid.survival_from_mu(mu, x), minid.survival_incl_excl(mu, x), atol=1e-14)


# ==================== IDENTIFICATION ====================

@pytest.mark.parametrize("d,boundary", [(2, False), (3, True), (4, False)])
def test_exponents_identify_projections(d, boundary):
    mu = random_measure(np.random.default_rng(31 + d), d, 12, boundary)
    grid = GridSpec.unit_cube(d, 6)
    for I in IndexSet.full(d).subsets():
        assert minid.identify_Lambda(mu, I, grid) <= 1e-10


def test_projection_drops_atoms_at_one():
    projected = minid.project_measure(THREE_ATOMS, IndexSet.of(2, 1))
    assert projected.d == 1
    assert [a.p for a in projected.atoms] == [(0.3,), (0.5,)]


# ==================== INDÉPENDANCE ====================

def test_face_atoms_give_full_independence():
    face_only = DiscreteExponentMeasure(
        d=3,
        atoms=(MinIdAtom(w=0.5, p=(0.2, 1.0, 1.0)), MinIdAtom(w=0.3, p=(1.0, 1.0, 0.4))),
        uniform_margin_boundary=True,
    )
    report = minid.independence_report(face_only)
    assert report.pairwise_zero and report.all_zero and report.implication_holds


def test_interior_atom_breaks_pair_independence():
    report = minid.independence_report(THREE_ATOMS)
    assert report.vanishing == {"{1,2}": False}
    assert not report.pairwise_zero
    assert report.implication_holds


def test_pairwise_independence_implies_full_independence():
    rng = np.random.default_rng(17)
    for _ in range(20):
        assert minid.independence_report(random_measure(rng, 3, int(rng.integers(1, 8)))).implication_holds


@pytest.mark.parametrize("n", [1, 2, 5])
def test_nth_root_is_survival(n):
    mu = random_measure(np.random.default_rng(19), 2, 8, boundary=True)
    assert minid.root_is_survival(mu, n)
