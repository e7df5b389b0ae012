"""
Mesures d'exposant des lois min-infiniment divisibles sur le cube unité

S(x) = exp(-μ((x, 1]^C)), (x, 1] = ∏ (x_i, 1]. Un atome dont une
coordonnée vaut exactement x_i est compté dans le complémentaire.
"""

import numpy as np

from app.core.exceptions import DomainError, StructuralError
from app.core.lattice import exponent_of_parts, factorize, is_survival_function
from app.core.logging import get_logger
from app.models.lattice import GridSpec, IndexSet, SurvivalOracle
from app.models.minid import DiscreteExponentMeasure, IndependenceReport, MinIdAtom

logger = get_logger("minid")


def _cube_points(mu: DiscreteExponentMeasure, x) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 1
    points = np.atleast_2d(x)
    if points.shape[-1] != mu.d:
        raise StructuralError(f"Point de dimension {points.shape[-1]}, attendu {mu.d}")
    bad = ~np.isfinite(points) | (points < 0) | (points >= 1)
    if np.any(bad):
        where = points[np.argmax(bad.any(axis=-1))]
        raise DomainError("Point hors de [0,1)^d", point=where)
    return points, scalar


def _boundary(mu: DiscreteExponentMeasure, points: np.ndarray) -> np.ndarray:
    if not mu.uniform_margin_boundary:
        return np.zeros(points.shape[0])
    return -np.log1p(-points).sum(axis=1)


def exponent_from_mu(mu: DiscreteExponentMeasure, x):
    """μ((x, 1]^C) par test d'appartenance direct"""
    points, scalar = _cube_points(mu, x)
    value = _boundary(mu, points)
    if mu.atoms:
        # atome dans (x, 1] ssi p_k > x composante par composante
        inside = np.all(mu.locations[None, :, :] > points[:, None, :], axis=2)
        value = value + (~inside).astype(float) @ mu.weights
    return float(value[0]) if scalar else value


def survival_from_mu(mu: DiscreteExponentMeasure, x):
    """S(x) = exp(-[bord] - Σ_{k: p_k ∉ (x,1]} w_k)"""
    value = np.exp(-np.asarray(exponent_from_mu(mu, x)))
    return float(value) if value.ndim == 0 else value


def survival_incl_excl(mu: DiscreteExponentMeasure, x):
    """
    Route indépendante : μ((x,1]^C) = Σ_{∅≠J} (-1)^{|J|+1} μ_J(∏_{j∈J} [0, x_j])

    La partie de bord ne charge que les projections de cardinal 1.
    """
    points, scalar = _cube_points(mu, x)
    value = _boundary(mu, points)
    if mu.atoms:
        below = mu.locations[None, :, :] <= points[:, None, :]
        coefficient = np.zeros(below.shape[:2], dtype=np.int64)
        for J in IndexSet.full(mu.d).subsets():
            hit = np.all(below[:, :, list(J.axes)], axis=2)
            coefficient += (1 if J.size % 2 else -1) * hit.astype(np.int64)
        value = value + coefficient.astype(float) @ mu.weights
    value = np.exp(-value)
    return float(value[0]) if scalar else value


def project_measure(mu: DiscreteExponentMeasure, I: IndexSet) -> DiscreteExponentMeasure:
    """
    μ_I : image par π_I de μ restreinte hors de π_I^{-1}({1})

    Les atomes dont la projection vaut (1,...,1) sont supprimés ; la partie
    de bord est conservée.
    """
    I.require_nonempty()
    if I.d != mu.d:
        raise StructuralError(f"{I} incompatible avec la dimension {mu.d}")
    axes = list(I.axes)
    atoms = tuple(
        MinIdAtom(w=a.w, p=tuple(a.p[k] for k in axes))
        for a in mu.atoms
        if any(a.p[k] < 1 for k in axes)
    )
    return DiscreteExponentMeasure(
        d=I.size, atoms=atoms, uniform_margin_boundary=mu.uniform_margin_boundary
    )


def exponent_measure_oracle(mu: DiscreteExponentMeasure) -> SurvivalOracle:
    """Oracle de survie ; les marges sont les projections de μ"""
    return SurvivalOracle(
        d=mu.d,
        evaluator=lambda x: np.exp(-exponent_from_mu(mu, x)),
        log_evaluator=lambda x: -exponent_from_mu(mu, x),
        lower=np.zeros(mu.d),
        upper=np.ones(mu.d),
        marginalizer=lambda J: exponent_measure_oracle(project_measure(mu, J)),
        name="minid",
    )


def projected_box_mass(mu: DiscreteExponentMeasure, I: IndexSet, x) -> np.ndarray:
    """μ_I(∏_{i∈I} [0, x_i]) sur [0,1)^{|I|}, partie de bord comprise si |I| = 1"""
    proj = project_measure(mu, I)
    points = np.atleast_2d(np.asarray(x, dtype=float))
    value = np.zeros(points.shape[0])
    if proj.atoms:
        below = np.all(proj.locations[None, :, :] <= points[:, None, :], axis=2)
        value = below.astype(float) @ proj.weights
    if I.size == 1 and mu.uniform_margin_boundary:
        value = value - np.log1p(-points[:, 0])
    return value


def identify_Lambda(mu: DiscreteExponentMeasure, I: IndexSet, grid: GridSpec) -> float:
    """
    Écart maximal entre Λ_I obtenu par factorisation de S et la masse
    cumulée de la projection μ_I sur la grille

    Returns:
        float: sup |Λ_I - μ_I| (attendu <= 1e-10)
    """
    I.require_nonempty()
    oracle = exponent_measure_oracle(mu)
    exponents = exponent_of_parts(factorize(oracle, I, grid))
    lam = exponents.exponent(I)
    sub = exponents.grid.restrict(I)
    expected = projected_box_mass(mu, I, sub.points()).reshape(sub.shape)
    discrepancy = float(np.max(np.abs(lam - expected)))
    logger.debug("identification Λ_%s : écart %.3e", I, discrepancy)
    return discrepancy


def is_copula(mu: DiscreteExponentMeasure, probe=(0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99), tol: float = 1e-12) -> bool:
    """Marges uniformes : S_i(x) = 1 - x sur les points de sonde"""
    x = np.asarray(probe, dtype=float)[:, None]
    for i in range(1, mu.d + 1):
        margin = project_measure(mu, IndexSet.of(mu.d, i))
        if np.max(np.abs(survival_from_mu(margin, x) - (1 - x[:, 0]))) > tol:
            return False
    return True


def independence_report(mu: DiscreteExponentMeasure) -> IndependenceReport:
    """
    Λ_I ≡ 0 ssi la projection μ_I ne charge pas [0,1)^{|I|}

    Vérifie l'implication : paires nulles ⇒ tous les ordres nuls.
    """
    vanishing = {}
    for I in IndexSet.full(mu.d).subsets():
        if I.size < 2:
            continue
        proj = project_measure(mu, I)
        interior = bool(proj.atoms) and bool(np.any(np.all(proj.locations < 1, axis=1)))
        vanishing[str(I)] = not interior
    pairs = [v for key, v in vanishing.items() if key.count(",") == 1]
    pairwise_zero = all(pairs)
    all_zero = all(vanishing.values())
    return IndependenceReport(
        vanishing=vanishing,
        pairwise_zero=pairwise_zero,
        all_zero=all_zero,
        implication_holds=(not pairwise_zero) or all_zero,
        copula=is_copula(mu),
    )


def root_is_survival(mu: DiscreteExponentMeasure, n: int, nodes: int = 11, delta: float = 1e-3, tol: float = 1e-12) -> bool:
    """S^{1/n} est une fonction de survie sur une grille nodes^d de [0, 1-δ]^d"""
    grid = GridSpec.unit_cube(mu.d, nodes, delta)
    values = np.exp(-exponent_from_mu(mu, grid.points()) / n).reshape(grid.shape)
    return is_survival_function(values, tol)
