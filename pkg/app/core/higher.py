"""
Dépendance d'ordre maximal

Isométrie R(g)(x) = g(x) - ∫ₓ¹ g(u) du / (1 - x), son extension
multiplicative R_d, les copules f_θ = 1 + θg dont toutes les marges
propres sont d'indépendance, et le développement au premier ordre de
leur part de dépendance S_{I₀,θ}.
"""

import itertools
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import simpson

from app.config.settings import settings
from app.core.exceptions import DomainError, NumericError, StructuralError
from app.core.logging import get_logger
from app.models.score import (
    ConditionVerdict,
    Factor,
    ScoreCopula,
    ScoreFunction,
    TransformedScore,
)
from app.utils.quadrature import simpson_interval, simpson_unit, unit_nodes

logger = get_logger("higher")

DENSITY_TOL = 1e-6
NONNEGATIVE_TOL = 1e-9


def _interior(x, d: Optional[int] = None) -> tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=float)
    if d is not None:
        scalar = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[-1] != d:
            raise StructuralError(f"Point de dimension {x.shape[-1]}, attendu {d}")
    else:
        scalar = x.ndim == 0
    if np.any(~np.isfinite(x)) or np.any(x < 0) or np.any(x >= 1):
        raise DomainError("Point hors de [0, 1) (R n'est pas défini en 1)")
    return x, scalar


def _out(values, scalar: bool):
    values = np.asarray(values, dtype=float)
    return float(values.reshape(-1)[0]) if scalar else values


# ==================== ISOMÉTRIE ====================

def R_univ(g_i: Factor, x):
    """
    R(g)(x) = g(x) - ∫ₓ¹ g(u) du / (1 - x)

    Exemple : R(2x - 1)(x) = x - 1.
    """
    x, scalar = _interior(x)
    return _out(g_i.transformed(x), scalar)


def R_d_apply(g: ScoreFunction, x):
    """R_d(g)(x) = Σ coef ∏ R(g_k)(x_k)"""
    x, scalar = _interior(x, g.d)
    return _out(TransformedScore(g)(x), scalar)


def _gram(g: ScoreFunction, method: str, nodes: Optional[int]) -> float:
    grid = unit_nodes(nodes)
    evaluated = [
        [np.asarray(getattr(f, method)(grid), dtype=float) for f in term.factors]
        for term in g.terms
    ]
    total = 0.0
    for (a, ta), (b, tb) in itertools.product(enumerate(g.terms), repeat=2):
        product = ta.coef * tb.coef
        for fa, fb in zip(evaluated[a], evaluated[b]):
            product *= float(simpson_unit(fa * fb))
        total += product
    return total


def score_norm(g: ScoreFunction, nodes: Optional[int] = None, transformed: bool = False) -> float:
    """‖g‖ (ou ‖R_d(g)‖) dans L₂(P₀^d) par produits scalaires univariés de Simpson"""
    squared = _gram(g, "transformed" if transformed else "__call__", nodes)
    if not np.isfinite(squared):
        raise NumericError("Norme non finie")
    return float(np.sqrt(max(squared, 0.0)))


def isometry_defect(g: ScoreFunction, nodes: Optional[int] = None) -> float:
    """|‖R_d(g)‖ - ‖g‖|"""
    return abs(score_norm(g, nodes, transformed=True) - score_norm(g, nodes))


# ==================== CONDITIONS ====================

def _grid_values(f, d: Optional[int], nodes: Optional[int]) -> np.ndarray:
    if callable(f):
        if d is None:
            raise StructuralError("La dimension est requise pour une densité fonctionnelle")
        axis = unit_nodes(nodes or settings.inf_grid_nodes)
        mesh = np.meshgrid(*([axis] * d), indexing="ij")
        points = np.stack([m.ravel() for m in mesh], axis=-1)
        return np.asarray(f(points), dtype=float).reshape(mesh[0].shape)
    return np.asarray(f, dtype=float)


def check_conditions(f: Union[np.ndarray, Callable], d: Optional[int] = None, nodes: Optional[int] = None) -> ConditionVerdict:
    """
    Vérifie que g = f - 1 est à marges nulles et que g >= -1, ce qui équivaut
    à ce que toutes les marges propres de la copule de densité f soient des
    copules d'indépendance

    Args:
        f: valeurs sur une grille uniforme inclusive de [0,1]^d, ou fonction vectorisée
        d: dimension (requise si f est une fonction)
        nodes: nœuds par axe pour une fonction

    Raises:
        DomainError: si f n'intègre pas à 1 (pas une densité)
    """
    values = _grid_values(f, d, nodes)
    if values.ndim < 2:
        raise StructuralError("Densité de dimension >= 2 attendue")
    if not np.all(np.isfinite(values)):
        raise NumericError("Valeurs de densité non finies")
    integral = values
    for axis in reversed(range(values.ndim)):
        integral = simpson_unit(integral, axis=axis)
    integral = float(integral)
    if abs(integral - 1.0) > DENSITY_TOL:
        raise DomainError(f"f n'est pas une densité (intégrale {integral:.8f})", integral=integral)

    min_value = float(values.min())
    defect = max(
        float(np.max(np.abs(simpson_unit(values - 1.0, axis=axis))))
        for axis in range(values.ndim)
    )
    nonnegative = min_value >= -NONNEGATIVE_TOL
    vanish = defect <= DENSITY_TOL
    holds = nonnegative and vanish
    logger.debug("conditions : min %.3e, défaut de marge %.3e", min_value, defect)
    return ConditionVerdict(
        holds=holds,
        integral=integral,
        min_value=min_value,
        nonnegative=nonnegative,
        max_axis_defect=defect,
        axis_integrals_vanish=vanish,
        proper_marginals_independent=holds,
    )


def infimum(g: ScoreFunction, nodes: Optional[int] = None) -> float:
    """inf g sur une grille nodes^d de [0,1]^d (nodes réduit en grande dimension)"""
    nodes = nodes or settings.inf_grid_nodes
    nodes = min(nodes, max(3, int(1e7 ** (1.0 / g.d))))
    axis = np.linspace(0.0, 1.0, nodes)
    total = np.zeros((nodes,) * g.d)
    for term in g.terms:
        product = np.array(term.coef)
        for factor in term.factors:
            product = np.multiply.outer(product, np.asarray(factor(axis), dtype=float))
        total = total + product
    return float(total.min())


# ==================== PARTS DE DÉPENDANCE ====================

def _axis_hazard_integral(factor: Factor, x: np.ndarray, nodes: Optional[int]) -> np.ndarray:
    """∫₀ˣ R(f)(u) du/(1-u) = ∫₀^{-log(1-x)} R(f)(1 - e^{-v}) dv"""
    upper = -np.log1p(-x)
    return simpson_interval(lambda v: factor.transformed(-np.expm1(-v)), upper, nodes)


def _tensor_hazard_integral(gamma: Callable, x: np.ndarray, nodes: int) -> np.ndarray:
    frac = unit_nodes(nodes)
    d = x.shape[-1]
    out = np.empty(x.shape[0])
    for row, point in enumerate(x):
        upper = -np.log1p(-point)
        axes = [frac * u for u in upper]
        mesh = np.meshgrid(*axes, indexing="ij")
        v = np.stack([m.ravel() for m in mesh], axis=-1)
        values = np.asarray(gamma(-np.expm1(-v)), dtype=float).reshape(mesh[0].shape)
        for axis in reversed(range(d)):
            values = simpson(values, x=axes[axis], axis=axis)
        out[row] = values
    return out


def S_dep_from_gamma(gamma, x, nodes: Optional[int] = None):
    """
    S_{I₀}(x) = 1 + (-1)^d ∫₀ˣ γ dΛ₀^d, dΛ₀(u) = du/(1-u)

    Pour γ = R_d(g) l'intégrale se factorise par axe ; une fonction γ
    quelconque est intégrée par Simpson tensorisé (201 nœuds par axe).

    Raises:
        NumericError: si la quadrature n'est pas finie
    """
    d = gamma.d if isinstance(gamma, TransformedScore) else np.shape(x)[-1]
    points, scalar = _interior(x, d)
    if isinstance(gamma, TransformedScore):
        integral = np.zeros(points.shape[0])
        for term in gamma.score.terms:
            product = np.full(points.shape[0], term.coef)
            for k, factor in enumerate(term.factors):
                product = product * _axis_hazard_integral(factor, points[:, k], nodes)
            integral = integral + product
    else:
        integral = _tensor_hazard_integral(gamma, points, nodes or 201)
    if not np.all(np.isfinite(integral)):
        raise NumericError("Quadrature non finie pour S_{I₀}")
    return _out(1.0 + (-1) ** d * integral, scalar)


def S_dep_from_score(g: ScoreFunction, x):
    """S_{I₀}(x) = 1 + ∫ₓ¹ g dP₀^d / ∏(1 - x_i)"""
    points, scalar = _interior(x, g.d)
    values = 1.0 + g.upper_orthant_integral(points) / np.prod(1.0 - points, axis=-1)
    return _out(values, scalar)


def lemma_identity_defect(g: ScoreFunction, x, nodes: Optional[int] = None) -> float:
    """sup |S_dep_from_score(g) - S_dep_from_gamma(R_d(g))| sur les points x"""
    points, _ = _interior(x, g.d)
    by_score = np.atleast_1d(S_dep_from_score(g, points))
    by_gamma = np.atleast_1d(S_dep_from_gamma(TransformedScore(g), points, nodes))
    return float(np.max(np.abs(by_score - by_gamma)))


# ==================== FAMILLE f_θ ====================

def copula_family(g: ScoreFunction, theta: float) -> ScoreCopula:
    """
    Copule de densité f_θ = 1 + θg

    Raises:
        DomainError: si θ ∉ [0, 1] ou si θ |inf g| dépasse 1 (densité négative)
    """
    theta = float(theta)
    if not 0 <= theta <= 1:
        raise DomainError("θ doit appartenir à [0, 1]", theta=theta)
    lowest = infimum(g)
    excess = theta * abs(min(lowest, 0.0))
    if g.polynomial_only:
        admissible = excess <= 1.0 + 1e-12
    else:
        admissible = excess * (1.0 + settings.inf_safety_margin) <= 1.0
    if not admissible:
        raise DomainError(
            f"θ |inf g| = {excess:.6g} > 1 : densité négative (inf g = {lowest:.6g})",
            theta=theta, infimum=lowest,
        )
    return ScoreCopula(score=g, theta=theta, params={"theta": theta, **g.describe()})


def first_order_remainder(g: ScoreFunction, theta: float, x, nodes: Optional[int] = None):
    """
    [log S_{I₀,θ}(x) - (-1)^d θ ∫₀ˣ R_d(g) dΛ₀^d] / θ

    Tend vers 0 avec θ, uniformément sur [0, 1-ε]^d.
    """
    if not theta > 0:
        raise DomainError("θ doit être > 0", theta=theta)
    copula = copula_family(g, theta)
    points, scalar = _interior(x, g.d)
    log_part = np.log(copula.survival(points)) - np.log1p(-points).sum(axis=-1)
    first_order = np.atleast_1d(S_dep_from_gamma(TransformedScore(g), points, nodes)) - 1.0
    return _out((log_part - theta * first_order) / theta, scalar)
