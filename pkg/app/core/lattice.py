"""
Factorisation des fonctions de survie sur le treillis des sous-ensembles

log S_I(t_I) = Σ_{∅≠K⊆I} (-1)^{|I|-|K|} log S^K(t_K), et
Λ_I = (-1)^{|I|} log S_I. Les parts sont manipulées en logarithme.
"""

import itertools
import math
from typing import Callable, Union

import numpy as np

from app.config.settings import settings
from app.core.exceptions import DomainError, StructuralError
from app.core.logging import get_logger
from app.models.lattice import GridSpec, IndexSet, PartTable, SurvivalOracle

logger = get_logger("lattice")

EPS = np.finfo(float).eps


# ==================== HASARD UNIVARIÉ ====================

def univariate_hazard(S_i: Callable[[float], float], t: float) -> float:
    """
    Hasard cumulé Λ_i(t) = -log S_i(t)

    Raises:
        DomainError: si S_i(t) <= 0
    """
    value = float(S_i(t))
    if not value > 0:
        raise DomainError(f"Survie non positive en t={t}", t=t, value=value)
    return -math.log(value)


# ==================== FACTORISATION ====================

def _expand(values: np.ndarray, sub: IndexSet, index: IndexSet) -> np.ndarray:
    """Diffuse un tableau indexé par les axes de sub sur les axes de index"""
    positions = sub.position_in(index)
    shape = [1] * index.size
    for pos, n in zip(positions, values.shape):
        shape[pos] = n
    return values.reshape(shape)


def _grid_for(S: SurvivalOracle, J: IndexSet, grid: GridSpec) -> GridSpec:
    if J.d != S.d:
        raise StructuralError(f"{J} n'appartient pas à la dimension {S.d}")
    if grid.d == S.d:
        return grid
    if grid.d == J.size:
        axes = [grid.axes[0]] * S.d
        for k, a in enumerate(J.axes):
            axes[a] = grid.axes[k]
        return GridSpec(tuple(axes), grid.domain, grid.delta)
    raise StructuralError(
        f"Grille de dimension {grid.d} pour S de dimension {S.d}", grid_d=grid.d, d=S.d
    )


def _log_marginal(S: SurvivalOracle, K: IndexSet, grid: GridSpec) -> np.ndarray:
    sub = grid.restrict(K)
    points = sub.points()
    logs = S.marginal(K).log(points)
    bad = ~np.isfinite(logs)
    if np.any(bad):
        where = points[np.argmax(bad)]
        raise DomainError(
            f"Survie nulle ou négative pour S^{K} au point {where.tolist()}",
            subset=str(K), point=where,
        )
    return logs.reshape(sub.shape)


def factorize(S: SurvivalOracle, J: IndexSet, grid: GridSpec) -> PartTable:
    """
    Parts de dépendance {S_I}_{∅≠I⊆J} de S^J sur la grille

    Args:
        S: oracle de survie
        J: ensemble d'indices non vide
        grid: grille (dimension d, ou |J| pour les seuls axes de J)

    Returns:
        PartTable: parts en logarithme, sous-ensembles par cardinal croissant

    Raises:
        DomainError: si S^K s'annule sur la grille
    """
    J.require_nonempty()
    grid = _grid_for(S, J, grid)
    subsets = J.subsets()
    marginals = {K: _log_marginal(S, K, grid) for K in subsets}

    entries = {}
    for index in subsets:
        total = np.zeros(grid.restrict(index).shape)
        for K in index.subsets():
            sign = -1.0 if (index.size - K.size) % 2 else 1.0
            total = total + sign * _expand(marginals[K], K, index)
        entries[index] = total
    logger.debug("factorisation de S^%s : %d parts", J, len(entries))
    return PartTable(grid, J, "part", entries)


def exponent_of_parts(parts: PartTable) -> PartTable:
    """Λ_I = (-1)^{|I|} log S_I pour chaque entrée"""
    if parts.kind != "part":
        raise StructuralError("La table doit contenir des parts (kind=part)")
    entries = {}
    for index in parts:
        logs = parts.log_part(index)
        if not np.all(np.isfinite(logs)):
            raise DomainError(f"Part S_{index} non positive", subset=str(index))
        entries[index] = (-1) ** index.size * logs
    return PartTable(parts.grid, parts.J, "exponent", entries)


def recompose(parts: PartTable, J: IndexSet) -> np.ndarray:
    """
    S^J = ∏_{∅≠I⊆J} S_I sur la grille restreinte à J

    Raises:
        StructuralError: si une part manque
    """
    J.require_nonempty()
    total = np.zeros(parts.grid.restrict(J).shape)
    for index in J.subsets():
        if index not in parts:
            raise StructuralError(f"Part S_{index} manquante", subset=str(index))
        total = total + _expand(parts.log_part(index), index, J)
    return np.exp(total)


# ==================== DÉRIVÉES CROISÉES ====================

def _default_relative_step(order: int) -> float:
    if order <= 2:
        return settings.fd_relative_step
    return max(settings.fd_relative_step, EPS ** (1.0 / (order + 4)))


def _steps(
    lower: np.ndarray, upper: np.ndarray, axes: tuple[int, ...],
    points: np.ndarray, h: Union[float, np.ndarray, None],
) -> np.ndarray:
    coords = points[:, list(axes)]
    lo = lower[list(axes)]
    hi = upper[list(axes)]
    if np.any(coords < lo) or np.any(coords >= hi):
        raise DomainError("Point hors du domaine", points=points)
    room = np.minimum(coords - lo, hi - coords)
    if h is None:
        steps = _default_relative_step(len(axes)) * np.maximum(1.0, np.abs(coords))
        if np.any(room <= 0):
            raise DomainError(
                "Le gabarit de différences finies sort du domaine (point au bord)",
                points=coords,
            )
        return np.minimum(steps, 0.5 * room)
    steps = np.broadcast_to(np.asarray(h, dtype=float), coords.shape).copy()
    if np.any(steps <= 0) or np.any(steps > room):
        raise DomainError("Le gabarit de différences finies sort du domaine", h=h)
    return steps


def _central_difference(
    fn: Callable[[np.ndarray], np.ndarray], axes: tuple[int, ...],
    points: np.ndarray, steps: np.ndarray,
) -> np.ndarray:
    k = len(axes)
    corners = np.array(list(itertools.product((1.0, -1.0), repeat=k)))
    signs = np.prod(corners, axis=1)
    # (n, 2^k, d)
    shifted = np.repeat(points[:, None, :], corners.shape[0], axis=1)
    shifted[:, :, list(axes)] += corners[None, :, :] * steps[:, None, :]
    values = fn(shifted.reshape(-1, points.shape[1])).reshape(points.shape[0], -1)
    if not np.all(np.isfinite(values)):
        raise DomainError("Valeur non finie dans le gabarit (survie nulle ?)")
    return values @ signs / np.prod(2.0 * steps, axis=1)


def _richardson(fn, axes, points, steps) -> np.ndarray:
    coarse = _central_difference(fn, axes, points, steps)
    fine = _central_difference(fn, axes, points, steps / 2.0)
    return (4.0 * fine - coarse) / 3.0


def _as_points(oracle: SurvivalOracle, index: IndexSet, t) -> tuple[np.ndarray, bool]:
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 1
    t = np.atleast_2d(t)
    if t.shape[-1] != oracle.d:
        t = index.embed(t, oracle.lower)
    return t, scalar


def _oracle(psi) -> SurvivalOracle:
    if isinstance(psi, SurvivalOracle):
        return psi
    oracle = getattr(psi, "oracle", None)
    if oracle is None:
        raise StructuralError("Objet sans oracle de survie")
    return oracle() if callable(oracle) else oracle


def mixed_partial(psi, index: IndexSet, t, h=None, log: bool = False):
    """
    Dérivée croisée ∂_I de ψ (ou de log ψ) par différences centrées
    tensorisées, avec un niveau d'extrapolation de Richardson

    Args:
        psi: SurvivalOracle ou LaplaceModel
        index: ensemble I, |I| <= 4
        t: point de dimension d (ou |I|, les autres coordonnées à la borne inférieure),
           ou lot de points (n, d)
        h: pas explicite ; par défaut relatif et réduit près des bords
        log: dérive log ψ plutôt que ψ

    Returns:
        float ou np.ndarray selon la forme de t
    """
    oracle = _oracle(psi)
    index.require_nonempty()
    if index.size > 4:
        raise StructuralError("Dérivées croisées limitées à |I| <= 4", size=index.size)
    points, scalar = _as_points(oracle, index, t)
    steps = _steps(oracle.lower, oracle.upper, index.axes, points, h)
    if log:
        fn = oracle.log
    else:
        def fn(x: np.ndarray) -> np.ndarray:
            values = oracle(x)
            return np.where(values > 0, values, np.nan)
    values = _richardson(fn, index.axes, points, steps)
    return float(values[0]) if scalar else values


def mixed_partial_log(psi, index: IndexSet, t, h=None):
    """λ_I(t_I) = (-1)^{|I|} ∂_I log ψ(t_I, 0)"""
    values = mixed_partial(psi, index, t, h, log=True)
    return (-1) ** index.size * values


# ==================== ACCROISSEMENTS RECTANGULAIRES ====================

def rectangle_increments(values: np.ndarray) -> np.ndarray:
    """Masses des pavés de la grille : (-1)^d Δ_1...Δ_d S"""
    values = np.asarray(values, dtype=float)
    out = values
    for axis in range(values.ndim):
        out = np.diff(out, axis=axis)
    return (-1) ** values.ndim * out


def is_survival_function(values: np.ndarray, tol: float = 1e-12) -> bool:
    """
    Contrôle d-monotone sur une grille : accroissements >= -tol,
    valeurs dans [0, 1] et décroissance selon chaque axe
    """
    values = np.asarray(values, dtype=float)
    if np.any(values < -tol) or np.any(values > 1 + tol):
        return False
    for axis in range(values.ndim):
        if np.any(np.diff(values, axis=axis) > tol):
            return False
    return bool(np.all(rectangle_increments(values) >= -tol))
