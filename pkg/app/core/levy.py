"""
Fragilités indéfiniment divisibles pour la somme (mesure de Lévy finie)

ψ(t) = exp(-<t, b> + Σ_k c_k (e^{-<t, x_k>} - 1))
"""

import numpy as np

from app.core.exceptions import CapabilityError, NumericError, StructuralError
from app.core.logging import get_logger
from app.models.laplace import LaplaceModel
from app.models.lattice import IndexSet
from app.models.levy import LevyAtom, LevyTriplet, PositivityVerdict
from app.models.minid import DiscreteExponentMeasure

logger = get_logger("levy")


def validate_positivity(tr: LevyTriplet) -> PositivityVerdict:
    """
    Une mesure finie ne peut compenser une dérive nulle : accepté si b_i > 0
    pour tout i, sinon les coordonnées fautives sont renvoyées
    """
    offending = tuple(i + 1 for i, b in enumerate(tr.b) if not b > 0)
    return PositivityVerdict(ok=not offending, offending=offending)


def _points(tr: LevyTriplet, t) -> tuple[np.ndarray, bool]:
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 1
    points = np.atleast_2d(t)
    if points.shape[-1] != tr.d:
        raise StructuralError(f"Point de dimension {points.shape[-1]}, attendu {tr.d}")
    return points, scalar


def _log_psi(tr: LevyTriplet, x: np.ndarray) -> np.ndarray:
    value = -(x @ tr.drift)
    if tr.atoms:
        value = value + np.expm1(-(x @ tr.jumps.T)) @ tr.intensities
    return value


def exponent_mass(tr: LevyTriplet, t):
    """μ((t, ∞]^C) = <t, b> - Σ c_k (e^{-<t, x_k>} - 1) = -log ψ(t)"""
    points, scalar = _points(tr, t)
    value = -_log_psi(tr, points)
    return float(value[0]) if scalar else value


def psi_levy(tr: LevyTriplet, t):
    """
    Transformée de Laplace du triplet

    Raises:
        CapabilityError: si le triplet n'est pas validé (dérive nulle)
    """
    validate_positivity(tr).require()
    points, scalar = _points(tr, t)
    value = np.exp(_log_psi(tr, points))
    return float(value[0]) if scalar else value


def _restricted(index: IndexSet, t_I) -> tuple[np.ndarray, bool]:
    index.require_nonempty()
    t_I = np.asarray(t_I, dtype=float)
    scalar = t_I.ndim <= 1
    return np.atleast_2d(index.take(np.atleast_1d(t_I))), scalar


def lambda_levy(tr: LevyTriplet, I: IndexSet, t_I):
    """
    λ_i = b_i + Σ c_k x_{k,i} e^{-t_i x_{k,i}} ;
    λ_I = Σ c_k ∏_{i∈I} x_{k,i} e^{-<t_I, x_{k,I}>} pour |I| >= 2

    Les évaluations en 0⁺ utilisent directement l'expression limite.
    """
    if not I:
        raise StructuralError("λ_I requiert I non vide")
    t, scalar = _restricted(I, t_I)
    axes = list(I.axes)
    jumps = tr.jumps[:, axes]
    value = (np.prod(jumps, axis=1) * tr.intensities) @ np.exp(-(t @ jumps.T)).T if tr.atoms else np.zeros(t.shape[0])
    if I.size == 1:
        value = value + tr.drift[axes[0]]
    value = np.asarray(value, dtype=float)
    return float(value[0]) if scalar else value


def Lambda_levy(tr: LevyTriplet, I: IndexSet, t_I):
    """
    Λ_I = Σ_k c_k ∏_{i∈I} (1 - e^{-x_{k,i} t_i}) pour |I| >= 2, calculé sous
    forme produit et sous forme de somme alternée, puis comparé

    Pour |I| = 1 : Λ_i = b_i t_i + Σ c_k (1 - e^{-x_{k,i} t_i}).

    Raises:
        NumericError: si les deux formes divergent
    """
    if not I:
        raise StructuralError("Λ_I requiert I non vide")
    t, scalar = _restricted(I, t_I)
    axes = list(I.axes)
    jumps = tr.jumps[:, axes]
    c = tr.intensities
    # (n, K, |I|)
    factors = -np.expm1(-t[:, None, :] * jumps[None, :, :])
    product = np.prod(factors, axis=2) @ c if tr.atoms else np.zeros(t.shape[0])

    if I.size == 1:
        value = product + tr.drift[axes[0]] * t[:, 0]
    else:
        alternating = np.zeros(t.shape[0])
        for sub in IndexSet.full(I.size).subsets(include_empty=True):
            cols = list(sub.axes)
            mass = np.exp(-(t[:, cols] @ jumps[:, cols].T)) @ c if tr.atoms else np.zeros(t.shape[0])
            alternating += (-1) ** sub.size * mass
        if np.any(np.abs(alternating - product) > 1e-12 * np.maximum(1.0, np.abs(product))):
            raise NumericError("Formes produit et alternée de Λ_I en désaccord", subset=str(I))
        value = product
    return float(value[0]) if scalar else value


# ==================== OPÉRATIONS SUR LES TRIPLETS ====================

def scaled(tr: LevyTriplet, n: float) -> LevyTriplet:
    """Triplet de ψ^{1/n} : (b/n, {c_k/n})"""
    if not n > 0:
        raise StructuralError("Le facteur doit être > 0", n=n)
    return LevyTriplet(
        b=tuple(v / n for v in tr.b),
        atoms=tuple(LevyAtom(c=a.c / n, x=a.x) for a in tr.atoms),
    )


def combine(tr1: LevyTriplet, tr2: LevyTriplet) -> LevyTriplet:
    """Somme de fragilités indépendantes : dérives additionnées, atomes concaténés"""
    if tr1.d != tr2.d:
        raise StructuralError("Dimensions différentes", d1=tr1.d, d2=tr2.d)
    return LevyTriplet(
        b=tuple(a + b for a, b in zip(tr1.b, tr2.b)),
        atoms=tr1.atoms + tr2.atoms,
    )


def levy_model(tr: LevyTriplet) -> LaplaceModel:
    """
    Modèle de Laplace d'un triplet validé, avec λ_I analytiques et
    échantillonneur Poisson composé W = b + Σ_k N_k x_k, N_k ~ Poisson(c_k)
    """
    validate_positivity(tr).require()
    drift, jumps, c = tr.drift, tr.jumps, tr.intensities

    def sampler(rng: np.random.Generator, n: int) -> np.ndarray:
        counts = rng.poisson(c, size=(n, c.size)) if c.size else np.zeros((n, 0))
        return drift + counts @ jumps

    def lam(index: IndexSet, x: np.ndarray) -> np.ndarray:
        return lambda_levy(tr, index, x[:, list(index.axes)])

    return LaplaceModel(
        name="compound_poisson",
        d=tr.d,
        psi=lambda x: np.exp(_log_psi(tr, x)),
        log_psi=lambda x: _log_psi(tr, x),
        analytic_lambda=lam,
        frailty_sampler=sampler,
        levy=tr,
        params={"b": list(tr.b), "atoms": [{"c": a.c, "x": list(a.x)} for a in tr.atoms]},
    )


def drift_exponent_measure(tr: LevyTriplet) -> tuple[DiscreteExponentMeasure, np.ndarray]:
    """
    Encodage d'un triplet sans atomes comme mesure d'exposant min-ID

    Avec x_i = 1 - e^{-b_i t_i}, exp(-exponent_mass(t)) coïncide avec la
    survie de la mesure de bord uniforme en x.

    Returns:
        (mesure, taux b) ; le changement de variable est x = -expm1(-b t)
    """
    if tr.atoms:
        raise CapabilityError("Seuls les triplets sans atomes ont un encodage discret exact")
    measure = DiscreteExponentMeasure(d=tr.d, atoms=(), uniform_margin_boundary=True)
    return measure, tr.drift
