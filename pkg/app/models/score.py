"""
Fonctions de score à marges nulles et copules f_θ = 1 + θg

Un score est une somme finie de produits tensoriels de composantes
univariées d'intégrale nulle sur (0, 1).
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Literal, Optional, Union

import numpy as np
from numpy.polynomial import Legendre, Polynomial
from scipy.interpolate import CubicSpline

from app.core.exceptions import DomainError, StructuralError
from app.models.depfun import MarginalSpec, uniform
from app.models.lattice import MAX_DIMENSION, SurvivalOracle

ZERO_MEAN_TOL = 1e-10

# (1 - x) comme polynôme
_ONE_MINUS_X = Polynomial([1.0, -1.0])


@dataclass(frozen=True, eq=False)
class PolynomialFactor:
    """
    Polynôme de Legendre décalé P_k(2x - 1), k >= 1

    ∫₀¹ P_k = 0 et ‖P_k‖² = 1/(2k+1). La variante legendre-odd impose
    un degré impair.
    """

    degree: int
    kind: Literal["legendre-odd", "legendre"] = "legendre-odd"

    def __post_init__(self):
        if self.degree < 1:
            raise DomainError("Degré >= 1 requis (intégrale nulle)", degree=self.degree)
        if self.kind == "legendre-odd" and self.degree % 2 == 0:
            raise DomainError("legendre-odd requiert un degré impair", degree=self.degree)

    @cached_property
    def polynomial(self) -> Polynomial:
        return Legendre.basis(self.degree, domain=[0.0, 1.0]).convert(kind=Polynomial)

    @cached_property
    def _antiderivative(self) -> Polynomial:
        # F(x) = ∫_1^x P, F(1) = 0
        return self.polynomial.integ(lbnd=1.0)

    @cached_property
    def transformed_polynomial(self) -> Polynomial:
        """R(P) = P + F / (1 - x), division exacte car F(1) = 0"""
        quotient, _ = divmod(self._antiderivative, _ONE_MINUS_X)
        return self.polynomial + quotient

    def __call__(self, x):
        return self.polynomial(np.asarray(x, dtype=float))

    def tail(self, x):
        """∫ₓ¹ P(u) du"""
        return -self._antiderivative(np.asarray(x, dtype=float))

    def transformed(self, x):
        return self.transformed_polynomial(np.asarray(x, dtype=float))

    def describe(self) -> dict:
        return {"kind": self.kind, "degree": self.degree}


@dataclass(frozen=True, eq=False)
class GridFactor:
    """Composante donnée sur une grille uniforme de [0, 1], interpolée par spline cubique"""

    values: tuple[float, ...]

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 4:
            raise StructuralError("Au moins 4 valeurs de grille requises", size=int(values.size))
        if not np.all(np.isfinite(values)):
            raise DomainError("Valeurs de grille non finies")
        object.__setattr__(self, "values", tuple(float(v) for v in values))
        mean = self.spline.integrate(0.0, 1.0)
        if abs(mean) > ZERO_MEAN_TOL * max(1.0, float(np.max(np.abs(values)))):
            raise DomainError(f"Composante d'intégrale non nulle ({mean:.3e})", mean=float(mean))

    @cached_property
    def spline(self) -> CubicSpline:
        nodes = np.linspace(0.0, 1.0, len(self.values))
        return CubicSpline(nodes, np.asarray(self.values))

    def __call__(self, x):
        return self.spline(np.asarray(x, dtype=float))

    @cached_property
    def _primitive(self) -> CubicSpline:
        return self.spline.antiderivative()

    def tail(self, x):
        """∫ₓ¹ g(u) du"""
        x = np.asarray(x, dtype=float)
        return self._primitive(1.0) - self._primitive(x)

    def transformed(self, x):
        x = np.asarray(x, dtype=float)
        gap = 1.0 - x
        near = gap < 1e-4
        safe = np.where(near, 0.5, gap)
        exact = self(x) - self.tail(x) / safe
        # développement limité près de 1 : R(g)(x) ≈ -g'(x)(1-x)/2
        limit = -0.5 * self.spline.derivative()(x) * gap
        return np.where(near, limit, exact)

    def describe(self) -> dict:
        return {"kind": "grid", "values": list(self.values)}


Factor = Union[PolynomialFactor, GridFactor]


@dataclass(frozen=True, eq=False)
class ScoreTerm:
    coef: float
    factors: tuple[Factor, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not np.isfinite(self.coef):
            raise DomainError("Coefficient non fini", coef=self.coef)


@dataclass(frozen=True, eq=False)
class ScoreFunction:
    """g = Σ_terms coef ∏_k f_k(x_k)"""

    terms: tuple[ScoreTerm, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise StructuralError("Un score requiert au moins un terme")
        sizes = {len(t.factors) for t in self.terms}
        if len(sizes) != 1:
            raise StructuralError("Tous les termes doivent avoir d facteurs", sizes=sorted(sizes))
        if not 1 <= sizes.pop() <= MAX_DIMENSION:
            raise StructuralError("Dimension hors bornes")

    @property
    def d(self) -> int:
        return len(self.terms[0].factors)

    @property
    def polynomial_only(self) -> bool:
        return all(isinstance(f, PolynomialFactor) for t in self.terms for f in t.factors)

    def _combine(self, method: str, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise StructuralError(f"Point de dimension {x.shape[-1]}, attendu {self.d}")
        total = np.zeros(x.shape[:-1])
        for term in self.terms:
            product = np.full(x.shape[:-1], term.coef)
            for k, factor in enumerate(term.factors):
                product = product * getattr(factor, method)(x[..., k])
            total = total + product
        return total

    def __call__(self, x) -> np.ndarray:
        return self._combine("__call__", x)

    def upper_orthant_integral(self, x) -> np.ndarray:
        """∫ₓ¹ g dP₀^d = Σ coef ∏ tail_k(x_k)"""
        return self._combine("tail", x)

    def describe(self) -> dict:
        return {"terms": [
            {"coef": t.coef, "factors": [f.describe() for f in t.factors]} for t in self.terms
        ]}


@dataclass(frozen=True, eq=False)
class TransformedScore:
    """γ = R_d(g), extension linéaire de R_d(∏ g_k) = ∏ R(g_k)"""

    score: ScoreFunction

    @property
    def d(self) -> int:
        return self.score.d

    def __call__(self, x) -> np.ndarray:
        return self.score._combine("transformed", x)


@dataclass(frozen=True)
class ConditionVerdict:
    """Conditions de la copule de densité f : marges nulles de g = f - 1 et g >= -1"""

    holds: bool
    integral: float
    min_value: float
    nonnegative: bool
    max_axis_defect: float
    axis_integrals_vanish: bool
    proper_marginals_independent: bool


@dataclass(frozen=True, eq=False)
class ScoreCopula:
    """
    Copule de densité f_θ = 1 + θg sur (0, 1)^d

    S_θ(x) = ∏(1 - x_i) + θ ∫ₓ¹ g dP₀^d ; toutes les marges propres
    sont des copules d'indépendance.
    """

    score: ScoreFunction
    theta: float
    name: str = "score_copula"
    analytic_lambda: Optional[Callable] = None
    params: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.score.d

    @property
    def marginals(self) -> MarginalSpec:
        return MarginalSpec.repeat(uniform(), self.d)

    def density(self, x) -> np.ndarray:
        return 1.0 + self.theta * self.score(x)

    def survival(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.prod(1.0 - x, axis=-1) + self.theta * self.score.upper_orthant_integral(x)

    def log_survival(self, x) -> np.ndarray:
        values = self.survival(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(values > 0, np.log(np.where(values > 0, values, 1.0)), -np.inf)

    def dependence_part(self, x) -> np.ndarray:
        """S_{I₀,θ}(x) = 1 + θ ∫ₓ¹ g dP₀^d / ∏(1 - x_i)"""
        x = np.asarray(x, dtype=float)
        return 1.0 + self.theta * self.score.upper_orthant_integral(x) / np.prod(1.0 - x, axis=-1)

    def oracle(self) -> SurvivalOracle:
        return SurvivalOracle(
            d=self.d,
            evaluator=self.survival,
            log_evaluator=self.log_survival,
            lower=np.zeros(self.d),
            upper=np.ones(self.d),
            name=self.name,
        )
