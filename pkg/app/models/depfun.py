"""
Lois marginales et grilles de fonctions de dépendance
"""

from dataclasses import dataclass, field
from typing import Callable, Literal, Optional, Protocol, Sequence, runtime_checkable

import numpy as np
from scipy import stats
from scipy.optimize import brentq

from app.core.exceptions import DomainError, NumericError, StructuralError
from app.models.lattice import IndexSet, SurvivalOracle


@runtime_checkable
class Marginal(Protocol):
    """Loi univariée continue : F, F^{-1}, λ, Λ = -log(1-F)"""

    name: str

    def cdf(self, t: np.ndarray) -> np.ndarray: ...

    def sf(self, t: np.ndarray) -> np.ndarray: ...

    def ppf(self, u: np.ndarray) -> np.ndarray: ...

    def hazard(self, t: np.ndarray) -> np.ndarray: ...

    def cum_hazard(self, t: np.ndarray) -> np.ndarray: ...

    def inverse_cum_hazard(self, h: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class ScipyMarginal:
    """
    Marginale portée par une loi gelée de scipy.stats

    cum_hazard_fn et inverse_fn, s'ils sont fournis, remplacent logsf/isf
    par des formes closes précises près de 0.
    """

    dist: object
    name: str = "scipy"
    cum_hazard_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    inverse_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def cdf(self, t):
        return self.dist.cdf(t)

    def sf(self, t):
        return self.dist.sf(t)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        if self.inverse_fn is not None:
            return self.inverse_fn(-np.log1p(-u))
        return self.dist.ppf(u)

    def hazard(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(self.dist.logpdf(t) - self.dist.logsf(t))

    def cum_hazard(self, t):
        t = np.asarray(t, dtype=float)
        if self.cum_hazard_fn is not None:
            return self.cum_hazard_fn(t)
        return -self.dist.logsf(t)

    def inverse_cum_hazard(self, h):
        h = np.asarray(h, dtype=float)
        if self.inverse_fn is not None:
            return self.inverse_fn(h)
        return self.dist.isf(np.exp(-h))


def exponential(rate: float = 1.0) -> ScipyMarginal:
    return ScipyMarginal(
        stats.expon(scale=1.0 / rate), f"exponential(rate={rate})",
        cum_hazard_fn=lambda t: rate * t,
        inverse_fn=lambda h: h / rate,
    )


def weibull(shape: float, scale: float = 1.0) -> ScipyMarginal:
    return ScipyMarginal(
        stats.weibull_min(shape, scale=scale), f"weibull(shape={shape}, scale={scale})",
        cum_hazard_fn=lambda t: (t / scale) ** shape,
        inverse_fn=lambda h: scale * h ** (1.0 / shape),
    )


def lomax(shape: float, scale: float = 1.0) -> ScipyMarginal:
    return ScipyMarginal(
        stats.lomax(shape, scale=scale), f"lomax(shape={shape}, scale={scale})",
        cum_hazard_fn=lambda t: shape * np.log1p(t / scale),
        inverse_fn=lambda h: scale * np.expm1(h / shape),
    )


def uniform() -> ScipyMarginal:
    return ScipyMarginal(
        stats.uniform(), "uniform",
        cum_hazard_fn=lambda t: -np.log1p(-t),
        inverse_fn=lambda h: -np.expm1(-h),
    )


@dataclass(frozen=True, eq=False)
class ImplicitMarginal:
    """
    Marginale définie par sa seule survie S_i

    Le quantile est obtenu par recherche de racine (brentq) sur le hasard
    cumulé, le taux de hasard par différence centrée.
    """

    survival: Callable[[np.ndarray], np.ndarray]
    log_survival: Optional[Callable[[np.ndarray], np.ndarray]] = None
    upper: float = np.inf
    name: str = "implicit"

    def cum_hazard(self, t):
        t = np.asarray(t, dtype=float)
        if self.log_survival is not None:
            return -np.asarray(self.log_survival(t), dtype=float)
        return -np.log(np.asarray(self.survival(t), dtype=float))

    def sf(self, t):
        return np.exp(-self.cum_hazard(t))

    def cdf(self, t):
        return -np.expm1(-self.cum_hazard(t))

    def hazard(self, t):
        t = np.asarray(t, dtype=float)
        h = 1e-4 * np.maximum(1.0, np.abs(t))
        h = np.minimum(h, 0.5 * np.maximum(t, 1e-300))
        if np.isfinite(self.upper):
            h = np.minimum(h, 0.5 * (self.upper - t))
        # Richardson sur la différence centrée
        d1 = (self.cum_hazard(t + h) - self.cum_hazard(t - h)) / (2 * h)
        d2 = (self.cum_hazard(t + h / 2) - self.cum_hazard(t - h / 2)) / h
        return (4 * d2 - d1) / 3

    def inverse_cum_hazard(self, h):
        h = np.asarray(h, dtype=float)
        out = np.empty_like(h)
        for k, target in np.ndenumerate(h):
            out[k] = self._solve(float(target))
        return out

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        return self.inverse_cum_hazard(-np.log1p(-u))

    def _solve(self, target: float) -> float:
        if target <= 0:
            return 0.0
        fn = lambda t: float(self.cum_hazard(np.array(t))) - target  # noqa: E731
        hi = 1.0 if not np.isfinite(self.upper) else 0.5 * self.upper
        for _ in range(200):
            if fn(hi) >= 0:
                break
            hi = hi * 2 if not np.isfinite(self.upper) else (hi + self.upper) / 2
        else:
            raise NumericError("Quantile introuvable", target=target)
        return brentq(fn, 0.0, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


@dataclass(frozen=True, eq=False)
class MarginalSpec:
    """Une marginale par axe"""

    marginals: tuple[Marginal, ...]

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))

    @classmethod
    def repeat(cls, marginal: Marginal, d: int) -> "MarginalSpec":
        return cls(tuple(marginal for _ in range(d)))

    @property
    def d(self) -> int:
        return len(self.marginals)

    def restrict(self, index: IndexSet) -> "MarginalSpec":
        if index.d != self.d:
            raise StructuralError(f"{index} incompatible avec {self.d} marginales")
        return MarginalSpec(tuple(self.marginals[a] for a in index.axes))

    def _apply(self, method: str, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise StructuralError(f"Point de dimension {x.shape[-1]}, {self.d} marginales attendues")
        cols = [np.asarray(getattr(m, method)(x[..., k]), dtype=float) for k, m in enumerate(self.marginals)]
        return np.stack(cols, axis=-1)

    def cdf(self, t):
        return self._apply("cdf", t)

    def sf(self, t):
        return self._apply("sf", t)

    def ppf(self, u):
        return self._apply("ppf", u)

    def hazard(self, t):
        return self._apply("hazard", t)

    def cum_hazard(self, t):
        return self._apply("cum_hazard", t)

    def inverse_cum_hazard(self, h):
        return self._apply("inverse_cum_hazard", h)

    def check(self, probe: Sequence[float] = (0.05, 0.25, 0.5, 0.75, 0.95), tol: float = 1e-10) -> None:
        """F_i(F_i^{-1}(u)) = u sur les points de sonde"""
        u = np.asarray(probe, dtype=float)
        for k, m in enumerate(self.marginals):
            back = np.asarray(m.cdf(m.ppf(u)), dtype=float)
            if np.max(np.abs(back - u)) > tol:
                raise DomainError(f"Marginale {k + 1} non inversible ({m.name})", axis=k + 1)


# ==================== MODÈLES DE SURVIE ====================

@dataclass(frozen=True, eq=False)
class SurvivalModel:
    """
    Modèle décrit directement par sa fonction de survie et ses marginales
    (modèles proportionnels, Frank, modèles re-marginalisés)

    analytic_lambda suit la convention de LaplaceModel : points (n, d),
    seules les coordonnées de I sont lues.
    """

    name: str
    d: int
    survival: Callable[[np.ndarray], np.ndarray]
    marginals: MarginalSpec
    log_survival: Optional[Callable[[np.ndarray], np.ndarray]] = None
    analytic_lambda: Optional[Callable[[IndexSet, np.ndarray], np.ndarray]] = None
    params: dict = field(default_factory=dict)

    def oracle(self) -> SurvivalOracle:
        return SurvivalOracle(
            d=self.d,
            evaluator=self.survival,
            log_evaluator=self.log_survival,
            name=self.name,
        )


# ==================== GRILLES DE DÉPENDANCE ====================

Provenance = Literal["closed-form", "analytic", "fd-pipeline"]


@dataclass(frozen=True, eq=False)
class GammaGrid:
    """Valeurs de γ_{0,I} sur une grille uniforme de [0, 1-δ]^{|I|}"""

    I: IndexSet
    axes: tuple[np.ndarray, ...]
    values: np.ndarray
    provenance: Provenance
    delta: float
    model: str = ""
    params: dict = field(default_factory=dict)
    masked: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if np.any(np.isinf(values)):
            raise NumericError("Valeurs infinies dans la grille γ0", model=self.model)
        masked = tuple(tuple(int(i) for i in idx) for idx in np.argwhere(np.isnan(values)))
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "masked", masked)

    @property
    def resolution(self) -> int:
        return int(self.axes[0].size)
