"""
Modèles de fragilité décrits par leur transformée de Laplace ψ
"""

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from app.models.depfun import ImplicitMarginal, MarginalSpec
from app.models.lattice import Evaluator, IndexSet, SurvivalOracle
from app.models.levy import LevyTriplet

LambdaFn = Callable[[IndexSet, np.ndarray], np.ndarray]
FrailtySampler = Callable[[np.random.Generator, int], np.ndarray]


@dataclass(frozen=True, eq=False)
class LaplaceModel:
    """
    Oracle ψ sur l'orthant positif, avec dérivées analytiques,
    échantillonneur de fragilité et triplet de Lévy optionnels

    analytic_lambda(I, t) reçoit des points (n, d) et n'utilise que
    les coordonnées de I (les autres sont fixées à 0).
    """

    name: str
    d: int
    psi: Evaluator
    log_psi: Optional[Evaluator] = None
    analytic_lambda: Optional[LambdaFn] = None
    analytic_density: Optional[Evaluator] = None
    frailty_sampler: Optional[FrailtySampler] = None
    levy: Optional[LevyTriplet] = None
    native_marginals: Optional[MarginalSpec] = None
    params: Mapping[str, object] = field(default_factory=dict)
    components: tuple["LaplaceModel", ...] = ()

    def oracle(self) -> SurvivalOracle:
        return SurvivalOracle(
            d=self.d,
            evaluator=self.psi,
            log_evaluator=self.log_psi,
            name=self.name,
        )

    @property
    def marginals(self) -> MarginalSpec:
        if self.native_marginals is not None:
            return self.native_marginals
        implicit = []
        for axis in range(self.d):
            index = IndexSet.of(self.d, axis + 1)
            implicit.append(ImplicitMarginal(
                survival=_axis_fn(self.psi, index),
                log_survival=_axis_fn(self.log_psi, index) if self.log_psi else None,
                name=f"{self.name}[{axis + 1}]",
            ))
        return MarginalSpec(tuple(implicit))


def _axis_fn(fn: Evaluator, index: IndexSet) -> Callable[[np.ndarray], np.ndarray]:
    def along(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return np.asarray(fn(index.embed(t.reshape(-1, 1)))).reshape(t.shape)
    return along


@dataclass(frozen=True, eq=False)
class ExpFamilySample:
    """Tirages de Q_0 pondérés vers Q_t (poids auto-normalisés)"""

    draws: np.ndarray
    weights: np.ndarray
    t: np.ndarray
    seed: int

    @property
    def effective_size(self) -> float:
        return float(1.0 / np.sum(self.weights ** 2))


@dataclass(frozen=True)
class CovEstimate:
    estimate: float
    stderr: float
    effective_size: float
    degenerate: bool
    n: int
    seed: int
