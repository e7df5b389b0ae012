from dataclasses import dataclass
from typing import Optional, Union

from app.core.minid import exponent_measure_oracle
from app.models.depfun import MarginalSpec, SurvivalModel
from app.models.laplace import LaplaceModel
from app.models.lattice import Domain, SurvivalOracle
from app.models.minid import DiscreteExponentMeasure
from app.models.score import ScoreCopula

CatalogEntry = Union[LaplaceModel, SurvivalModel, ScoreCopula]


@dataclass(frozen=True, eq=False)
class CatalogModel:
    """
    Modèle construit à partir d'une spécification JSON

    Les modèles min-ID n'ont pas d'objet modèle : seule la mesure
    d'exposant est portée, et l'oracle de survie en dérive. Quand les
    marginales sont remplacées, frailty garde le modèle de fragilité
    natif (échantillonnage) et model le modèle re-marginalisé.
    """

    type: str
    model: Optional[CatalogEntry] = None
    measure: Optional[DiscreteExponentMeasure] = None
    frailty: Optional[LaplaceModel] = None
    target_marginals: Optional[MarginalSpec] = None

    @property
    def name(self) -> str:
        return self.model.name if self.model is not None else self.type

    @property
    def d(self) -> int:
        return self.model.d if self.model is not None else self.measure.d

    @property
    def params(self) -> dict:
        if self.model is not None:
            return dict(self.model.params)
        return {
            "atoms": [{"w": a.w, "p": list(a.p)} for a in self.measure.atoms],
            "uniform_margin_boundary": self.measure.uniform_margin_boundary,
        }

    @property
    def domain(self) -> Domain:
        return "unit" if self.type in ("minid", "score_copula") else "orthant"

    @property
    def samplable(self) -> bool:
        frailty = self.frailty
        if frailty is None:
            return False
        if frailty.components:
            return all(c.frailty_sampler is not None for c in frailty.components)
        return frailty.frailty_sampler is not None

    def oracle(self) -> SurvivalOracle:
        if self.model is None:
            return exponent_measure_oracle(self.measure)
        return self.model.oracle()
