from typing import Optional

import numpy as np

from app.core.exceptions import CapabilityError
from app.core.frailty import sample_lifetimes
from app.models.catalog import CatalogModel
from app.models.grid_table import GridTable
from app.repositories.grid_csv import GridCSVRepository


class SamplingService:
    def __init__(self, repository: Optional[GridCSVRepository] = None):
        self.repository = repository or GridCSVRepository()

    def sample(self, model: CatalogModel, n: int, seed: int) -> np.ndarray:
        """
        n tirages de durées de vie (n, d), fonction déterministe de (modèle, n, seed)

        Avec des marginales remplacées, T' = Λ'^{-1}(Λ(T)) composante par composante.

        Raises:
            CapabilityError: si le modèle n'a pas d'échantillonneur
        """
        if not model.samplable:
            raise CapabilityError(f"Le modèle {model.name} n'a pas d'échantillonneur", model=model.name)
        draws = sample_lifetimes(model.frailty, n, seed)
        if model.target_marginals is not None:
            draws = model.target_marginals.inverse_cum_hazard(model.frailty.marginals.cum_hazard(draws))
        return draws

    def sample_table(self, model: CatalogModel, n: int, seed: int) -> GridTable:
        return self.repository.sample_table(model.name, model.params, self.sample(model, n, seed), seed)
