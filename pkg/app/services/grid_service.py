from typing import Optional

import numpy as np

from app.config.settings import settings
from app.core import depfun
from app.core.exceptions import CapabilityError, DomainError
from app.core.lattice import exponent_of_parts, factorize
from app.core.logging import get_logger
from app.models.catalog import CatalogModel
from app.models.depfun import GammaGrid
from app.models.grid_table import GridTable
from app.models.lattice import GridSpec, IndexSet
from app.repositories.grid_csv import GridCSVRepository
from app.schemas.grid import GridConfig

logger = get_logger("grid_service")


class GridService:
    def __init__(self, repository: Optional[GridCSVRepository] = None):
        self.repository = repository or GridCSVRepository()

    # ==================== SURVIE ====================

    def survival(self, model: CatalogModel, points) -> np.ndarray:
        """
        S aux points donnés

        Raises:
            DomainError: si un point sort du domaine du modèle
        """
        oracle = model.oracle()
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if np.any(~np.isfinite(points)) or np.any(points < oracle.lower) or np.any(points > oracle.upper):
            raise DomainError(f"Point hors du domaine de {model.name}", point=points[0])
        return np.atleast_1d(oracle(points))

    # ==================== γ₀ ====================

    def gamma_grid(
        self,
        model: CatalogModel,
        pair: tuple[int, int] = (1, 2),
        resolution: Optional[int] = None,
        delta: Optional[float] = None,
        route: str = "auto",
    ) -> GammaGrid:
        if model.model is None:
            raise CapabilityError(f"Pas de marginales pour le modèle {model.name} : γ₀ indisponible", model=model.name)
        return depfun.gamma_grid(model.model, pair, resolution, delta, route)

    def gamma_table(self, model: CatalogModel, **kwargs) -> GridTable:
        return self.repository.from_gamma_grid(self.gamma_grid(model, **kwargs))

    # ==================== FACTORISATION ====================

    def exponent_grid(self, model: CatalogModel, subset: IndexSet, grid: GridConfig) -> GridTable:
        """
        Λ_I sur la grille produit LO:HI:N des axes de I

        Sur le cube unité (min-ID, copules de score), HI doit rester <= 1-δ.

        Raises:
            StructuralError: si I n'appartient pas à la dimension du modèle
            DomainError: si S^K s'annule sur la grille
        """
        subset.require_nonempty()
        axis = np.linspace(grid.lower, grid.upper, grid.nodes)
        spec = GridSpec(
            tuple(axis for _ in range(subset.size)), model.domain, settings.boundary_delta
        )
        exponents = exponent_of_parts(factorize(model.oracle(), subset, spec))
        values = exponents.exponent(subset)
        logger.info("Λ_%s de %s sur %d^%d nœuds", subset, model.name, grid.nodes, subset.size)
        return self.repository.exponent_table(model.name, model.params, subset, spec.axes, values)

    def save(self, table: GridTable, path):
        return self.repository.save(table, path)
