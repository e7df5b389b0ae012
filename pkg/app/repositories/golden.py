"""
Grilles de référence des figures, une par fichier <nom>.csv
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.config.settings import settings
from app.core.exceptions import StorageError
from app.models.grid_table import GridTable
from app.repositories.grid_csv import GridCSVRepository
from app.schemas.figures import FigureConfig

# L'en-tête params n'est pas comparé : il dépend de l'écriture des flottants
COMPARED_HEADERS = ("I", "resolution", "delta", "provenance")


@dataclass(frozen=True)
class GoldenComparison:
    name: str
    max_abs_error: float
    mismatched_headers: tuple[str, ...]
    mask_agrees: bool
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.mask_agrees and not self.mismatched_headers and self.max_abs_error <= self.tolerance


class GoldenRepository(GridCSVRepository):
    def __init__(self, root=None):
        super().__init__(root if root is not None else settings.golden_dir)

    def path_for(self, figure: FigureConfig):
        return self.resolve(figure.filename)

    def load_figure(self, figure: FigureConfig) -> GridTable:
        if not self.exists(figure.filename):
            raise StorageError(f"Grille de référence absente : {self.path_for(figure)}", figure=figure.name)
        return self.load(figure.filename)

    def save_figure(self, figure: FigureConfig, table: GridTable):
        return self.save(table, figure.filename)

    @staticmethod
    def compare(
        name: str,
        expected: GridTable,
        actual: GridTable,
        rel_tol: float = 1e-10,
    ) -> GoldenComparison:
        """
        Compare deux grilles nœud à nœud

        L'erreur est rapportée à max(1, |valeur attendue|) ; les nœuds nan
        doivent coïncider exactement.

        Returns:
            GoldenComparison: pire écart et en-têtes divergents
        """
        mismatched = tuple(
            key for key in COMPARED_HEADERS if expected.header.get(key) != actual.header.get(key)
        )
        if expected.data.shape != actual.data.shape:
            return GoldenComparison(name, float("inf"), mismatched + ("shape",), False, rel_tol)
        coords_error = float(np.max(np.abs(expected.coordinates - actual.coordinates), initial=0.0))
        want, got = expected.data[:, -1], actual.data[:, -1]
        mask_want, mask_got = np.isnan(want), np.isnan(got)
        mask_agrees = bool(np.array_equal(mask_want, mask_got))
        keep = ~(mask_want | mask_got)
        scaled = np.abs(want[keep] - got[keep]) / np.maximum(1.0, np.abs(want[keep]))
        worst = max(coords_error, float(np.max(scaled, initial=0.0)))
        return GoldenComparison(name, worst, mismatched, mask_agrees, rel_tol)

    def compare_figure(self, figure: FigureConfig, actual: GridTable, rel_tol: Optional[float] = None) -> GoldenComparison:
        return self.compare(figure.name, self.load_figure(figure), actual, rel_tol or 1e-10)
