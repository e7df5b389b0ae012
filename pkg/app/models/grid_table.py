from dataclasses import dataclass, field

import numpy as np

from app.core.exceptions import StructuralError


@dataclass(frozen=True, eq=False)
class GridTable:
    """
    Contenu d'un fichier GridCSV : en-têtes "# clé=valeur", colonnes
    u1..uk,value (ou t1..td pour les échantillons), lignes en ordre ligne
    """

    header: dict[str, str]
    columns: tuple[str, ...]
    data: np.ndarray
    shape: tuple[int, ...] = field(default=())

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim != 2 or data.shape[1] != len(self.columns):
            raise StructuralError(
                f"Table de forme {data.shape} pour {len(self.columns)} colonnes"
            )
        if self.shape and int(np.prod(self.shape)) != data.shape[0]:
            raise StructuralError(
                f"{data.shape[0]} lignes, attendu {int(np.prod(self.shape))}", shape=list(self.shape)
            )
        object.__setattr__(self, "data", data)

    @property
    def coordinates(self) -> np.ndarray:
        return self.data[:, :-1]

    @property
    def values(self) -> np.ndarray:
        """Valeurs remises à la forme de la grille"""
        column = self.data[:, -1]
        return column.reshape(self.shape) if self.shape else column

    def axes(self) -> tuple[np.ndarray, ...]:
        """Axes de la grille, déduits des coordonnées en ordre ligne"""
        if not self.shape:
            raise StructuralError("Table sans forme de grille")
        coords = self.coordinates.reshape(*self.shape, len(self.shape))
        out = []
        for k in range(len(self.shape)):
            index = [0] * len(self.shape)
            index[k] = slice(None)
            out.append(coords[tuple(index) + (k,)].copy())
        return tuple(out)
