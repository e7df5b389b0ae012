"""
Fichiers GridCSV

    # model=clayton
    # I={1,2}
    # resolution=101
    # provenance=closed-form
    u1,u2,value
    0,0,1
    ...

Valeurs imprimées avec 12 chiffres significatifs, nœuds masqués écrits nan.
"""

import json
from typing import Optional

import numpy as np

from app.core.exceptions import StorageError, StructuralError
from app.models.depfun import GammaGrid
from app.models.grid_table import GridTable
from app.models.lattice import MAX_DIMENSION, IndexSet
from app.repositories.base import BaseRepository


def format_value(value: float) -> str:
    return "%.12g" % value


def params_header(params: dict) -> str:
    return json.dumps(params, sort_keys=True, separators=(",", ":"), default=str)


class GridCSVRepository(BaseRepository[GridTable]):

    # ==================== SÉRIALISATION ====================

    def render(self, table: GridTable) -> str:
        lines = [f"# {key}={value}" for key, value in table.header.items()]
        lines.append(",".join(table.columns))
        for row in table.data:
            lines.append(",".join(format_value(v) for v in row))
        return "\n".join(lines) + "\n"

    def parse(self, text: str, source: str = "<texte>") -> GridTable:
        """
        Relit un GridCSV ; la forme de la grille vient de l'en-tête resolution

        Raises:
            StorageError: si le fichier est mal formé
        """
        header: dict[str, str] = {}
        columns: Optional[tuple[str, ...]] = None
        rows = []
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            if line.startswith("#"):
                key, sep, value = line[1:].strip().partition("=")
                if not sep:
                    raise StorageError(f"En-tête illisible ligne {number} de {source}", line=number)
                header[key.strip()] = value.strip()
            elif columns is None:
                columns = tuple(part.strip() for part in line.split(","))
            else:
                try:
                    rows.append([float(part) for part in line.split(",")])
                except ValueError as exc:
                    raise StorageError(f"Valeur illisible ligne {number} de {source}", line=number) from exc
        if columns is None:
            raise StorageError(f"Fichier sans ligne de colonnes : {source}")
        data = np.asarray(rows, dtype=float).reshape(-1, len(columns))
        shape: tuple[int, ...] = ()
        if "resolution" in header and columns[-1] == "value":
            shape = (int(header["resolution"]),) * (len(columns) - 1)
        try:
            return GridTable(header=header, columns=columns, data=data, shape=shape)
        except StructuralError as exc:
            raise StorageError(f"{source} : {exc.detail}") from exc

    def load(self, path) -> GridTable:
        return self.parse(self.read_text(path), str(self.resolve(path)))

    def save(self, table: GridTable, path):
        return self.write_text(path, self.render(table))

    # ==================== GRILLES γ₀ ====================

    @staticmethod
    def from_gamma_grid(grid: GammaGrid) -> GridTable:
        mesh = np.meshgrid(*grid.axes, indexing="ij")
        data = np.column_stack([m.ravel() for m in mesh] + [grid.values.ravel()])
        header = {
            "model": grid.model,
            "params": params_header(grid.params),
            "I": str(grid.I),
            "resolution": str(grid.resolution),
            "delta": format_value(grid.delta),
            "provenance": grid.provenance,
        }
        columns = tuple(f"u{k + 1}" for k in range(len(grid.axes))) + ("value",)
        return GridTable(header=header, columns=columns, data=data, shape=grid.values.shape)

    @staticmethod
    def to_gamma_grid(table: GridTable, d: Optional[int] = None) -> GammaGrid:
        """Relit une grille γ₀ ; sans d explicite, d est le plus grand indice de I"""
        try:
            members = IndexSet.parse(table.header["I"], MAX_DIMENSION).members
            I = IndexSet.of(d or max(members), *members)
            provenance = table.header["provenance"]
            delta = float(table.header["delta"])
        except KeyError as exc:
            raise StorageError(f"En-tête manquant : {exc.args[0]}") from exc
        return GammaGrid(
            I=I, axes=table.axes(), values=table.values, provenance=provenance, delta=delta,
            model=table.header.get("model", ""), params=json.loads(table.header.get("params", "{}")),
        )

    def save_gamma_grid(self, grid: GammaGrid, path):
        return self.save(self.from_gamma_grid(grid), path)

    # ==================== EXPOSANTS ET ÉCHANTILLONS ====================

    @staticmethod
    def exponent_table(model: str, params: dict, I: IndexSet, axes: tuple[np.ndarray, ...], values: np.ndarray) -> GridTable:
        mesh = np.meshgrid(*axes, indexing="ij")
        data = np.column_stack([m.ravel() for m in mesh] + [np.asarray(values).ravel()])
        header = {
            "model": model,
            "params": params_header(params),
            "I": str(I),
            "resolution": str(axes[0].size),
            "kind": "exponent",
        }
        columns = tuple(f"u{k + 1}" for k in range(len(axes))) + ("value",)
        return GridTable(header=header, columns=columns, data=data, shape=tuple(a.size for a in axes))

    @staticmethod
    def sample_table(model: str, params: dict, draws: np.ndarray, seed: int) -> GridTable:
        header = {
            "model": model,
            "params": params_header(params),
            "n": str(draws.shape[0]),
            "seed": str(seed),
        }
        columns = tuple(f"t{k + 1}" for k in range(draws.shape[1]))
        return GridTable(header=header, columns=columns, data=draws)
