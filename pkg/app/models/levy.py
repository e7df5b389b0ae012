from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.core.exceptions import CapabilityError


class LevyAtom(BaseModel):
    """Saut x_k de l'intensité c_k"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    c: float = Field(gt=0)
    x: tuple[float, ...]

    @field_validator("x")
    @classmethod
    def jump_in_orthant(cls, x: tuple[float, ...]) -> tuple[float, ...]:
        if not x or any(not np.isfinite(v) or v < 0 for v in x):
            raise ValueError("les sauts doivent être finis et positifs ou nuls")
        if all(v == 0 for v in x):
            raise ValueError("le saut nul est interdit")
        return x


class LevyTriplet(BaseModel):
    """Dérive b et mesure de Lévy finie (cas Poisson composé)"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    b: tuple[float, ...]
    atoms: tuple[LevyAtom, ...] = ()

    @field_validator("b")
    @classmethod
    def drift_nonnegative(cls, b: tuple[float, ...]) -> tuple[float, ...]:
        if not b or any(not np.isfinite(v) or v < 0 for v in b):
            raise ValueError("la dérive doit être finie et positive ou nulle")
        return b

    @model_validator(mode="after")
    def same_dimension(self) -> "LevyTriplet":
        for k, atom in enumerate(self.atoms):
            if len(atom.x) != len(self.b):
                raise ValueError(f"l'atome {k} n'a pas la dimension {len(self.b)}")
        return self

    @property
    def d(self) -> int:
        return len(self.b)

    @property
    def drift(self) -> np.ndarray:
        return np.asarray(self.b, dtype=float)

    @property
    def intensities(self) -> np.ndarray:
        return np.asarray([a.c for a in self.atoms], dtype=float)

    @property
    def jumps(self) -> np.ndarray:
        if not self.atoms:
            return np.zeros((0, self.d))
        return np.asarray([a.x for a in self.atoms], dtype=float)


@dataclass(frozen=True)
class PositivityVerdict:
    ok: bool
    offending: tuple[int, ...] = ()

    def require(self) -> None:
        if not self.ok:
            raise CapabilityError(
                "Triplet non validé : dérive nulle sur les coordonnées "
                + ", ".join(str(i) for i in self.offending),
                offending=list(self.offending),
            )
