from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class MinIdAtom(BaseModel):
    """Masse w_k posée en p_k ∈ [0,1]^d, p_k != (1,...,1)"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    w: float = Field(gt=0)
    p: tuple[float, ...]

    @field_validator("p")
    @classmethod
    def inside_cube(cls, p: tuple[float, ...]) -> tuple[float, ...]:
        if not p or any(not 0 <= v <= 1 for v in p):
            raise ValueError("les atomes doivent être dans [0,1]^d")
        if all(v == 1 for v in p):
            raise ValueError("l'atome (1,...,1) est interdit")
        return p


class DiscreteExponentMeasure(BaseModel):
    """
    Mesure d'exposant discrète sur [0,1]^d \\ {1}, avec la partie de bord
    analytique optionnelle qui ajoute -Σ log(1 - x_i) à l'exposant
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    d: int = Field(ge=1, le=12)
    atoms: tuple[MinIdAtom, ...] = ()
    uniform_margin_boundary: bool = False

    @model_validator(mode="after")
    def same_dimension(self) -> "DiscreteExponentMeasure":
        for k, atom in enumerate(self.atoms):
            if len(atom.p) != self.d:
                raise ValueError(f"l'atome {k} n'a pas la dimension {self.d}")
        return self

    @property
    def weights(self) -> np.ndarray:
        return np.asarray([a.w for a in self.atoms], dtype=float)

    @property
    def locations(self) -> np.ndarray:
        if not self.atoms:
            return np.zeros((0, self.d))
        return np.asarray([a.p for a in self.atoms], dtype=float)


@dataclass(frozen=True)
class IndependenceReport:
    """Verdicts Λ_I ≡ 0 par sous-ensemble (|I| >= 2)"""

    vanishing: dict[str, bool] = field(default_factory=dict)
    pairwise_zero: bool = True
    all_zero: bool = True
    implication_holds: bool = True
    copula: bool = False
