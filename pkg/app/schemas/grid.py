"""
Schémas d'entrée/sortie de l'API et des rapports de vérification
"""

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.schemas.model_spec import ModelSpec


def _nullable(values) -> list:
    """NaN -> None pour la sérialisation JSON"""
    return [None if isinstance(v, float) and math.isnan(v) else v for v in values]


# ==================== GRILLES ====================

class GridConfig(BaseModel):
    """Grille uniforme LO:HI:N, identique sur chaque axe"""

    model_config = ConfigDict(extra="forbid")

    lower: float = Field(default=0.0, ge=0)
    upper: float = Field(gt=0)
    nodes: int = Field(ge=2, le=1001)

    @classmethod
    def parse(cls, text: str) -> "GridConfig":
        """Lit la notation LO:HI:N"""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grille attendue au format LO:HI:N, reçu {text!r}")
        return cls(lower=float(parts[0]), upper=float(parts[1]), nodes=int(parts[2]))


# ==================== REQUÊTES ====================

class SurvivalRequest(BaseModel):
    model: ModelSpec
    points: list[list[float]] = Field(min_length=1, max_length=10_000)


class SurvivalResponse(BaseModel):
    model: str
    values: list[float]


class GammaGridRequest(BaseModel):
    model: ModelSpec
    pair: tuple[int, int] = (1, 2)
    resolution: int = Field(default=101, ge=2, le=501)
    delta: float = Field(default=0.01, gt=0, lt=1)
    route: Literal["auto", "closed-form", "analytic", "fd"] = "auto"


class GammaGridResponse(BaseModel):
    model: str
    subset: str
    provenance: str
    resolution: int
    delta: float
    axis: list[float]
    values: list[list[Optional[float]]]
    masked: list[tuple[int, int]] = []

    @field_validator("values", mode="before")
    @classmethod
    def nan_to_null(cls, rows):
        return [_nullable(list(row)) for row in rows]


class FactorizeRequest(BaseModel):
    model: ModelSpec
    subset: str = Field(description="ensemble d'indices, ex. \"1,2\"")
    grid: GridConfig


class FactorizeResponse(BaseModel):
    model: str
    subset: str
    shape: list[int]
    axes: list[list[float]]
    values: list[float] = Field(description="Λ_I en ordre ligne (row-major)")


class SampleRequest(BaseModel):
    model: ModelSpec
    n: int = Field(ge=1, le=100_000)
    seed: int = Field(default=0, ge=0)


class SampleResponse(BaseModel):
    model: str
    seed: int
    rows: list[list[float]]


# ==================== VÉRIFICATION ====================

Suite = Literal["lattice", "frailty", "levy", "minid", "depfun", "higher", "figures", "all"]
SUITES: tuple[str, ...] = ("lattice", "frailty", "levy", "minid", "depfun", "higher", "figures")


class CheckResult(BaseModel):
    name: str
    passed: bool
    value: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""

    @field_validator("value", mode="before")
    @classmethod
    def finite_or_null(cls, value):
        if isinstance(value, float) and not math.isfinite(value):
            return None
        return value


class VerificationReport(BaseModel):
    suite: str
    passed: bool
    duration_s: float
    checks: list[CheckResult]

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]
