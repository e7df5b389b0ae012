"""
Schémas JSON des spécifications de modèles (version "schema": 1)

Chaque type de modèle a son propre schéma ; les champs inconnus sont
rejetés. Le champ "type" sert de discriminant.
"""

from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator

from app.models.levy import LevyAtom
from app.models.minid import MinIdAtom


class SpecBase(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    schema_version: Literal[1] = Field(default=1, alias="schema")


# ==================== MARGINALES ====================

class MarginalConfig(BaseModel):
    """Loi marginale d'un axe : exponential(rate), weibull(shape, scale), lomax(shape, scale), uniform"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["exponential", "weibull", "lomax", "uniform"]
    rate: float = Field(default=1.0, gt=0)
    shape: float = Field(default=1.0, gt=0)
    scale: float = Field(default=1.0, gt=0)


MarginalsField = Optional[Union[MarginalConfig, list[MarginalConfig]]]


class MarginalSpecMixin(BaseModel):
    marginals: MarginalsField = None


# ==================== MODÈLES DE FRAGILITÉ ====================

class IndependenceSpec(SpecBase, MarginalSpecMixin):
    type: Literal["independence"]
    d: int = Field(default=2, ge=1, le=12)


class ClaytonSpec(SpecBase, MarginalSpecMixin):
    type: Literal["clayton"]
    d: int = Field(default=2, ge=2, le=12)


class SharedGammaSpec(SpecBase, MarginalSpecMixin):
    type: Literal["shared_gamma"]
    shape: float = Field(gt=0)
    d: int = Field(default=2, ge=2, le=12)


class InvGaussSpec(SpecBase, MarginalSpecMixin):
    type: Literal["invgauss"]
    theta: float = Field(default=1.0, gt=0)
    d: int = Field(default=2, ge=2, le=12)


class FrankSpec(SpecBase, MarginalSpecMixin):
    type: Literal["frank"]
    theta: float

    @field_validator("theta")
    @classmethod
    def nonzero(cls, theta: float) -> float:
        if theta == 0:
            raise ValueError("θ doit être non nul")
        return theta


class ChiSq3Spec(SpecBase, MarginalSpecMixin):
    type: Literal["chisq3"]
    sigma: tuple[tuple[float, float, float], tuple[float, float, float], tuple[float, float, float]]


class ChiSqSpec(SpecBase, MarginalSpecMixin):
    type: Literal["chisq"]
    sigma: tuple[tuple[float, ...], ...]


class LogNormalSpec(SpecBase, MarginalSpecMixin):
    type: Literal["lognormal"]
    sigma: tuple[tuple[float, ...], ...]
    mu: Optional[tuple[float, ...]] = None
    nodes: Optional[int] = Field(default=None, ge=4, le=128)


class CompoundPoissonSpec(SpecBase, MarginalSpecMixin):
    type: Literal["compound_poisson"]
    b: tuple[float, ...]
    atoms: tuple[LevyAtom, ...] = ()


# ==================== MODÈLES DE SURVIE ====================

class PropSpec(SpecBase, MarginalSpecMixin):
    type: Literal["prop"]
    beta: float = Field(ge=0, le=1)


class MultiPropSpec(SpecBase, MarginalSpecMixin):
    type: Literal["multi_prop"]
    d: int = Field(ge=2, le=12)
    beta: dict[str, float]


class MinIdSpec(SpecBase):
    type: Literal["minid"]
    d: int = Field(ge=1, le=12)
    atoms: tuple[MinIdAtom, ...] = ()
    uniform_margin_boundary: bool = False


# ==================== COPULES DE SCORE ====================

class PolynomialFactorConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["legendre-odd", "legendre"]
    degree: int = Field(ge=1)


class GridFactorConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: Literal["grid"]
    values: tuple[float, ...] = Field(min_length=4)


FactorConfig = Annotated[Union[PolynomialFactorConfig, GridFactorConfig], Field(discriminator="kind")]


class ScoreTermConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    coef: float
    factors: tuple[FactorConfig, ...] = Field(min_length=1)


class ScoreCopulaSpec(SpecBase):
    type: Literal["score_copula"]
    theta: float = Field(ge=0, le=1)
    terms: tuple[ScoreTermConfig, ...] = Field(min_length=1)


ModelSpec = Annotated[
    Union[
        IndependenceSpec,
        ClaytonSpec,
        SharedGammaSpec,
        InvGaussSpec,
        FrankSpec,
        ChiSq3Spec,
        ChiSqSpec,
        LogNormalSpec,
        CompoundPoissonSpec,
        PropSpec,
        MultiPropSpec,
        MinIdSpec,
        ScoreCopulaSpec,
    ],
    Field(discriminator="type"),
]

model_spec_adapter: TypeAdapter[ModelSpec] = TypeAdapter(ModelSpec)
