"""
Configurations des grilles de figures (γ₀ sur 101 × 101 nœuds de [0, 0.99]²)
"""

import math

from pydantic import BaseModel, ConfigDict

from app.schemas.model_spec import ModelSpec, model_spec_adapter


class FigureConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    spec: ModelSpec
    pair: tuple[int, int] = (1, 2)
    resolution: int = 101
    delta: float = 0.01

    @property
    def filename(self) -> str:
        return f"{self.name}.csv"


def _figure(name: str, spec: dict, pair: tuple[int, int] = (1, 2)) -> FigureConfig:
    return FigureConfig(name=name, spec=model_spec_adapter.validate_python(spec), pair=pair)


def _chisq_sigma(rho2: float) -> list[list[float]]:
    rho = math.sqrt(rho2)
    return [[1.0, rho, 0.0], [rho, 1.0, 0.0], [0.0, 0.0, 1.0]]


FRANK_THETAS = (-5.0, 2.0, -2.0, -0.5, 0.5, 5.0, 10.0)
CHISQ_RHO2 = (0.9, 0.5, 0.1)

FIGURES: tuple[FigureConfig, ...] = (
    _figure("clayton", {"type": "clayton"}),
    *(_figure(f"frank_theta{theta:g}", {"type": "frank", "theta": theta}) for theta in FRANK_THETAS),
    _figure("invgauss_theta1", {"type": "invgauss", "theta": 1.0}),
    *(_figure(f"chisq3_rho2_{rho2:g}", {"type": "chisq3", "sigma": _chisq_sigma(rho2)}) for rho2 in CHISQ_RHO2),
    _figure("prop_beta1", {"type": "prop", "beta": 1.0}),
)


def figure_by_name(name: str) -> FigureConfig:
    for figure in FIGURES:
        if figure.name == name:
            return figure
    raise KeyError(name)
