from fastapi import APIRouter, Depends

from app.api.dependencies import get_catalog_service, get_grid_service, get_sampling_service
from app.models.lattice import IndexSet
from app.schemas.grid import (
    FactorizeRequest,
    FactorizeResponse,
    GammaGridRequest,
    GammaGridResponse,
    SampleRequest,
    SampleResponse,
    SurvivalRequest,
    SurvivalResponse,
)
from app.services.catalog import CatalogService
from app.services.grid_service import GridService
from app.services.sampling_service import SamplingService

router = APIRouter(prefix="/models", tags=["models"])


@router.post("/survival", response_model=SurvivalResponse)
def evaluate_survival(
    request: SurvivalRequest,
    catalog: CatalogService = Depends(get_catalog_service),
    grids: GridService = Depends(get_grid_service),
):
    model = catalog.build(request.model)
    values = grids.survival(model, request.points)
    return SurvivalResponse(model=model.name, values=values.tolist())


@router.post("/gamma-grid", response_model=GammaGridResponse)
def gamma_grid(
    request: GammaGridRequest,
    catalog: CatalogService = Depends(get_catalog_service),
    grids: GridService = Depends(get_grid_service),
):
    """γ_{0,{i,j}} sur [0, 1-δ]², valeurs masquées renvoyées à null"""
    model = catalog.build(request.model)
    grid = grids.gamma_grid(model, request.pair, request.resolution, request.delta, request.route)
    return GammaGridResponse(
        model=model.name,
        subset=str(grid.I),
        provenance=grid.provenance,
        resolution=grid.resolution,
        delta=grid.delta,
        axis=grid.axes[0].tolist(),
        values=grid.values.tolist(),
        masked=[tuple(idx) for idx in grid.masked],
    )


@router.post("/factorize", response_model=FactorizeResponse)
def factorize(
    request: FactorizeRequest,
    catalog: CatalogService = Depends(get_catalog_service),
    grids: GridService = Depends(get_grid_service),
):
    model = catalog.build(request.model)
    subset = IndexSet.parse(request.subset, model.d)
    table = grids.exponent_grid(model, subset, request.grid)
    return FactorizeResponse(
        model=model.name,
        subset=str(subset),
        shape=list(table.shape),
        axes=[axis.tolist() for axis in table.axes()],
        values=table.values.ravel().tolist(),
    )


@router.post("/sample", response_model=SampleResponse)
def sample(
    request: SampleRequest,
    catalog: CatalogService = Depends(get_catalog_service),
    sampler: SamplingService = Depends(get_sampling_service),
):
    model = catalog.build(request.model)
    draws = sampler.sample(model, request.n, request.seed)
    return SampleResponse(model=model.name, seed=request.seed, rows=draws.tolist())
