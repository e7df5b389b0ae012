from fastapi import APIRouter

from app.api.v1.endpoints import models, verification

api_router = APIRouter()
api_router.include_router(models.router)
api_router.include_router(verification.router)
