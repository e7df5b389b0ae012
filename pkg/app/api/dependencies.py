"""
Dépendances communes utilisées dans les endpoints FastAPI
Ce fichier centralise les services injectés dans les routes
"""

from app.repositories.golden import GoldenRepository
from app.repositories.grid_csv import GridCSVRepository
from app.services.catalog import CatalogService
from app.services.grid_service import GridService
from app.services.sampling_service import SamplingService
from app.services.verification_service import VerificationService

# ==================== INJECTION DE SERVICES ====================

def get_catalog_service() -> CatalogService:
    """
    Factory pour le service de catalogue

    Returns:
        CatalogService: construit les modèles à partir des spécifications
    """
    return CatalogService()


def get_grid_service() -> GridService:
    """
    Factory pour le service de grilles (S, γ₀, Λ_I)

    Returns:
        GridService: Instance du service de grilles
    """
    return GridService(GridCSVRepository())


def get_sampling_service() -> SamplingService:
    return SamplingService()


def get_verification_service() -> VerificationService:
    """
    Factory pour le service de vérification

    Les grilles de référence sont lues dans settings.golden_dir.

    Returns:
        VerificationService: Instance du service de vérification
    """
    return VerificationService(goldens=GoldenRepository())
