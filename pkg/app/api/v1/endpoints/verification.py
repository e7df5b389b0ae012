from fastapi import APIRouter, Depends

from app.api.dependencies import get_verification_service
from app.schemas.grid import Suite, VerificationReport
from app.services.verification_service import VerificationService

router = APIRouter(prefix="/verify", tags=["verification"])


@router.get("/{suite}", response_model=VerificationReport)
def run_suite(
    suite: Suite,
    service: VerificationService = Depends(get_verification_service),
):
    """
    Exécute une suite de vérification

    Le rapport est renvoyé tel quel, y compris en cas d'échec (passed = false).
    """
    return service.run(suite)
