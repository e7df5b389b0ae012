"""
Hiérarchie des erreurs de l'application
Chaque erreur porte un message lisible, un contexte structuré,
un code de sortie CLI et un statut HTTP
"""

from typing import Any


class HazdepError(Exception):
    """Erreur de base de l'application"""

    exit_code: int = 3
    status_code: int = 422

    def __init__(self, detail: str, **context: Any):
        super().__init__(detail)
        self.detail = detail
        self.context = context

    def to_dict(self) -> dict[str, Any]:
        return {
            "error": type(self).__name__,
            "detail": self.detail,
            "context": {k: _plain(v) for k, v in self.context.items()},
        }


class DomainError(HazdepError):
    """Valeur hors du domaine (survie nulle, point hors grille, paramètre hors bornes)"""


class NumericError(HazdepError):
    """Quadrature non finie ou désaccord entre deux routes de calcul"""


class StructuralError(HazdepError):
    """Sous-ensemble manquant, dimensions incompatibles"""

    exit_code = 2
    status_code = 400


class SpecValidationError(StructuralError):
    """Spécification de modèle invalide (schéma JSON)"""

    status_code = 422


class CapabilityError(HazdepError):
    """Le modèle ne fournit pas la capacité demandée (échantillonneur, paire...)"""

    exit_code = 2
    status_code = 400


class StorageError(HazdepError):
    """Lecture ou écriture de fichier impossible"""

    exit_code = 2
    status_code = 500


class VerificationFailure(HazdepError):
    """Au moins une vérification a échoué"""

    exit_code = 1
    status_code = 500


def _plain(value: Any) -> Any:
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)
