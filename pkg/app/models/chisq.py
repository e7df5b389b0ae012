from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

MAX_CONDITION = 1e12


class GaussianCovariance(BaseModel):
    """Matrice de covariance Σ d'un vecteur gaussien centré Z"""

    model_config = ConfigDict(frozen=True, extra="forbid", ignored_types=(cached_property,))

    sigma: tuple[tuple[float, ...], ...]

    @field_validator("sigma")
    @classmethod
    def positive_definite(cls, sigma):
        matrix = np.asarray(sigma, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
            raise ValueError("Σ doit être une matrice carrée")
        if not np.all(np.isfinite(matrix)) or not np.allclose(matrix, matrix.T, rtol=0, atol=1e-12):
            raise ValueError("Σ doit être symétrique")
        try:
            np.linalg.cholesky(matrix)
        except np.linalg.LinAlgError:
            raise ValueError("Σ n'est pas définie positive")
        if np.linalg.cond(matrix) > MAX_CONDITION:
            raise ValueError(f"Σ est quasi singulière (conditionnement > {MAX_CONDITION:g})")
        return sigma

    @property
    def d(self) -> int:
        return len(self.sigma)

    @cached_property
    def matrix(self) -> np.ndarray:
        m = np.asarray(self.sigma, dtype=float)
        m = (m + m.T) / 2
        m.setflags(write=False)
        return m

    @cached_property
    def cholesky(self) -> np.ndarray:
        return np.linalg.cholesky(self.matrix)

    @property
    def variances(self) -> np.ndarray:
        return np.diag(self.matrix).copy()

    @property
    def correlation(self) -> np.ndarray:
        s = np.sqrt(self.variances)
        return self.matrix / np.outer(s, s)


class TrivariateChiSqParams(GaussianCovariance):
    """Σ 3×3 du modèle χ² trivarié, avec les déterminants Δ et Δ_ij"""

    @field_validator("sigma")
    @classmethod
    def three_by_three(cls, sigma):
        if len(sigma) != 3 or any(len(row) != 3 for row in sigma):
            raise ValueError("Σ doit être 3×3")
        return sigma

    @property
    def delta(self) -> float:
        return float(np.linalg.det(self.matrix))

    def delta_pair(self, i: int, j: int) -> float:
        """Δ_ij = σ_i² σ_j² - σ_ij² (indices à partir de 1)"""
        m = self.matrix
        return float(m[i - 1, i - 1] * m[j - 1, j - 1] - m[i - 1, j - 1] ** 2)

    def rho(self, i: int, j: int) -> float:
        return float(self.correlation[i - 1, j - 1])

    def cov(self, i: int, j: int) -> float:
        return float(self.matrix[i - 1, j - 1])


class ChiSqParts(BaseModel):
    """Formes closes du modèle χ² trivarié en un point"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    S: float
    S_i: tuple[float, float, float]
    S_pair: dict[tuple[int, int], float]
    S_dep_pair: dict[tuple[int, int], float]
    S_dep_triple: float
    lambda_pair: dict[tuple[int, int], float]
