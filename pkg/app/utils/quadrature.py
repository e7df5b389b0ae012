import itertools
from functools import lru_cache

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.integrate import simpson

from app.config.settings import settings


def unit_nodes(n: int | None = None) -> np.ndarray:
    """Nœuds uniformes inclusifs sur [0, 1] (nombre impair pour Simpson)"""
    n = n or settings.simpson_nodes
    if n % 2 == 0:
        n += 1
    return np.linspace(0.0, 1.0, n)


def simpson_unit(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Intègre des valeurs échantillonnées sur unit_nodes le long d'un axe"""
    values = np.asarray(values, dtype=float)
    x = np.linspace(0.0, 1.0, values.shape[axis])
    return simpson(values, x=x, axis=axis)


def simpson_interval(fn, upper: np.ndarray, n: int | None = None) -> np.ndarray:
    """
    ∫_0^upper fn(v) dv pour chaque borne supérieure (vectorisé)

    Args:
        fn: fonction vectorisée
        upper: bornes supérieures, forme quelconque
        n: nombre de nœuds de Simpson

    Returns:
        np.ndarray: intégrales, même forme que upper
    """
    upper = np.asarray(upper, dtype=float)
    frac = unit_nodes(n)
    v = upper[..., None] * frac
    return simpson(fn(v), x=frac, axis=-1) * upper


@lru_cache(maxsize=16)
def gauss_hermite_tensor(nodes: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Nœuds et poids de Gauss-Hermite pour une gaussienne standard en dimension d

    Returns:
        (z, w): z de forme (nodes**d, d), poids normalisés de somme 1
    """
    x, w = hermgauss(nodes)
    z = np.array(list(itertools.product(x * np.sqrt(2.0), repeat=d)))
    weights = np.prod(np.array(list(itertools.product(w, repeat=d))), axis=1) / np.pi ** (d / 2)
    z.setflags(write=False)
    weights.setflags(write=False)
    return z, weights
