"""
Types du treillis des sous-ensembles : ensembles d'indices, grilles,
oracles de survie et tables de parts de dépendance
"""

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Iterator, Literal, Mapping, Optional

import numpy as np

from app.core.exceptions import DomainError, StructuralError

MAX_DIMENSION = 12

Evaluator = Callable[[np.ndarray], np.ndarray]


# ==================== ENSEMBLES D'INDICES ====================

@dataclass(frozen=True, order=False)
class IndexSet:
    """
    Sous-ensemble de {1, ..., d} codé par un masque de bits

    Le bit k correspond à l'indice k + 1 (indices publics à partir de 1).
    """

    bits: int
    d: int

    def __post_init__(self):
        if not 1 <= self.d <= MAX_DIMENSION:
            raise StructuralError("Dimension hors bornes", d=self.d, max=MAX_DIMENSION)
        if self.bits < 0 or self.bits >> self.d:
            raise StructuralError("Indices hors de {1..d}", bits=self.bits, d=self.d)

    @classmethod
    def of(cls, d: int, *indices: int) -> "IndexSet":
        bits = 0
        for i in indices:
            if not 1 <= i <= d:
                raise StructuralError(f"Indice {i} hors de 1..{d}", index=i, d=d)
            bits |= 1 << (i - 1)
        return cls(bits, d)

    @classmethod
    def full(cls, d: int) -> "IndexSet":
        return cls((1 << d) - 1, d)

    @classmethod
    def parse(cls, text: str, d: int) -> "IndexSet":
        """Lit une liste "1,2" (accolades tolérées)"""
        cleaned = text.strip().strip("{}")
        try:
            indices = [int(part) for part in cleaned.split(",") if part.strip()]
        except ValueError as exc:
            raise StructuralError(f"Ensemble d'indices illisible : {text!r}") from exc
        return cls.of(d, *indices)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(k + 1 for k in range(self.d) if self.bits >> k & 1)

    @property
    def axes(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.d) if self.bits >> k & 1)

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    def __len__(self) -> int:
        return self.size

    def __bool__(self) -> bool:
        return self.bits != 0

    def __contains__(self, index: int) -> bool:
        return 1 <= index <= self.d and bool(self.bits >> (index - 1) & 1)

    def issubset(self, other: "IndexSet") -> bool:
        return self.bits & ~other.bits == 0

    def require_nonempty(self) -> "IndexSet":
        if not self:
            raise StructuralError("Ensemble d'indices vide interdit ici", d=self.d)
        return self

    def subsets(self, include_empty: bool = False) -> list["IndexSet"]:
        """Sous-ensembles triés par cardinal puis par masque"""
        masks = []
        sub = self.bits
        while True:
            if sub or include_empty:
                masks.append(sub)
            if sub == 0:
                break
            sub = (sub - 1) & self.bits
        masks.sort(key=lambda m: (m.bit_count(), m))
        return [IndexSet(m, self.d) for m in masks]

    def position_in(self, other: "IndexSet") -> tuple[int, ...]:
        """Positions des axes de self parmi les axes de other"""
        if not self.issubset(other):
            raise StructuralError(f"{self} n'est pas inclus dans {other}")
        order = other.axes
        return tuple(order.index(a) for a in self.axes)

    def take(self, point: np.ndarray) -> np.ndarray:
        """Restreint un point (..., d) ou (..., |I|) aux coordonnées de I"""
        point = np.asarray(point, dtype=float)
        if point.shape[-1] == self.d:
            return point[..., list(self.axes)]
        if point.shape[-1] == self.size:
            return point
        raise StructuralError(
            f"Point de dimension {point.shape[-1]} incompatible avec {self}",
            d=self.d, size=self.size,
        )

    def embed(self, point: np.ndarray, fill: float | np.ndarray = 0.0) -> np.ndarray:
        """Complète un point (..., |I|) en (..., d), hors de I à la valeur fill"""
        point = self.take(point)
        full = np.empty(point.shape[:-1] + (self.d,), dtype=float)
        full[...] = fill
        full[..., list(self.axes)] = point
        return full

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.members) + "}"


def nonempty_subsets(d: int) -> list[IndexSet]:
    return IndexSet.full(d).subsets()


# ==================== GRILLES ====================

Domain = Literal["unit", "orthant"]


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Points d'évaluation par axe, domaine [0, 1-δ] ou [0, T]"""

    axes: tuple[np.ndarray, ...]
    domain: Domain = "orthant"
    delta: float = 1e-3

    def __post_init__(self):
        frozen = []
        for k, axis in enumerate(self.axes):
            axis = np.array(axis, dtype=float).ravel()
            if axis.size < 2:
                raise StructuralError("Au moins 2 points par axe", axis=k + 1)
            if not np.all(np.isfinite(axis)) or np.any(np.diff(axis) <= 0):
                raise StructuralError("Points non strictement croissants", axis=k + 1)
            if axis[0] < 0:
                raise DomainError("Point de grille négatif", axis=k + 1, value=axis[0])
            if self.domain == "unit" and axis[-1] > 1 - self.delta + 1e-12:
                raise DomainError(
                    f"Point de grille au-delà de 1-δ (δ={self.delta})",
                    axis=k + 1, value=axis[-1],
                )
            axis.setflags(write=False)
            frozen.append(axis)
        object.__setattr__(self, "axes", tuple(frozen))

    @classmethod
    def uniform(
        cls, d: int, n: int, upper: float, lower: float = 0.0,
        domain: Domain = "orthant", delta: float = 1e-3,
    ) -> "GridSpec":
        axis = np.linspace(lower, upper, n)
        return cls(tuple(axis for _ in range(d)), domain, delta)

    @classmethod
    def unit_cube(cls, d: int, n: int, delta: float = 1e-3) -> "GridSpec":
        return cls.uniform(d, n, 1 - delta, domain="unit", delta=delta)

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.axes)

    def restrict(self, index: IndexSet) -> "GridSpec":
        return GridSpec(tuple(self.axes[a] for a in index.axes), self.domain, self.delta)

    def points(self) -> np.ndarray:
        """Points de la grille en ordre ligne (row-major), forme (n, d)"""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)


# ==================== ORACLES DE SURVIE ====================

@dataclass(frozen=True, eq=False)
class SurvivalOracle:
    """
    Fonction de survie d-dimensionnelle x -> S(x)

    Les évaluateurs sont vectorisés : (n, d) -> (n,). Le marginaliseur
    par défaut fixe les coordonnées hors de J à la borne inférieure.
    """

    d: int
    evaluator: Evaluator
    log_evaluator: Optional[Evaluator] = None
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    marginalizer: Optional[Callable[[IndexSet], "SurvivalOracle"]] = None
    name: str = "survival"

    def __post_init__(self):
        lower = np.zeros(self.d) if self.lower is None else np.asarray(self.lower, float)
        upper = np.full(self.d, np.inf) if self.upper is None else np.asarray(self.upper, float)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    def _batch(self, fn: Evaluator, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise StructuralError(
                f"Point de dimension {x.shape[-1]} pour un oracle de dimension {self.d}"
            )
        flat = x.reshape(-1, self.d)
        out = np.asarray(fn(flat), dtype=float).reshape(x.shape[:-1])
        return out

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self._batch(self.evaluator, x)

    def log(self, x: np.ndarray) -> np.ndarray:
        """log S(x), avec l'évaluateur logarithmique s'il existe"""
        if self.log_evaluator is not None:
            return self._batch(self.log_evaluator, x)
        values = self(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(values > 0, np.log(np.where(values > 0, values, 1.0)), -np.inf)

    def marginal(self, index: IndexSet) -> "SurvivalOracle":
        """Oracle de S^J sur les axes de J"""
        if index.d != self.d:
            raise StructuralError(f"{index} n'est pas un sous-ensemble de 1..{self.d}")
        index.require_nonempty()
        if index.size == self.d:
            return self
        if self.marginalizer is not None:
            return self.marginalizer(index)

        base = self.lower

        def embed(x: np.ndarray) -> np.ndarray:
            return index.embed(x, base)

        log_eval = None
        if self.log_evaluator is not None:
            log_eval = lambda x: self.log_evaluator(embed(x))  # noqa: E731
        return SurvivalOracle(
            d=index.size,
            evaluator=lambda x: self.evaluator(embed(x)),
            log_evaluator=log_eval,
            lower=self.lower[list(index.axes)],
            upper=self.upper[list(index.axes)],
            name=f"{self.name}^{index}",
        )


# ==================== TABLES DE PARTS ====================

PartKind = Literal["part", "exponent"]


@dataclass(frozen=True, eq=False)
class PartTable:
    """
    Valeurs S_I (stockées en logarithme) ou Λ_I sur la grille restreinte à I

    Immuable après construction.
    """

    grid: GridSpec
    J: IndexSet
    kind: PartKind
    entries: Mapping[IndexSet, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        frozen = {}
        for index, values in self.entries.items():
            values = np.array(values, dtype=float)
            expected = self.grid.restrict(index).shape
            if values.shape != expected:
                raise StructuralError(
                    f"Forme {values.shape} pour {index}, attendu {expected}"
                )
            if not np.all(np.isfinite(values)):
                raise DomainError(f"Valeurs non finies pour {index}", subset=str(index))
            values.setflags(write=False)
            frozen[index] = values
        object.__setattr__(self, "entries", MappingProxyType(frozen))

    @classmethod
    def from_part_values(
        cls, grid: GridSpec, J: IndexSet, parts: Mapping[IndexSet, np.ndarray]
    ) -> "PartTable":
        logs = {}
        for index, values in parts.items():
            values = np.asarray(values, dtype=float)
            if np.any(~(values > 0)):
                raise DomainError(f"Part S_{index} non strictement positive", subset=str(index))
            logs[index] = np.log(values)
        return cls(grid, J, "part", logs)

    def __iter__(self) -> Iterator[IndexSet]:
        return iter(self.entries)

    def __contains__(self, index: IndexSet) -> bool:
        return index in self.entries

    def log_part(self, index: IndexSet) -> np.ndarray:
        values = self._get(index)
        if self.kind == "part":
            return values
        return (-1) ** index.size * values

    def part(self, index: IndexSet) -> np.ndarray:
        return np.exp(self.log_part(index))

    def exponent(self, index: IndexSet) -> np.ndarray:
        values = self._get(index)
        if self.kind == "exponent":
            return values
        return (-1) ** index.size * values

    def _get(self, index: IndexSet) -> np.ndarray:
        try:
            return self.entries[index]
        except KeyError:
            raise StructuralError(f"Sous-ensemble {index} absent de la table", subset=str(index))
