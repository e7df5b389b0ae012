"""
Flux aléatoires à compteur (Philox)

Chaque bloc de tirages possède son propre générateur, dérivé de
(graine, identifiant de flux, numéro de bloc). Les tirages sont donc
reproductibles et indépendants de l'ordre d'exécution des blocks.
"""

from typing import Callable

import numpy as np

from app.config.settings import settings
from app.utils.parallel import map_parallel

BlockSampler = Callable[[np.random.Generator, int], np.ndarray]


def block_generator(seed: int, stream: tuple[int, ...], block: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(seed, spawn_key=(*stream, block))
    return np.random.Generator(np.random.Philox(sequence))


def block_sizes(n: int, block_size: int | None = None) -> list[int]:
    size = block_size or settings.sample_block_size
    full, rest = divmod(n, size)
    return [size] * full + ([rest] if rest else [])


def draw_blocks(
    sampler: BlockSampler,
    n: int,
    seed: int,
    stream: tuple[int, ...] = (0,),
    block_size: int | None = None,
) -> np.ndarray:
    """
    Tire n lignes par blocs, chaque bloc avec son propre flux

    Args:
        sampler: fonction (générateur, taille) -> tableau (taille, ...)
        n: nombre total de tirages
        seed: graine racine
        stream: identifiant logique du flux
        block_size: taille des blocs (par défaut settings.sample_block_size)

    Returns:
        np.ndarray: les n tirages concaténés dans l'ordre des blocs
    """
    sizes = block_sizes(n, block_size)

    def run(job: tuple[int, int]) -> np.ndarray:
        block, size = job
        return sampler(block_generator(seed, stream, block), size)

    parts = map_parallel(run, list(enumerate(sizes)))
    if not parts:
        return sampler(block_generator(seed, stream, 0), 0)
    return np.concatenate(parts, axis=0)
