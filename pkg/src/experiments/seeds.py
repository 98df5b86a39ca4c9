"""
Sous-graines des cellules d'expérience.

Chaque cellule dérive sa graine de (graine, expérience, coordonnées) : le
résultat ne dépend pas de l'ordre d'exécution des cellules.
"""

import zlib

import numpy as np


def _sequence(seed: int, experiment: str, *coords) -> np.random.SeedSequence:
    key = [zlib.crc32(experiment.encode("utf-8"))] + [int(round(float(c) * 1000)) for c in coords]
    return np.random.SeedSequence([seed] + key)


def cell_seed(seed: int, experiment: str, *coords) -> int:
    """Graine entière 63 bits de la cellule."""
    return int(_sequence(seed, experiment, *coords).generate_state(2, dtype=np.uint64)[0] >> np.uint64(1))


def cell_rng(seed: int, experiment: str, *coords) -> np.random.Generator:
    """Générateur Philox de la cellule."""
    return np.random.Generator(np.random.Philox(_sequence(seed, experiment, *coords)))
