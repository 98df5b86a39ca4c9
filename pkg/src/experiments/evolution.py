"""
Évolution vers l'injectivité au fil des itérations de l'estimation par échantillonnage.

Frame et échantillons sont uniformes dans la boule unité ; à chaque point
de contrôle k, on mesure la proportion d'un jeu de test indépendant qui
appartient au domaine maximal pour le biais alpha^(k).
"""

from dataclasses import dataclass
from typing import List

import numpy as np
import pandas as pd

from ..domains.domain import DomainSpec
from ..domains.sampling import sample
from ..estimation.sampling_bias import bias_trajectory
from ..frames.frame import Frame
from ..frames.operations import maximal_domain_mask
from ..utils.config import EvolutionGrid
from .seeds import cell_seed, cell_rng

COLUMNS = ["n", "m", "q", "iteration", "fraction_injective", "mean", "variance", "trials"]


@dataclass(frozen=True)
class EvolutionCell:
    n: int
    q: float

    @property
    def m(self) -> int:
        return max(self.n, int(round(self.q * self.n)))


def checkpoints(iterations: int, count: int) -> List[int]:
    """0 puis ``count`` points de contrôle géométriquement espacés jusqu'à ``iterations``."""
    spaced = np.geomspace(1, max(iterations, 1), num=max(count, 1))
    return [0] + sorted({int(round(k)) for k in spaced})


def evolution_trial(cell: EvolutionCell, trial: int, grid: EvolutionGrid, seed: int) -> np.ndarray:
    """Proportion du jeu de test dans le domaine maximal à chaque point de contrôle."""
    ball = DomainSpec.ball(cell.n)
    rng = cell_rng(seed, "evolution", cell.n, cell.m, trial)
    frame = Frame(sample(ball, cell.m, int(rng.integers(2**62))).points)
    test_points = sample(ball, grid.test_points, int(rng.integers(2**62))).points
    trajectory = bias_trajectory(
        frame,
        ball,
        checkpoints(grid.iterations, grid.checkpoints),
        seed=cell_seed(seed, "evolution-samples", cell.n, cell.m, trial),
        init="inf",
        radial=False,
        assume_full_spark=True,
    )
    return np.array([np.mean(maximal_domain_mask(frame, alpha, test_points)) for _, alpha in trajectory])


def evolution_cell(cell: EvolutionCell, grid: EvolutionGrid, seed: int) -> pd.DataFrame:
    """Moyenne et variance sur les essais, proportion d'essais entièrement injectifs."""
    ks = checkpoints(grid.iterations, grid.checkpoints)
    fractions = np.vstack([evolution_trial(cell, t, grid, seed) for t in range(grid.trials)])
    return pd.DataFrame({
        "n": cell.n,
        "m": cell.m,
        "q": cell.q,
        "iteration": ks,
        "fraction_injective": np.mean(fractions >= 1.0, axis=0),
        "mean": fractions.mean(axis=0),
        "variance": fractions.var(axis=0),
        "trials": grid.trials,
    }, columns=COLUMNS)


def evolution_cells(grid: EvolutionGrid) -> List[EvolutionCell]:
    return [EvolutionCell(n, q) for n in grid.n_values for q in grid.redundancies]
