"""
Transition de redondance des couches ReLU aléatoires.

Pour chaque (sigma^2, n, m) : frame gaussienne, échantillons gaussiens
de R^n, biais donné i.i.d. N(0, sigma^2), et proportion des coordonnées
du biais donné inférieures à alpha^(N) - rho*(n, N).
"""

from dataclasses import dataclass
from typing import List

import numpy as np
import pandas as pd

from ..domains.domain import DomainSpec
from ..estimation.sampling_bias import sampling_bias_estimate
from ..frames.catalog import gaussian_frame
from ..utils.config import TransitionGrid
from .seeds import cell_rng, cell_seed

COLUMNS = ["variance", "n", "m", "q", "pass_fraction", "injective_fraction", "trials", "N"]


@dataclass(frozen=True)
class TransitionCell:
    variance: float
    n: int
    m: int

    @property
    def q(self) -> float:
        return self.m / self.n


def transition_trial(cell: TransitionCell, trial: int, n_samples: int, seed: int) -> float:
    """Proportion des coordonnées du biais donné certifiées pour un essai."""
    rng = cell_rng(seed, "transition", cell.variance, cell.n, cell.m, trial)
    frame = gaussian_frame(cell.n, cell.m, rng)
    given = rng.normal(0.0, np.sqrt(cell.variance), size=cell.m) if cell.variance > 0 else np.zeros(cell.m)
    estimate = sampling_bias_estimate(
        frame,
        DomainSpec.full_space(cell.n),
        n_samples,
        seed=cell_seed(seed, "transition-samples", cell.variance, cell.n, cell.m, trial),
        init="inf",
        radial=False,
        gaussian=True,
        assume_full_spark=True,
        workers=1,
    )
    return float(np.mean(given <= estimate.corrected()))


def transition_cell(cell: TransitionCell, grid: TransitionGrid, seed: int) -> dict:
    passes = np.array([transition_trial(cell, t, grid.n_samples, seed) for t in range(grid.trials)])
    return {
        "variance": cell.variance,
        "n": cell.n,
        "m": cell.m,
        "q": cell.q,
        "pass_fraction": float(passes.mean()),
        "injective_fraction": float(np.mean(passes >= 1.0)),
        "trials": grid.trials,
        "N": grid.n_samples,
    }


def transition_cells(grid: TransitionGrid) -> List[TransitionCell]:
    """Cellules dans l'ordre (variance, n, m), m de n à max_redundancy * n."""
    cells = []
    for variance in grid.variances:
        for n in grid.n_values:
            for m in range(n, int(grid.max_redundancy * n) + 1, grid.m_step):
                cells.append(TransitionCell(variance, n, m))
    return cells


def transition_table(rows: List[dict]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=COLUMNS)


def crossing_redundancy(table: pd.DataFrame, n: int, variance: float = 0.0, level: float = 0.5) -> float:
    """
    Première redondance q où la proportion certifiée atteint ``level``
    (interpolation linéaire entre cellules voisines), NaN si jamais atteinte.
    """
    rows = table[(table["n"] == n) & (table["variance"] == variance)].sort_values("q")
    q, p = rows["q"].to_numpy(), rows["pass_fraction"].to_numpy()
    above = np.flatnonzero(p >= level)
    if above.size == 0:
        return float("nan")
    k = above[0]
    if k == 0 or p[k] == p[k - 1]:
        return float(q[k])
    return float(q[k - 1] + (level - p[k - 1]) * (q[k] - q[k - 1]) / (p[k] - p[k - 1]))
