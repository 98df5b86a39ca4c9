"""
Distance de l'estimation par échantillonnage au biais maximal sur la sphère.

La référence est l'estimation polytopale de la frame (exacte pour les
frames régulières simpliciales comme le tétraèdre).
"""

from typing import List

import numpy as np
import pandas as pd

from ..domains.domain import DomainSpec
from ..estimation.polytope_bias import pbe_sphere
from ..estimation.sampling_bias import bias_trajectory
from ..frames.catalog import builtin_frame
from ..utils.config import MaxBiasGrid
from .evolution import checkpoints
from .seeds import cell_seed

COLUMNS = ["trial", "k", "distance"]


def maxbias_trial(grid: MaxBiasGrid, trial: int, seed: int, oracle: np.ndarray) -> pd.DataFrame:
    """Série (k, ||alpha^(k) - alpha_oracle||) d'un essai ; +inf tant qu'une coordonnée n'est pas mise à jour."""
    frame = builtin_frame(grid.frame)
    trajectory = bias_trajectory(
        frame,
        DomainSpec.sphere(frame.n),
        checkpoints(grid.iterations, grid.checkpoints)[1:],
        seed=cell_seed(seed, "maxbias", trial),
        init="inf",
    )
    return pd.DataFrame(
        [(trial, k, float(np.linalg.norm(alpha - oracle))) for k, alpha in trajectory],
        columns=COLUMNS,
    )


def maxbias_oracle(grid: MaxBiasGrid) -> np.ndarray:
    return pbe_sphere(builtin_frame(grid.frame)).values


def maxbias_table(frames: List[pd.DataFrame]) -> pd.DataFrame:
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame(columns=COLUMNS)
