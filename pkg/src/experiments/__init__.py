"""
Module des expériences : évolution, transition de redondance et biais maximal
"""

from .campaign import ExperimentCampaign, ExperimentResult, EXPERIMENTS
from .evolution import EvolutionCell, evolution_cell, evolution_cells, checkpoints
from .transition import TransitionCell, transition_cell, transition_cells, crossing_redundancy
from .maxbias import maxbias_trial, maxbias_oracle

__all__ = [
    "ExperimentCampaign",
    "ExperimentResult",
    "EXPERIMENTS",
    "EvolutionCell",
    "evolution_cell",
    "evolution_cells",
    "checkpoints",
    "TransitionCell",
    "transition_cell",
    "transition_cells",
    "crossing_redundancy",
    "maxbias_trial",
    "maxbias_oracle",
]
