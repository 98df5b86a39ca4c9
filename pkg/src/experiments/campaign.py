"""
Orchestrateur des campagnes d'expériences.

Ce module exécute les trois expériences (évolution, transition, biais
maximal) sur leurs grilles, en parallèle sur les cellules, et écrit des
tables CSV prêtes à tracer ainsi qu'un résumé JSON.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import pandas as pd
from loguru import logger

from ..utils.config import RunConfig, load_config, worker_count
from ..utils.io import write_json, write_table_csv
from . import evolution, maxbias, transition

EXPERIMENTS = ("evolution", "transition", "maxbias")


@dataclass
class ExperimentResult:
    """Résultat d'une campagne d'expérience."""
    experiment: str
    campaign_id: str
    start_time: str
    end_time: str
    duration_seconds: float
    cells: int
    table_path: Optional[str]
    parameters: Dict[str, Any]
    seed: int
    errors: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.errors


class ExperimentCampaign:
    """
    Campagne d'expériences.

    Cette classe gère le cycle complet :
    - Chargement de la configuration (grilles réduites ou à l'échelle de l'étude)
    - Exécution parallèle des cellules, assemblées dans l'ordre de la grille
    - Écriture de la table CSV et du résumé JSON
    """

    def __init__(self, config: Optional[RunConfig] = None, config_path: Optional[str] = None, full_scale: bool = False):
        """
        Initialise une campagne.

        Args:
            config: Configuration déjà chargée (prioritaire)
            config_path: Chemin vers le fichier de configuration
            full_scale: Utilise les grilles de l'étude complète
        """
        self.config = config if config is not None else load_config(config_path)
        self.experiments = self.config.experiments.full_scale() if full_scale else self.config.experiments
        self.experiments.validate()
        self.full_scale = full_scale
        self.workers = worker_count(self.config.threads)

    @property
    def seed(self) -> int:
        return self.config.sampling.seed

    def _map(self, function: Callable, items: Sequence) -> List:
        """Applique ``function`` aux cellules en parallèle ; l'ordre du résultat est celui de ``items``."""
        if self.workers == 1 or len(items) <= 1:
            return [function(item) for item in items]
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            return list(executor.map(function, items))

    def run_evolution(self) -> pd.DataFrame:
        grid = self.experiments.evolution
        cells = evolution.evolution_cells(grid)
        logger.info(f"Expérience d'évolution : {len(cells)} cellule(s), {grid.trials} essai(s)")

        def one(cell):
            table = evolution.evolution_cell(cell, grid, self.seed)
            logger.info(f"Cellule terminée : n={cell.n}, q={cell.q}")
            return table

        return pd.concat(self._map(one, cells), ignore_index=True)

    def run_transition(self) -> pd.DataFrame:
        grid = self.experiments.transition
        cells = transition.transition_cells(grid)
        logger.info(f"Expérience de transition : {len(cells)} cellule(s), N={grid.n_samples}")

        def one(cell):
            row = transition.transition_cell(cell, grid, self.seed)
            logger.debug(f"Cellule terminée : sigma2={cell.variance}, n={cell.n}, m={cell.m}")
            return row

        return transition.transition_table(self._map(one, cells))

    def run_maxbias(self) -> pd.DataFrame:
        grid = self.experiments.maxbias
        oracle = maxbias.maxbias_oracle(grid)
        logger.info(f"Expérience du biais maximal : frame {grid.frame}, référence {oracle.tolist()}")
        return maxbias.maxbias_table(
            self._map(lambda t: maxbias.maxbias_trial(grid, t, self.seed, oracle), list(range(grid.trials)))
        )

    def run(self, experiment: str, output_dir: Optional[str] = None) -> ExperimentResult:
        """
        Exécute une expérience et écrit ses résultats.

        Args:
            experiment: "evolution", "transition" ou "maxbias"
            output_dir: Répertoire de sortie (celui de la configuration par défaut)

        Returns:
            Résultat de la campagne
        """
        if experiment not in EXPERIMENTS:
            raise ValueError(f"Expérience inconnue: {experiment} (attendu : {', '.join(EXPERIMENTS)})")
        campaign_id = datetime.now().strftime("%Y%m%d_%H%M%S")
        start_time = datetime.now().isoformat()
        logger.info(f"Démarrage de la campagne {experiment} {campaign_id}")

        errors: List[str] = []
        table: Optional[pd.DataFrame] = None
        failure: Optional[Exception] = None
        try:
            table = getattr(self, f"run_{experiment}")()
        except Exception as e:
            error_msg = f"Erreur lors de l'expérience {experiment}: {e}"
            logger.error(error_msg)
            errors.append(error_msg)
            failure = e

        end_time = datetime.now().isoformat()
        duration = (datetime.fromisoformat(end_time) - datetime.fromisoformat(start_time)).total_seconds()

        output = Path(output_dir or self.config.output_dir)
        table_path = None
        if table is not None:
            table_path = str(write_table_csv(table, output / f"{experiment}.csv"))

        result = ExperimentResult(
            experiment=experiment,
            campaign_id=campaign_id,
            start_time=start_time,
            end_time=end_time,
            duration_seconds=duration,
            cells=0 if table is None else len(table),
            table_path=table_path,
            parameters=getattr(self.experiments, experiment),
            seed=self.seed,
            errors=errors,
        )
        write_json(result, output / f"{experiment}_{campaign_id}.json")
        if failure is not None:
            raise failure
        return result
