"""
Chargement de la configuration YAML et paramètres d'exécution.
"""

import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from dotenv import load_dotenv
from loguru import logger

from ..frames.numerics import DEFAULT_ENUMERATION_CAP, Tolerances

THREADS_ENV = "RELU_CERTIFY_THREADS"
DEFAULT_CONFIG_PATH = "config/config.yaml"


@dataclass(frozen=True)
class SamplingSettings:
    n_samples: int = 100_000
    seed: int = 0
    correction_factor: float = 0.05
    radial: bool = True
    init: str = "auto"


@dataclass(frozen=True)
class PbeSettings:
    max_iter: int = 10_000
    dense_samples: int = 100_000


@dataclass(frozen=True)
class ReconstructionSettings:
    max_iter: int = 1_000
    tol: float = 1e-12
    divergence_window: int = 20


@dataclass(frozen=True)
class CertificateSettings:
    witness_samples: int = 20_000


@dataclass(frozen=True)
class EvolutionGrid:
    """Évolution vers l'injectivité : proportion injective par itération."""
    n_values: List[int] = field(default_factory=lambda: [3])
    redundancies: List[float] = field(default_factory=lambda: [2.0, 3.3])
    trials: int = 20
    iterations: int = 10_000
    checkpoints: int = 25
    test_points: int = 2_000


@dataclass(frozen=True)
class TransitionGrid:
    """Transition de redondance : proportion de coordonnées certifiées."""
    n_values: List[int] = field(default_factory=lambda: [6, 8, 10])
    max_redundancy: float = 12.0
    m_step: int = 2
    variances: List[float] = field(default_factory=lambda: [0.0, 0.1, 1.0])
    trials: int = 5
    n_samples: int = 100_000


@dataclass(frozen=True)
class MaxBiasGrid:
    """Distance au biais maximal du tétraèdre au fil des itérations."""
    frame: str = "tetrahedron"
    iterations: int = 100_000
    checkpoints: int = 50
    trials: int = 1


# Grilles de l'étude complète (opt-in : plusieurs heures de calcul)
FULL_SCALE = {
    "evolution": {"n_values": [3, 30], "redundancies": [2.0, 3.3, 9.0], "trials": 1000, "iterations": 10_000},
    "transition": {"n_values": list(range(2, 31)), "max_redundancy": 75.0, "m_step": 1, "trials": 1, "n_samples": 500_000},
    "maxbias": {"iterations": 100_000},
}


@dataclass(frozen=True)
class ExperimentSettings:
    evolution: EvolutionGrid = field(default_factory=EvolutionGrid)
    transition: TransitionGrid = field(default_factory=TransitionGrid)
    maxbias: MaxBiasGrid = field(default_factory=MaxBiasGrid)

    def validate(self) -> None:
        for name in ("evolution", "transition"):
            grid = getattr(self, name)
            if not grid.n_values:
                raise ValueError(f"La grille '{name}' ne contient aucune dimension")
            if grid.trials < 1:
                raise ValueError(f"La grille '{name}' exige au moins un essai")
        if not self.evolution.redundancies or not self.transition.variances:
            raise ValueError("Les grilles d'expériences ne peuvent pas être vides")

    def full_scale(self) -> "ExperimentSettings":
        """Grilles à l'échelle de l'étude complète."""
        return ExperimentSettings(
            evolution=replace(self.evolution, **FULL_SCALE["evolution"]),
            transition=replace(self.transition, **FULL_SCALE["transition"]),
            maxbias=replace(self.maxbias, **FULL_SCALE["maxbias"]),
        )


@dataclass(frozen=True)
class RunConfig:
    """Configuration complète d'une exécution."""
    tolerances: Tolerances = field(default_factory=Tolerances)
    enumeration_cap: int = DEFAULT_ENUMERATION_CAP
    sampling: SamplingSettings = field(default_factory=SamplingSettings)
    pbe: PbeSettings = field(default_factory=PbeSettings)
    reconstruction: ReconstructionSettings = field(default_factory=ReconstructionSettings)
    certificate: CertificateSettings = field(default_factory=CertificateSettings)
    experiments: ExperimentSettings = field(default_factory=ExperimentSettings)
    output_dir: str = "results"
    threads: Optional[int] = None
    logging: Dict[str, Any] = field(default_factory=lambda: {"level": "INFO", "file": None, "format": "text"})

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "RunConfig":
        """
        Construit la configuration ; les clés absentes gardent leur valeur par défaut.

        Raises:
            ValueError: Tolérance non positive, grille vide ou clé inconnue
        """
        data = data or {}
        experiments = data.get("experiments", {}) or {}
        config = cls(
            tolerances=Tolerances(**(data.get("tolerances") or {})),
            enumeration_cap=int((data.get("enumeration") or {}).get("cap", DEFAULT_ENUMERATION_CAP)),
            sampling=_section(SamplingSettings, data.get("sampling")),
            pbe=_section(PbeSettings, data.get("pbe")),
            reconstruction=_section(ReconstructionSettings, data.get("reconstruction")),
            certificate=_section(CertificateSettings, data.get("certificate")),
            experiments=ExperimentSettings(
                evolution=_section(EvolutionGrid, experiments.get("evolution")),
                transition=_section(TransitionGrid, experiments.get("transition")),
                maxbias=_section(MaxBiasGrid, experiments.get("maxbias")),
            ),
            output_dir=str((data.get("output") or {}).get("dir", "results")),
            threads=(data.get("execution") or {}).get("threads"),
            logging={"level": "INFO", "file": None, "format": "text", **(data.get("logging") or {})},
        )
        config.experiments.validate()
        if config.enumeration_cap < 1:
            raise ValueError(f"Plafond d'énumération invalide: {config.enumeration_cap}")
        return config

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """
        Applique les options de la ligne de commande (valeurs None ignorées).

        Clés reconnues : seed, n_samples, correction_factor, radial, init,
        tol_rank, tol_tie, tol_face, tol_solver, output_dir, threads,
        enumeration_cap.
        """
        values = {k: v for k, v in overrides.items() if v is not None}
        sampling_keys = {f.name for f in fields(SamplingSettings)}
        sampling = {k: values.pop(k) for k in list(values) if k in sampling_keys}
        tolerances = {k[4:]: values.pop(k) for k in list(values) if k.startswith("tol_")}
        config = replace(
            self,
            sampling=replace(self.sampling, **sampling),
            tolerances=replace(self.tolerances, **tolerances),
        )
        return replace(config, **values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _section(kind, data: Optional[Dict[str, Any]]):
    data = data or {}
    known = {f.name for f in fields(kind)}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"Clé(s) inconnue(s) dans la section {kind.__name__}: {sorted(unknown)}")
    return kind(**data)


def load_config(config_path: Optional[str] = None) -> RunConfig:
    """
    Charge la configuration depuis un fichier YAML.

    Args:
        config_path: Chemin vers config.yaml (None : config/config.yaml s'il
            existe, sinon les valeurs par défaut)

    Returns:
        RunConfig

    Raises:
        FileNotFoundError: Si le fichier n'existe pas
    """
    if config_path is None:
        if not Path(DEFAULT_CONFIG_PATH).exists():
            logger.debug(f"{DEFAULT_CONFIG_PATH} absent, utilisation des valeurs par défaut")
            return RunConfig()
        config_path = DEFAULT_CONFIG_PATH

    config_file = Path(config_path)
    if not config_file.exists():
        raise FileNotFoundError(f"Fichier de configuration non trouvé: {config_path}")

    with open(config_file, "r", encoding="utf-8") as f:
        data = yaml.safe_load(f)

    logger.debug(f"Configuration chargée: {config_path}")
    return RunConfig.from_dict(data)


def worker_count(configured: Optional[int] = None) -> int:
    """
    Nombre de threads des passes parallèles.

    La variable d'environnement RELU_CERTIFY_THREADS (éventuellement dans
    un fichier .env) plafonne la valeur configurée.
    """
    load_dotenv()
    default = configured or min(4, os.cpu_count() or 1)
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return max(1, default)
    try:
        cap = int(raw)
    except ValueError:
        logger.warning(f"{THREADS_ENV}={raw!r} ignoré (entier attendu)")
        return max(1, default)
    return max(1, min(default, cap) if configured else cap)
