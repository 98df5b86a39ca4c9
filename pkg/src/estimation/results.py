"""
Résultats de l'estimation du biais et certificats d'injectivité.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..utils.io import decode_vector, to_jsonable

CERTIFICATE_SCHEMA = "relu-certify/1"


class EstimationMethod(str, Enum):
    """Méthode ayant produit une estimation du biais maximal."""
    SAMPLING = "sampling"
    PBE_BOUNDARY = "pbe_boundary"
    PBE_SPHERE = "pbe_sphere"
    PBE_DONUT = "pbe_donut"
    PBE_NONNEG = "pbe_nonneg"
    PBE_COMPLEMENT = "pbe_complement"
    CONSTANT = "constant"


class Verdict(str, Enum):
    INJECTIVE = "injective"
    NOT_INJECTIVE = "not_injective"
    UNKNOWN = "unknown"


@dataclass
class BiasEstimate:
    """
    Estimation d'un biais maximal.

    ``values`` peut contenir +inf pour les coordonnées jamais mises à jour
    ou libres. ``correction`` est le rayon de recouvrement soustrait, mis à
    l'échelle par ``weights`` (normes de la frame) s'il est renseigné.
    """
    values: np.ndarray
    method: EstimationMethod
    correction: float = 0.0
    weights: Optional[np.ndarray] = None
    free_indices: Tuple[int, ...] = ()
    flagged_indices: Tuple[int, ...] = ()
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float).reshape(-1)
        self.method = EstimationMethod(self.method)
        if self.correction < 0:
            raise ValueError(f"La correction doit être positive (reçu {self.correction})")
        if self.weights is not None:
            self.weights = np.asarray(self.weights, dtype=float).reshape(-1)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def correction_vector(self) -> np.ndarray:
        """Terme correctif par coordonnée."""
        weights = self.weights if self.weights is not None else np.ones(self.m)
        return self.correction * weights

    def corrected(self) -> np.ndarray:
        """Biais certifiable : values - correction (les infinis restent infinis)."""
        return self.values - self.correction_vector

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({
            "method": self.method.value,
            "values": self.values,
            "correction": self.correction,
            "weights": self.weights,
            "free_indices": list(self.free_indices),
            "flagged_indices": list(self.flagged_indices),
            "metadata": self.metadata,
        })

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BiasEstimate":
        weights = data.get("weights")
        return cls(
            values=decode_vector(data["values"]),
            method=EstimationMethod(data["method"]),
            correction=float(data.get("correction", 0.0)),
            weights=decode_vector(weights) if weights is not None else None,
            free_indices=tuple(data.get("free_indices", ())),
            flagged_indices=tuple(data.get("flagged_indices", ())),
            metadata=dict(data.get("metadata", {})),
        )


@dataclass
class Witness:
    """Deux entrées distinctes de même sortie ReLU."""
    first: np.ndarray
    second: np.ndarray
    output: np.ndarray

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({"first": self.first, "second": self.second, "output": self.output})


@dataclass
class Certificate:
    """Verdict d'injectivité d'une couche ReLU sur un domaine."""
    verdict: Verdict
    margin: np.ndarray
    method: EstimationMethod
    failing_indices: Tuple[int, ...] = ()
    witness: Optional[Witness] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def injective(self) -> bool:
        return self.verdict == Verdict.INJECTIVE

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable({
            "schema": CERTIFICATE_SCHEMA,
            "verdict": self.verdict.value,
            "method": self.method.value,
            "margin": self.margin,
            "min_margin": float(np.min(self.margin)) if self.margin.size else float("inf"),
            "failing_indices": list(self.failing_indices),
            "witness": self.witness.to_dict() if self.witness is not None else None,
            "metadata": self.metadata,
        })
