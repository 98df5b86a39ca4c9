"""
Hiérarchie d'exceptions de relu-certify.

Chaque exception hérite aussi d'une exception standard (ValueError ou
RuntimeError) afin que le code appelant puisse continuer à intercepter
les familles habituelles.
"""

from typing import Optional


class ReluCertifyError(Exception):
    """Racine commune de toutes les erreurs du projet."""


class DimensionError(ReluCertifyError, ValueError):
    """Dimensions incompatibles (vecteur, biais ou matrice)."""


class NotAFrameError(ReluCertifyError, ValueError):
    """La collection de vecteurs n'engendre pas R^n (rang numérique < n)."""


class InvalidDomainError(ReluCertifyError, ValueError):
    """Domaine mal formé ou opération non supportée pour ce domaine."""


class FrameParseError(ReluCertifyError, ValueError):
    """Erreur de lecture d'un fichier de frame, de biais ou de points."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")


class EnumerationCapError(ReluCertifyError, RuntimeError):
    """Le nombre de sous-ensembles C(m, n) dépasse le plafond d'énumération."""

    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(
            f"Indécidé : C(m, n) = {count} sous-ensembles dépasse le plafond {cap}"
        )


class DegenerateHullError(ReluCertifyError, ValueError):
    """Tous les vecteurs de la frame sont sur un même hyperplan."""


class MethodInfeasibleError(ReluCertifyError, RuntimeError):
    """La méthode demandée ne s'applique pas à cette frame."""

    def __init__(self, message: str, hint: Optional[str] = None):
        self.hint = hint
        super().__init__(message if hint is None else f"{message} (piste : {hint})")


class NotInvertibleError(ReluCertifyError, ValueError):
    """La sortie ne permet pas de reconstruire l'entrée."""


class NumericalError(ReluCertifyError, RuntimeError):
    """Échec numérique interne (divergence, solveur)."""
