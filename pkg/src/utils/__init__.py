"""
Module d'utilitaires : logs, configuration, erreurs
"""

from .logger import setup_logging, setup_logging_from_config
from .errors import ReluCertifyError

__all__ = ["setup_logging", "setup_logging_from_config", "ReluCertifyError"]
