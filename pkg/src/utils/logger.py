"""
Configuration centralisée des logs.
"""

import sys
from pathlib import Path
from typing import Optional

from loguru import logger

CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan> - <level>{message}</level>"
)
FILE_FORMAT = "{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function} - {message}"


def setup_logging(level: str = "INFO", log_file: Optional[str] = None, serialize: bool = False) -> None:
    """
    Configure le système de logging.

    Args:
        level: Niveau de log ("DEBUG", "INFO", "WARNING", "ERROR")
        log_file: Chemin vers le fichier de log (None pour stderr uniquement)
        serialize: Émet des enregistrements JSON au lieu du texte formaté
    """
    logger.remove()

    logger.add(
        sys.stderr,
        format=CONSOLE_FORMAT,
        level=level.upper(),
        colorize=not serialize,
        serialize=serialize,
    )

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)

        logger.add(
            str(log_path),
            format=FILE_FORMAT,
            level=level.upper(),
            rotation="10 MB",
            retention="7 days",
            compression="zip",
            serialize=serialize,
        )

    logger.debug(f"Logging configuré (niveau={level}, fichier={log_file}, json={serialize})")


def setup_logging_from_config(logging_config: dict) -> None:
    """Applique la section ``logging`` du fichier YAML."""
    setup_logging(
        level=logging_config.get("level", "INFO"),
        log_file=logging_config.get("file"),
        serialize=logging_config.get("format", "text") == "json",
    )
