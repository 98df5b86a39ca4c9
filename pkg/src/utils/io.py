"""
Lecture et écriture des frames, biais, points et résultats (CSV et JSON).

Format CSV : une ligne par vecteur, séparateur ',', point décimal, pas
d'en-tête, lignes commençant par '#' ignorées. Les infinis sont écrits
"inf" / "-inf", y compris dans le JSON.
"""

import json
from dataclasses import asdict, is_dataclass
from enum import Enum
from io import StringIO
from pathlib import Path
from typing import Any, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

from ..frames.frame import Frame
from .errors import DimensionError, FrameParseError

PathLike = Union[str, Path]


# --------------------------------------------------------------------------
# Conversion JSON
# --------------------------------------------------------------------------

def encode_float(value: float) -> Union[float, str]:
    """Flottant JSON : les infinis et NaN deviennent des chaînes."""
    value = float(value)
    if np.isnan(value):
        return "nan"
    if np.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def decode_float(value: Any) -> float:
    """Inverse de encode_float."""
    return float(value)


def decode_vector(values) -> np.ndarray:
    return np.array([decode_float(v) for v in values], dtype=float)


def to_jsonable(obj: Any) -> Any:
    """Convertit récursivement numpy, Enum, Path et dataclasses en types JSON."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return encode_float(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Path):
        return str(obj)
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if is_dataclass(obj):
        return to_jsonable(asdict(obj))
    return obj


def write_json(data: Any, path: PathLike) -> Path:
    """Écrit un objet en JSON indenté (répertoires créés au besoin)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(data), f, indent=2, default=str)
    logger.debug(f"JSON écrit: {path}")
    return path


def read_json(path: PathLike) -> Any:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Fichier non trouvé: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise FrameParseError(f"JSON invalide ({e.msg})", path=str(path), line=e.lineno) from e


# --------------------------------------------------------------------------
# Tables numériques CSV
# --------------------------------------------------------------------------

def _read_numeric_table(path: PathLike) -> Tuple[np.ndarray, List[int]]:
    """
    Lit une table CSV numérique.

    Returns:
        (tableau (k, w), numéros de ligne 1-based de chaque rangée)

    Raises:
        FileNotFoundError: Si le fichier n'existe pas
        FrameParseError: Rangées de largeurs différentes ou valeur non numérique
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Fichier non trouvé: {path}")

    rows = [
        (number, line)
        for number, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1)
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not rows:
        return np.empty((0, 0)), []

    width = len(rows[0][1].split(","))
    for number, line in rows:
        if len(line.split(",")) != width:
            raise FrameParseError(
                f"{width} colonne(s) attendue(s), {len(line.split(','))} lue(s)", path=str(path), line=number
            )

    table = pd.read_csv(StringIO("\n".join(line for _, line in rows)), header=None, dtype=str)
    numeric = table.apply(lambda column: pd.to_numeric(column.str.strip(), errors="coerce"))
    bad_rows = np.flatnonzero(numeric.isna().any(axis=1).to_numpy())
    if bad_rows.size:
        row = int(bad_rows[0])
        raise FrameParseError(f"valeur non numérique: {rows[row][1].strip()!r}", path=str(path), line=rows[row][0])
    return numeric.to_numpy(dtype=float), [number for number, _ in rows]


def _write_numeric_table(values: np.ndarray, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(np.asarray(values, dtype=float))
    frame.to_csv(path, header=False, index=False, float_format="%.17g")
    return path


def read_frame_csv(path: PathLike) -> Frame:
    """
    Lit une frame : m lignes de n coefficients.

    Raises:
        FrameParseError: Fichier vide, ligne mal formée ou valeur non finie
    """
    vectors, lines = _read_numeric_table(path)
    if vectors.size == 0:
        raise FrameParseError("fichier de frame vide", path=str(path))
    non_finite = np.flatnonzero(~np.all(np.isfinite(vectors), axis=1))
    if non_finite.size:
        raise FrameParseError("valeur non finie", path=str(path), line=lines[int(non_finite[0])])
    try:
        frame = Frame(vectors)
    except DimensionError as e:
        raise FrameParseError(str(e), path=str(path)) from e
    logger.debug(f"Frame lue: {path} ({frame.m} x {frame.n})")
    return frame


def write_frame_csv(frame: Frame, path: PathLike) -> Path:
    return _write_numeric_table(frame.vectors, path)


def read_bias(path: PathLike) -> np.ndarray:
    """
    Lit un biais : colonne CSV unique ou tableau JSON ("inf" accepté).

    Raises:
        FrameParseError: Format invalide
    """
    path = Path(path)
    if path.suffix.lower() == ".json":
        data = read_json(path)
        if isinstance(data, dict) and "values" in data:
            data = data["values"]
        if not isinstance(data, list):
            raise FrameParseError("le biais JSON doit être un tableau", path=str(path))
        try:
            return decode_vector(data)
        except (TypeError, ValueError) as e:
            raise FrameParseError(f"valeur de biais invalide ({e})", path=str(path)) from e

    values, _ = _read_numeric_table(path)
    if values.size and values.shape[1] != 1:
        raise FrameParseError(f"le biais CSV doit avoir une seule colonne ({values.shape[1]} lues)", path=str(path))
    return values.reshape(-1)


def write_bias_csv(values, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for value in np.asarray(values, dtype=float).reshape(-1):
            f.write(f"{encode_float(value) if np.isinf(value) else format(value, '.17g')}\n")
    return path


def read_points_csv(path: PathLike, n: Optional[int] = None) -> np.ndarray:
    """
    Lit des points ou des sorties, un vecteur par ligne.

    Un fichier vide donne un tableau (0, n).
    """
    points, _ = _read_numeric_table(path)
    if points.size == 0:
        return np.empty((0, n or 0))
    if n is not None and points.shape[1] != n:
        raise FrameParseError(f"{n} colonne(s) attendue(s), {points.shape[1]} lue(s)", path=str(path))
    return points


def write_points_csv(points, path: PathLike) -> Path:
    return _write_numeric_table(np.atleast_2d(np.asarray(points, dtype=float)), path)


def write_table_csv(table: pd.DataFrame, path: PathLike) -> Path:
    """Écrit un tableau de résultats avec en-tête (sorties des expériences)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, float_format="%.10g")
    logger.info(f"Tableau CSV écrit: {path} ({len(table)} ligne(s))")
    return path
