"""
Tests unitaires des entrées/sorties, de la configuration et des logs
"""

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from loguru import logger

from src.frames.catalog import tetrahedron_frame
from src.frames.numerics import Tolerances
from src.utils.config import THREADS_ENV, RunConfig, load_config, worker_count
from src.utils.errors import FrameParseError
from src.utils.io import (
    read_bias,
    read_frame_csv,
    read_json,
    read_points_csv,
    to_jsonable,
    write_bias_csv,
    write_frame_csv,
    write_json,
    write_table_csv,
)
from src.utils.logger import setup_logging

REPOSITORY_CONFIG = Path(__file__).resolve().parents[2] / "config" / "config.yaml"


class TestFrameCsv:
    """Tests de lecture des frames"""

    def test_write_read(self, tmp_path):
        """Test de l'écriture puis relecture exacte"""
        frame = tetrahedron_frame()
        restored = read_frame_csv(write_frame_csv(frame, tmp_path / "frame.csv"))
        assert np.array_equal(restored.vectors, frame.vectors)

    def test_comments_and_blank_lines(self, tmp_path):
        """Test des commentaires et lignes vides ignorés"""
        path = tmp_path / "frame.csv"
        path.write_text("# triangle\n0,1\n\n-0.8660254037844386,-0.5\n0.8660254037844386,-0.5\n")
        assert read_frame_csv(path).m == 3

    def test_ragged_row(self, tmp_path):
        """Test d'une ligne de mauvaise largeur, avec son numéro"""
        path = tmp_path / "frame.csv"
        path.write_text("1,0\n0,1\n1,1,1\n")
        with pytest.raises(FrameParseError) as excinfo:
            read_frame_csv(path)
        assert excinfo.value.line == 3

    def test_non_numeric(self, tmp_path):
        """Test d'une valeur non numérique"""
        path = tmp_path / "frame.csv"
        path.write_text("1,0\n# commentaire\nabc,1\n")
        with pytest.raises(FrameParseError) as excinfo:
            read_frame_csv(path)
        assert excinfo.value.line == 3
        assert ":3" in str(excinfo.value)

    def test_non_finite(self, tmp_path):
        """Test du refus des infinis dans une frame"""
        path = tmp_path / "frame.csv"
        path.write_text("1,0\ninf,1\n")
        with pytest.raises(FrameParseError):
            read_frame_csv(path)

    def test_empty(self, tmp_path):
        """Test d'un fichier de frame vide"""
        path = tmp_path / "frame.csv"
        path.write_text("# rien\n")
        with pytest.raises(FrameParseError):
            read_frame_csv(path)

    def test_missing(self, tmp_path):
        """Test d'un fichier absent"""
        with pytest.raises(FileNotFoundError):
            read_frame_csv(tmp_path / "absent.csv")


class TestBiasAndPoints:
    """Tests de lecture des biais et des points"""

    def test_bias_csv_infinity(self, tmp_path):
        """Test des infinis écrits "inf" dans le CSV"""
        path = write_bias_csv([-0.5, np.inf, 0.25], tmp_path / "bias.csv")
        assert "inf" in path.read_text()
        values = read_bias(path)
        assert values[0] == -0.5 and np.isinf(values[1]) and values[2] == 0.25

    def test_bias_json(self, tmp_path):
        """Test du biais JSON, tableau ou objet avec "values" """
        (tmp_path / "list.json").write_text('[-0.5, "inf", 0]')
        (tmp_path / "object.json").write_text('{"values": [1, 2]}')
        assert np.isinf(read_bias(tmp_path / "list.json")[1])
        assert read_bias(tmp_path / "object.json").tolist() == [1.0, 2.0]

    def test_bias_json_invalid(self, tmp_path):
        """Test d'un biais JSON qui n'est pas un tableau"""
        (tmp_path / "bias.json").write_text('{"alpha": 1}')
        with pytest.raises(FrameParseError):
            read_bias(tmp_path / "bias.json")

    def test_bias_two_columns(self, tmp_path):
        """Test du refus d'un biais CSV à deux colonnes"""
        (tmp_path / "bias.csv").write_text("1,2\n3,4\n")
        with pytest.raises(FrameParseError):
            read_bias(tmp_path / "bias.csv")

    def test_empty_points(self, tmp_path):
        """Test d'un fichier de points vide"""
        (tmp_path / "points.csv").write_text("")
        assert read_points_csv(tmp_path / "points.csv", 3).shape == (0, 3)

    def test_points_width(self, tmp_path):
        """Test du contrôle du nombre de colonnes"""
        (tmp_path / "points.csv").write_text("1,2\n")
        with pytest.raises(FrameParseError):
            read_points_csv(tmp_path / "points.csv", 3)


class TestJson:
    """Tests de la conversion JSON"""

    def test_to_jsonable(self):
        """Test de numpy, infinis et tuples"""
        data = to_jsonable({"a": np.array([1.0, np.inf]), "b": (np.int64(2), np.bool_(True))})
        assert data == {"a": [1.0, "inf"], "b": [2, True]}

    def test_write_read(self, tmp_path):
        """Test de l'écriture d'un JSON valide"""
        path = write_json({"x": np.array([-np.inf])}, tmp_path / "out" / "data.json")
        assert json.loads(path.read_text()) == {"x": ["-inf"]}
        assert read_json(path) == {"x": ["-inf"]}

    def test_table_csv(self, tmp_path):
        """Test de l'écriture d'une table avec en-tête"""
        path = write_table_csv(pd.DataFrame({"n": [3], "q": [2.0]}), tmp_path / "table.csv")
        assert path.read_text().splitlines()[0] == "n,q"


class TestConfig:
    """Tests du chargement de configuration"""

    def test_defaults(self, tmp_path, monkeypatch):
        """Test des valeurs par défaut sans fichier"""
        monkeypatch.chdir(tmp_path)
        config = load_config(None)
        assert config == RunConfig()
        assert config.sampling.n_samples == 100_000
        assert config.tolerances == Tolerances()
        assert config.enumeration_cap == 1_000_000

    def test_default_path(self, tmp_path, monkeypatch):
        """Test du chargement de config/config.yaml sans chemin explicite"""
        (tmp_path / "config").mkdir()
        (tmp_path / "config" / "config.yaml").write_text("sampling:\n  n_samples: 500\n")
        monkeypatch.chdir(tmp_path)
        config = load_config(None)
        assert config.sampling.n_samples == 500
        assert config.sampling.seed == 0

    def test_repository_defaults_match(self):
        """Test de l'accord entre le fichier du dépôt et les valeurs par défaut"""
        config = load_config(str(REPOSITORY_CONFIG))
        assert config.sampling == RunConfig().sampling
        assert config.tolerances == Tolerances()

    def test_load_yaml(self, tmp_path):
        """Test d'un fichier partiel"""
        path = tmp_path / "config.yaml"
        path.write_text(
            "sampling:\n  seed: 7\n  n_samples: 500\n"
            "tolerances:\n  rank: 1.0e-8\n"
            "experiments:\n  evolution:\n    trials: 2\n"
            "output:\n  dir: out\n"
        )
        config = load_config(str(path))
        assert config.sampling.seed == 7
        assert config.sampling.radial is True
        assert config.tolerances.rank == 1e-8
        assert config.experiments.evolution.trials == 2
        assert config.output_dir == "out"

    def test_repository_config(self):
        """Test du fichier de configuration du dépôt"""
        config = load_config(str(REPOSITORY_CONFIG))
        assert config.experiments.maxbias.frame == "tetrahedron"

    def test_missing_file(self, tmp_path):
        """Test d'un fichier absent"""
        with pytest.raises(FileNotFoundError):
            load_config(str(tmp_path / "absent.yaml"))

    def test_unknown_key(self):
        """Test du refus d'une clé inconnue"""
        with pytest.raises(ValueError):
            RunConfig.from_dict({"sampling": {"samples": 10}})

    def test_invalid_tolerance(self):
        """Test du refus d'une tolérance nulle"""
        with pytest.raises(ValueError):
            RunConfig.from_dict({"tolerances": {"tie": 0.0}})

    def test_empty_grid(self):
        """Test du refus d'une grille vide"""
        with pytest.raises(ValueError):
            RunConfig.from_dict({"experiments": {"transition": {"n_values": []}}})

    def test_overrides(self):
        """Test des options de la ligne de commande"""
        config = RunConfig().with_overrides(seed=3, n_samples=None, tol_rank=1e-6, output_dir="x", threads=2)
        assert config.sampling.seed == 3
        assert config.sampling.n_samples == 100_000
        assert config.tolerances.rank == 1e-6
        assert config.output_dir == "x"
        assert config.threads == 2

    def test_full_scale(self):
        """Test des grilles de l'étude complète"""
        grids = RunConfig().experiments.full_scale()
        assert grids.evolution.n_values == [3, 30]
        assert grids.transition.n_samples == 500_000


class TestWorkerCount:
    """Tests du nombre de threads"""

    def test_environment_cap(self, monkeypatch):
        """Test du plafond par la variable d'environnement"""
        monkeypatch.setenv(THREADS_ENV, "2")
        assert worker_count(8) == 2
        assert worker_count(None) == 2

    def test_invalid_environment(self, monkeypatch):
        """Test d'une valeur non entière ignorée"""
        monkeypatch.setenv(THREADS_ENV, "beaucoup")
        assert worker_count(3) == 3

    def test_configured(self, monkeypatch):
        """Test de la valeur configurée sans variable d'environnement"""
        monkeypatch.delenv(THREADS_ENV, raising=False)
        assert worker_count(5) == 5


class TestLogging:
    """Tests de la configuration des logs"""

    def test_log_file(self, tmp_path):
        """Test de la création du fichier de log"""
        log_file = tmp_path / "logs" / "run.log"
        setup_logging("DEBUG", str(log_file))
        logger.info("message de test")
        logger.remove()
        assert "message de test" in log_file.read_text()
