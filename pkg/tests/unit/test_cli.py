"""
Tests unitaires de l'interface en ligne de commande
"""

import json

import numpy as np
import pandas as pd
import pytest
from click.testing import CliRunner

from src.cli import load_bias, load_frame, main
from src.frames.catalog import triangle_frame
from src.frames.operations import relu_layer
from src.utils.io import read_bias, write_frame_csv, write_points_csv


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def fast_config(tmp_path):
    """Configuration réduite pour des commandes rapides."""
    path = tmp_path / "config.yaml"
    path.write_text(
        "sampling:\n  n_samples: 5000\n"
        "pbe:\n  dense_samples: 2000\n"
        "certificate:\n  witness_samples: 2000\n"
        "logging:\n  level: WARNING\n  file: null\n"
    )
    return str(path)


class TestInputs:
    """Tests du chargement des entrées"""

    def test_builtin_frame(self):
        """Test des frames intégrées"""
        assert load_frame("tetrahedron").m == 4
        assert load_frame("basis:3").n == 3

    def test_csv_frame(self, tmp_path):
        """Test d'une frame lue depuis un fichier"""
        path = write_frame_csv(triangle_frame(), tmp_path / "triangle.csv")
        assert load_frame(str(path)).m == 3

    def test_missing_frame(self):
        """Test d'un nom ni fichier ni frame intégrée"""
        with pytest.raises(FileNotFoundError):
            load_frame("absent.csv")

    def test_constant_bias(self):
        """Test d'un biais constant"""
        assert load_bias("-0.6", triangle_frame()).tolist() == [-0.6] * 3


class TestCertifyCommand:
    """Tests de la commande certify"""

    def test_injective(self, runner, fast_config, tmp_path):
        """Test du triangle à biais -0.6 sur la boule unité"""
        out = tmp_path / "certificate.json"
        result = runner.invoke(main, [
            "--config", fast_config, "certify", "--frame", "triangle", "--bias", "-0.6", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["schema"] == "relu-certify/1"
        assert data["verdict"] == "injective"
        assert data["metadata"]["requested_method"] == "pbe"

    def test_not_injective_sampling(self, runner, fast_config, tmp_path):
        """Test du biais nul avec l'estimation par échantillonnage"""
        out = tmp_path / "certificate.json"
        result = runner.invoke(main, [
            "--config", fast_config, "certify", "--frame", "triangle", "--bias", "0",
            "--method", "sample", "--seed", "3", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["verdict"] == "not_injective"
        assert data["metadata"]["seed"] == 3

    def test_method_infeasible(self, runner, fast_config):
        """Test de l'estimation polytopale refusée pour la base canonique"""
        result = runner.invoke(main, ["--config", fast_config, "certify", "--frame", "basis:2", "--bias", "-1"])
        assert result.exit_code == 3

    def test_missing_frame(self, runner, fast_config):
        """Test d'une frame introuvable"""
        result = runner.invoke(main, ["--config", fast_config, "certify", "--frame", "absent.csv", "--bias", "0"])
        assert result.exit_code == 2

    def test_bad_domain(self, runner, fast_config):
        """Test d'un domaine mal formé"""
        result = runner.invoke(main, [
            "--config", fast_config, "certify", "--frame", "triangle", "--bias", "0", "--domain", "cube:1",
        ])
        assert result.exit_code == 2

    def test_bias_length(self, runner, fast_config, tmp_path):
        """Test d'un fichier de biais de mauvaise longueur"""
        bias = tmp_path / "bias.csv"
        bias.write_text("0\n0\n")
        result = runner.invoke(main, ["--config", fast_config, "certify", "--frame", "triangle", "--bias", str(bias)])
        assert result.exit_code == 2


class TestEstimateBiasCommand:
    """Tests de la commande estimate-bias"""

    def test_writes_json_and_csv(self, runner, fast_config, tmp_path):
        """Test des fichiers JSON et CSV de l'estimation"""
        out = tmp_path / "estimate.json"
        result = runner.invoke(main, [
            "--config", fast_config, "estimate-bias", "--frame", "triangle", "--domain", "sphere", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["method"] == "pbe_sphere"
        assert np.allclose(read_bias(tmp_path / "estimate.csv"), -0.5)

    def test_rescaled_frame(self, runner, fast_config, tmp_path):
        """Test d'une frame non normalisée : biais multiplié par les normes"""
        frame = tmp_path / "frame.csv"
        write_frame_csv(triangle_frame().scaled(2.0), frame)
        out = tmp_path / "estimate.json"
        result = runner.invoke(main, [
            "--config", fast_config, "estimate-bias", "--frame", str(frame), "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        assert np.allclose(read_bias(tmp_path / "estimate.csv"), -1.0)


class TestReconstructCommand:
    """Tests de la commande reconstruct"""

    def test_round_trip(self, runner, fast_config, tmp_path):
        """Test de la reconstruction avec une ligne non inversible"""
        frame = triangle_frame()
        x = np.array([0.3, -0.2])
        outputs = write_points_csv(
            [relu_layer(frame, -0.5, x), [np.sqrt(3.0) / 2.0, 0.0, 0.0]], tmp_path / "outputs.csv"
        )
        out = tmp_path / "inputs.csv"
        result = runner.invoke(main, [
            "--config", fast_config, "reconstruct", "--frame", "triangle", "--bias", "-0.5",
            "--outputs", str(outputs), "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        table = pd.read_csv(out)
        assert table["status"].tolist() == ["ok", "not_invertible"]
        assert np.allclose(table.loc[0, ["x0", "x1"]].to_numpy(dtype=float), x)

    def test_empty_outputs(self, runner, fast_config, tmp_path):
        """Test d'un fichier de sorties vide : CSV réduit à l'en-tête"""
        outputs = tmp_path / "outputs.csv"
        outputs.write_text("")
        out = tmp_path / "inputs.csv"
        result = runner.invoke(main, [
            "--config", fast_config, "reconstruct", "--frame", "triangle", "--bias", "-0.5",
            "--outputs", str(outputs), "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        assert out.read_text().splitlines() == ["x0,x1,residual,subset,ambiguous,status"]


class TestBoundsCommand:
    """Tests de la commande bounds"""

    def test_report(self, runner, fast_config, tmp_path):
        """Test du rapport de stabilité"""
        out = tmp_path / "bounds.json"
        result = runner.invoke(main, [
            "--config", fast_config, "bounds", "--frame", "triangle", "--bias", "-1", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        data = json.loads(out.read_text())
        assert data["A_alpha"] == pytest.approx(1.5)
        assert data["B_alpha"] == pytest.approx(1.5)


class TestMain:
    """Tests du groupe de commandes"""

    def test_version(self, runner):
        """Test de l'option --version"""
        result = runner.invoke(main, ["--version"])
        assert result.exit_code == 0
        assert "relu-certify" in result.output

    def test_missing_config(self, runner, tmp_path):
        """Test d'un fichier de configuration absent"""
        result = runner.invoke(main, ["--config", str(tmp_path / "absent.yaml"), "bounds", "--frame", "triangle", "--bias", "0"])
        assert result.exit_code == 2
