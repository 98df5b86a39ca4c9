"""
Interface en ligne de commande relu-certify.

Codes de sortie : 0 succès, 1 usage, 2 lecture ou domaine invalide,
3 méthode inapplicable, 4 échec numérique.
"""

import functools
import json
import sys
from pathlib import Path
from typing import Optional

import click
import numpy as np
import pandas as pd
from loguru import logger
from rich.console import Console
from rich.table import Table

from . import __version__
from .domains.domain import DomainSpec, Variant
from .estimation.certificate import certify
from .estimation.polytope_bias import pbe_for_domain
from .estimation.results import BiasEstimate, Certificate
from .estimation.sampling_bias import sampling_bias_estimate
from .experiments.campaign import EXPERIMENTS, ExperimentCampaign
from .frames.catalog import builtin_frame
from .frames.frame import Frame, as_bias
from .frames.operations import normalize
from .reconstruction.reconstruct import ReconstructionResult, reconstruct_many
from .stability.bounds import stability_report
from .utils.config import RunConfig, load_config, worker_count
from .utils.errors import (
    DegenerateHullError,
    DimensionError,
    EnumerationCapError,
    FrameParseError,
    InvalidDomainError,
    MethodInfeasibleError,
    NotAFrameError,
    NotInvertibleError,
    NumericalError,
)
from .utils.io import read_bias, read_frame_csv, read_points_csv, to_jsonable, write_bias_csv, write_json, write_table_csv
from .utils.logger import setup_logging_from_config

EXIT_CODES = (
    ((FrameParseError, InvalidDomainError, DimensionError, FileNotFoundError), 2),
    ((MethodInfeasibleError, NotAFrameError, EnumerationCapError, DegenerateHullError), 3),
    ((NumericalError, NotInvertibleError), 4),
    ((ValueError,), 2),
)


def _console() -> Console:
    return Console(stderr=True)


def handle_errors(command):
    """Convertit les erreurs du domaine en message et code de sortie."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except click.ClickException:
            raise
        except Exception as e:
            for kinds, code in EXIT_CODES:
                if isinstance(e, kinds):
                    logger.error(f"{type(e).__name__}: {e}")
                    _console().print(f"[red]Erreur :[/red] {e}")
                    sys.exit(code)
            raise

    return wrapper


# --------------------------------------------------------------------------
# Chargement des entrées
# --------------------------------------------------------------------------

def load_frame(source: str) -> Frame:
    """Fichier CSV, ou frame intégrée ("tetrahedron", "basis:3", ...)."""
    if Path(source).exists():
        return read_frame_csv(source)
    name, _, dim = source.partition(":")
    try:
        return builtin_frame(name, int(dim) if dim else None)
    except ValueError:
        raise FileNotFoundError(f"Fichier de frame non trouvé: {source}") from None


def load_bias(source: Optional[str], frame: Frame) -> np.ndarray:
    """Fichier CSV/JSON, ou constante ("-0.6")."""
    if source is None:
        raise click.UsageError("--bias est obligatoire pour cette commande")
    try:
        return np.full(frame.m, float(source))
    except ValueError:
        return as_bias(frame, read_bias(source))


def rescale(estimate: BiasEstimate, norms: np.ndarray) -> BiasEstimate:
    """Ramène une estimation de la frame normalisée aux normes de la frame d'origine."""
    if np.allclose(norms, 1.0, rtol=0.0, atol=1e-12):
        return estimate
    weights = norms if estimate.weights is None else estimate.weights * norms
    return BiasEstimate(
        values=estimate.values * norms,
        method=estimate.method,
        correction=estimate.correction,
        weights=weights,
        free_indices=estimate.free_indices,
        flagged_indices=estimate.flagged_indices,
        metadata={**estimate.metadata, "normalized": True},
    )


def estimate_bias(frame: Frame, domain: DomainSpec, method: str, config: RunConfig) -> BiasEstimate:
    """Estimation sur la frame normalisée, exprimée pour la frame d'origine."""
    normalized, _, norms = normalize(frame, np.zeros(frame.m))
    if domain.variant == Variant.POLYTOPE_BOUNDARY:
        domain = DomainSpec.polytope_boundary(normalized)
    if method == "pbe":
        estimate = pbe_for_domain(
            normalized,
            domain,
            max_iter=config.pbe.max_iter,
            dense_samples=config.pbe.dense_samples,
            seed=config.sampling.seed,
            cap=config.enumeration_cap,
            tol=config.tolerances,
        )
    else:
        s = config.sampling
        estimate = sampling_bias_estimate(
            normalized,
            domain,
            s.n_samples,
            s.seed,
            init=s.init,
            radial=s.radial,
            gaussian=domain.variant == Variant.FULL_SPACE,
            correction_factor=s.correction_factor,
            cap=config.enumeration_cap,
            tol=config.tolerances,
            workers=worker_count(config.threads),
        )
    return rescale(estimate, norms)


def _domain(text: str, frame: Frame) -> DomainSpec:
    return DomainSpec.parse(text, n=frame.n, frame=frame)


def _emit(data, out: Optional[str]) -> None:
    if out:
        write_json(data, out)
    else:
        click.echo(json.dumps(to_jsonable(data), indent=2))


def _summary(title: str, rows) -> None:
    table = Table(title=title)
    table.add_column("Champ", style="cyan")
    table.add_column("Valeur")
    for key, value in rows:
        table.add_row(key, str(value))
    _console().print(table)


# --------------------------------------------------------------------------
# Options communes
# --------------------------------------------------------------------------

def frame_option(f):
    return click.option("--frame", "frame_source", required=True, help="Frame : fichier CSV ou nom intégré (tetrahedron, basis:3, ...)")(f)


def domain_option(f):
    return click.option("--domain", "domain_text", default="ball:1", show_default=True, help='Domaine : JSON ou raccourci ("ball:1.0", "donut:1:0.5", "cloud:pts.csv")')(f)


def estimation_options(f):
    for option in reversed([
        click.option("--method", type=click.Choice(["sample", "pbe"]), default="pbe", show_default=True),
        click.option("--n-samples", type=int, default=None, help="Nombre d'échantillons N"),
        click.option("--seed", type=int, default=None, help="Graine"),
        click.option("--correction-factor", type=float, default=None, help="Facteur du terme correctif"),
        click.option("--tol-rank", type=float, default=None),
        click.option("--tol-face", type=float, default=None),
    ]):
        f = option(f)
    return f


def _configure(ctx: click.Context, **overrides) -> RunConfig:
    config = ctx.obj.with_overrides(**overrides)
    ctx.obj = config
    return config


# --------------------------------------------------------------------------
# Commandes
# --------------------------------------------------------------------------

@click.group()
@click.version_option(__version__, prog_name="relu-certify")
@click.option("--config", "config_path", default=None, help="Chemin vers config.yaml (config/config.yaml par défaut)")
@click.option("--log-level", default=None, help="Niveau de log (DEBUG, INFO, ...)")
@click.pass_context
@handle_errors
def main(ctx: click.Context, config_path: Optional[str], log_level: Optional[str]):
    """Certification d'injectivité des couches ReLU par frames alpha-rectifiantes."""
    config = load_config(config_path)
    logging = dict(config.logging)
    if log_level:
        logging["level"] = log_level
    setup_logging_from_config(logging)
    ctx.obj = config


@main.command("certify")
@frame_option
@click.option("--bias", "bias_source", required=True, help="Biais : fichier CSV/JSON ou constante")
@domain_option
@estimation_options
@click.option("--out", default=None, help="Fichier JSON du certificat (sortie standard sinon)")
@click.pass_context
@handle_errors
def certify_command(ctx, frame_source, bias_source, domain_text, method, n_samples, seed, correction_factor, tol_rank, tol_face, out):
    """Certifie l'injectivité de la couche ReLU sur le domaine."""
    config = _configure(ctx, n_samples=n_samples, seed=seed, correction_factor=correction_factor, tol_rank=tol_rank, tol_face=tol_face)
    frame = load_frame(frame_source)
    alpha = load_bias(bias_source, frame)
    domain = _domain(domain_text, frame)
    estimate = estimate_bias(frame, domain, method, config)
    certificate: Certificate = certify(
        frame, alpha, estimate, domain,
        witness_samples=config.certificate.witness_samples,
        seed=config.sampling.seed,
        tol=config.tolerances,
    )
    certificate.metadata.update({
        "command": "certify",
        "frame": frame_source,
        "bias": bias_source,
        "domain": domain.to_dict(),
        "requested_method": method,
        "seed": config.sampling.seed,
        "n_samples": config.sampling.n_samples,
    })
    _emit(certificate, out)
    _summary("Certificat", [
        ("verdict", certificate.verdict.value),
        ("méthode", certificate.method.value),
        ("marge minimale", f"{np.min(certificate.margin):.6g}"),
        ("indices en échec", list(certificate.failing_indices)),
        ("témoin", "oui" if certificate.witness is not None else "non"),
    ])


@main.command("estimate-bias")
@frame_option
@domain_option
@estimation_options
@click.option("--out", default=None, help="Fichier JSON de l'estimation (un CSV du biais est écrit à côté)")
@click.pass_context
@handle_errors
def estimate_bias_command(ctx, frame_source, domain_text, method, n_samples, seed, correction_factor, tol_rank, tol_face, out):
    """Estime le biais maximal (échantillonnage ou approche polytopale)."""
    config = _configure(ctx, n_samples=n_samples, seed=seed, correction_factor=correction_factor, tol_rank=tol_rank, tol_face=tol_face)
    frame = load_frame(frame_source)
    estimate = estimate_bias(frame, _domain(domain_text, frame), method, config)
    _emit(estimate, out)
    if out:
        write_bias_csv(estimate.values, Path(out).with_suffix(".csv"))
    _summary("Estimation du biais", [
        ("méthode", estimate.method.value),
        ("min", f"{np.min(estimate.values):.6g}"),
        ("correction", f"{estimate.correction:.3g}"),
        ("indices libres", list(estimate.free_indices)),
        ("indices signalés", list(estimate.flagged_indices)),
    ])


@main.command("reconstruct")
@frame_option
@click.option("--bias", "bias_source", required=True, help="Biais : fichier CSV/JSON ou constante")
@click.option("--outputs", "outputs_path", required=True, help="Sorties z de la couche (CSV, une ligne par sortie)")
@click.option("--out", required=True, help="CSV des entrées reconstruites et des résidus")
@click.pass_context
@handle_errors
def reconstruct_command(ctx, frame_source, bias_source, outputs_path, out):
    """Reconstruit les entrées à partir des sorties ; les lignes non inversibles sont signalées."""
    config: RunConfig = ctx.obj
    frame = load_frame(frame_source)
    alpha = load_bias(bias_source, frame)
    outputs = read_points_csv(outputs_path, frame.m)
    results = reconstruct_many(frame, alpha, outputs, worker_count(config.threads), config.tolerances) if len(outputs) else []

    columns = [f"x{k}" for k in range(frame.n)]
    rows = []
    for result in results:
        if isinstance(result, ReconstructionResult):
            rows.append({
                **dict(zip(columns, result.x)),
                "residual": result.residual,
                "subset": " ".join(map(str, result.subset)),
                "ambiguous": " ".join(map(str, result.ambiguous_indices)),
                "status": "ok",
            })
        else:
            rows.append({**{c: np.nan for c in columns}, "residual": np.nan, "subset": "", "ambiguous": "", "status": "not_invertible"})
    write_table_csv(pd.DataFrame(rows, columns=columns + ["residual", "subset", "ambiguous", "status"]), out)
    failures = sum(r["status"] != "ok" for r in rows)
    _summary("Reconstruction", [("sorties", len(rows)), ("non inversibles", failures)])


@main.command("bounds")
@frame_option
@click.option("--bias", "bias_source", required=True, help="Biais : fichier CSV/JSON ou constante")
@domain_option
@click.option("--n-samples", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", default=None, help="Fichier JSON du rapport")
@click.pass_context
@handle_errors
def bounds_command(ctx, frame_source, bias_source, domain_text, n_samples, seed, out):
    """Bornes de frame ReLU, ensembles actifs et rayon de l'image."""
    config = _configure(ctx, n_samples=n_samples, seed=seed)
    frame = load_frame(frame_source)
    alpha = load_bias(bias_source, frame)
    report = stability_report(
        frame, alpha, _domain(domain_text, frame),
        n_samples=config.sampling.n_samples,
        seed=config.sampling.seed,
        tol=config.tolerances,
    )
    _emit(report, out)
    _summary("Stabilité", [
        ("A_alpha", f"{report.A_alpha:.6g}"),
        ("B_alpha", f"{report.B_alpha:.6g}"),
        ("ensembles actifs", report.distinct_active_sets),
        ("rayon de l'image", f"{report.image_radius:.6g}"),
    ])


@main.command("experiment")
@click.argument("name", type=click.Choice(list(EXPERIMENTS)))
@click.option("--seed", type=int, default=None)
@click.option("--full-scale", is_flag=True, help="Grilles de l'étude complète (plusieurs heures)")
@click.option("--out", default=None, help="Répertoire de sortie")
@click.pass_context
@handle_errors
def experiment_command(ctx, name, seed, full_scale, out):
    """Reproduit une expérience (evolution, transition, maxbias) en CSV."""
    config = _configure(ctx, seed=seed, output_dir=out)
    result = ExperimentCampaign(config, full_scale=full_scale).run(name)
    _summary(f"Expérience {name}", [
        ("campagne", result.campaign_id),
        ("durée", f"{result.duration_seconds:.2f}s"),
        ("lignes", result.cells),
        ("table", result.table_path),
    ])


if __name__ == "__main__":
    main()
