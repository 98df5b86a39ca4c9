"""
Algorithme de frame ReLU : reconstruction itérative à partir de la sortie.

    y_{k+1} = y_k + lambda  * sum_{i in I_x}        (<x, phi_i> - <y_k, phi_i>) phi_i
                  + lambda0 * sum_{i in I_yk \\ I_x} (alpha_i   - <y_k, phi_i>) phi_i

Les coefficients <x, phi_i> des indices actifs sont lus sur la sortie
(z_i + alpha_i). lambda0 = 0 donne l'algorithme de frame restreint aux
indices actifs.
"""

from typing import Optional

import numpy as np
from loguru import logger

from ..frames.frame import BiasLike, Frame, as_bias
from ..frames.numerics import DEFAULT_TOLERANCES, Tolerances
from ..frames.operations import frame_bounds
from .reconstruct import ReconstructionResult, _output_vector, read_active, residual


def default_relaxation(frame: Frame, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """lambda = 2 / (A + B) avec les bornes de la frame entière."""
    bounds = frame_bounds(frame, tol)
    return 2.0 / (bounds.lower + bounds.upper)


def relu_frame_algorithm(
    frame: Frame,
    bias: BiasLike,
    z,
    lam: Optional[float] = None,
    lam0: Optional[float] = None,
    tol: float = 1e-12,
    max_iter: int = 1_000,
    divergence_window: int = 20,
    reference: Optional[np.ndarray] = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ReconstructionResult:
    """
    Itère depuis y_0 = 0 jusqu'à ||y_{k+1} - y_k|| < tol ou max_iter.

    Args:
        frame: Frame
        bias: Biais alpha
        z: Sortie C_alpha x
        lam: Pas sur les indices actifs (2/(A+B) par défaut)
        lam0: Pas sur les indices activés à tort (lam par défaut, 0 pour la version restreinte)
        tol: Seuil d'arrêt sur la taille du pas
        max_iter: Nombre maximal d'itérations
        divergence_window: Arrêt après autant de croissances consécutives du pas
        reference: Entrée x connue ; l'historique ``errors`` reçoit ||x - y_k||

    Returns:
        ReconstructionResult avec l'historique des pas (et des erreurs)
    """
    alpha = as_bias(frame, bias)
    z = _output_vector(frame, z)
    lam = default_relaxation(frame, tolerances) if lam is None else lam
    lam0 = lam if lam0 is None else lam0

    active, ambiguous = read_active(z, alpha)
    inside = np.zeros(frame.m, dtype=bool)
    inside[active] = True
    targets = z[active] + alpha[active]
    phi_active = frame.vectors[active]

    y = np.zeros(frame.n)
    steps = []
    errors = [] if reference is None else [float(np.linalg.norm(reference - y))]
    growth = 0
    converged = False
    diverged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        coeffs = frame.vectors @ y
        update = lam * phi_active.T @ (targets - coeffs[active])
        wrongly = (~inside) & (coeffs >= alpha)
        if lam0 and np.any(wrongly):
            update = update + lam0 * frame.vectors[wrongly].T @ (alpha[wrongly] - coeffs[wrongly])
        y = y + update
        step = float(np.linalg.norm(update))
        growth = growth + 1 if steps and step > steps[-1] else 0
        steps.append(step)
        if reference is not None:
            errors.append(float(np.linalg.norm(reference - y)))
        if not np.isfinite(step) or growth >= divergence_window:
            diverged = True
            logger.warning(f"Divergence de l'algorithme de frame après {iterations} itération(s)")
            break
        if step < tol:
            converged = True
            break

    res = residual(frame, alpha, y, z) if np.all(np.isfinite(y)) else float("inf")
    logger.debug(f"Algorithme de frame : {iterations} itération(s), résidu {res:.3g}")
    return ReconstructionResult(
        x=y,
        subset=tuple(int(i) for i in active),
        residual=res,
        iterations=iterations,
        ambiguous_indices=ambiguous,
        converged=converged,
        history=steps,
        errors=errors,
        metadata={"lambda": lam, "lambda0": lam0, "diverged": diverged},
    )
