"""
Module d'estimation du biais maximal et de certification d'injectivité
"""

from .results import BiasEstimate, Certificate, EstimationMethod, Verdict, Witness, CERTIFICATE_SCHEMA
from .sampling_bias import (
    sampling_bias_estimate,
    stopping_variant,
    bias_trajectory,
    constant_bias_estimate,
    estimation_samples,
)
from .polytope_bias import (
    pbe_boundary,
    pbe_sphere,
    pbe_donut,
    pbe_nonneg_ball,
    pbe_ball_complement,
    pbe_for_domain,
    dense_sphere_bias,
)
from .certificate import certify, find_witness

__all__ = [
    "BiasEstimate",
    "Certificate",
    "EstimationMethod",
    "Verdict",
    "Witness",
    "CERTIFICATE_SCHEMA",
    "sampling_bias_estimate",
    "stopping_variant",
    "bias_trajectory",
    "constant_bias_estimate",
    "estimation_samples",
    "pbe_boundary",
    "pbe_sphere",
    "pbe_donut",
    "pbe_nonneg_ball",
    "pbe_ball_complement",
    "pbe_for_domain",
    "dense_sphere_bias",
    "certify",
    "find_witness",
]
