"""Meta-analysis of study twins.

Frequentist and Bayesian inference for pairs of studies estimating the
same effect, exact event probabilities for the usual homogeneity
indicators, joint heterogeneity models across many pairs, and a Monte
Carlo oracle for validating the analytic results.
"""
__version__ = "0.1.0"

from importlib import resources as _resources

from ._kernel import BACKEND
from .bayes import (
    GridPosterior,
    HalfNormalPrior,
    NormalPrior,
    PriorSummary,
    bayes_factor_homogeneity,
    marginal_likelihood,
    mu_posterior,
    prior_summary,
    tau_posterior,
)
from .cli import ingest_csv
from .empirical import CorpusSummary, summarize_corpus, uniformity_diagnostics
from .errors import DomainError, NumericalError, TwinMetaError, ValidationError
from .events import (
    CONVENTIONS,
    EVENT_KINDS,
    EventSpec,
    event_probability,
    event_threshold,
    i2_from_ratio,
    invert_event_probability,
    probability_curves,
    ratio_from_i2,
)
from .freq import (
    POOLING_METHODS,
    QResult,
    cochran_q,
    generalized_q,
    is_significant,
    pooled_effect,
    tau_estimate_k2,
)
from .model import (
    HeterogeneityResult,
    PooledEffect,
    StudyPair,
    StudyResult,
    TwinCorpus,
    back_transform,
    from_ratio_ci,
    validate_pair,
)
from .multipair import (
    CommonTauResult,
    HierTauResult,
    common_tau_bayes,
    common_tau_freq,
    random_tau_predictive,
)
from .sim import SimConfig, mc_event_probabilities, mc_q_ks, simulate_pairs


def dataset_path(name: str):
    """Return the path of a bundled example corpus.

    Available names: ``glow`` (two vertebral fracture trials, mean
    difference in mL) and ``respire`` (two bronchiectasis trials, rate
    ratios at two dosing regimens).
    """
    ref = _resources.files(__name__) / "data" / f"{name}.csv"
    if not ref.is_file():
        raise ValidationError(f"unknown dataset {name!r}; available: glow, respire")
    return ref


__all__ = [
    "BACKEND",
    "CONVENTIONS",
    "CommonTauResult",
    "CorpusSummary",
    "DomainError",
    "EVENT_KINDS",
    "EventSpec",
    "GridPosterior",
    "HalfNormalPrior",
    "HeterogeneityResult",
    "HierTauResult",
    "NormalPrior",
    "NumericalError",
    "POOLING_METHODS",
    "PooledEffect",
    "PriorSummary",
    "QResult",
    "SimConfig",
    "StudyPair",
    "StudyResult",
    "TwinCorpus",
    "TwinMetaError",
    "ValidationError",
    "__version__",
    "back_transform",
    "bayes_factor_homogeneity",
    "cochran_q",
    "common_tau_bayes",
    "common_tau_freq",
    "dataset_path",
    "event_probability",
    "event_threshold",
    "from_ratio_ci",
    "generalized_q",
    "i2_from_ratio",
    "ingest_csv",
    "invert_event_probability",
    "is_significant",
    "marginal_likelihood",
    "mc_event_probabilities",
    "mc_q_ks",
    "mu_posterior",
    "pooled_effect",
    "prior_summary",
    "probability_curves",
    "random_tau_predictive",
    "ratio_from_i2",
    "simulate_pairs",
    "summarize_corpus",
    "tau_estimate_k2",
    "tau_posterior",
    "uniformity_diagnostics",
    "validate_pair",
]
