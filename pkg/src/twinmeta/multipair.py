"""Heterogeneity shared across several pairs.

Two exchangeability models over a corpus:

* a single common tau for every pair, estimated either by matching the
  pooled generalized Q statistic to its degrees of freedom (moment
  estimator with a profile interval) or by a grid posterior;
* a hierarchy where each pair has its own tau drawn from a half-normal
  with unknown scale phi, yielding a predictive distribution for the
  heterogeneity of the next, unseen pair.

Pairs enter through their marginal likelihoods only, so every pair may
have its own studies and standard errors; mixing outcome scales across
pairs is refused.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bayes import (
    GridPosterior,
    HalfNormalPrior,
    _adaptive_grid_posterior,
    _check_level,
    _log_ml_arrays,
    _summarize,
)
from .errors import DomainError, NumericalError, ValidationError
from .freq import generalized_q
from .model import HeterogeneityResult, StudyPair, TwinCorpus, require_corpus
from .statfn import brent_root, chisq_quantile, chisq_sf, gaussian_cdf


@dataclass(frozen=True)
class CommonTauResult:
    """Moment estimate of a tau shared by all pairs.

    `q_total` is the pooled homogeneity statistic at tau = 0 and
    `p_value` its chi-squared upper tail on `df` degrees of freedom.
    """

    tau_hat: float
    interval: tuple[float, float]
    q_total: float
    df: int
    p_value: float
    level: float
    upper_unbounded: bool = False


@dataclass(frozen=True)
class HierTauResult:
    """Posterior for the half-normal hyper-scale phi and the implied
    predictive distribution of the next pair's tau."""

    phi_posterior: GridPosterior
    predictive: GridPosterior
    predictive_median: float
    predictive_q95: float


def _corpus_pairs(corpus) -> tuple[StudyPair, ...]:
    if isinstance(corpus, StudyPair):
        corpus = TwinCorpus(pairs=(corpus,))
    elif not isinstance(corpus, TwinCorpus):
        corpus = TwinCorpus(pairs=tuple(corpus))
    require_corpus(corpus)
    scales = {p.scale for p in corpus.pairs}
    if len(scales) > 1:
        raise ValidationError(f"mixed scales across pairs: {sorted(scales)}")
    return tuple(corpus.pairs)


def _pair_arrays(pairs) -> list[tuple[list[float], list[float]]]:
    return [
        (list(p.estimates()), [s * s for s in p.std_errs()]) for p in pairs
    ]


def common_tau_freq(corpus, level: float = 0.95, tau_max: float | None = None) -> CommonTauResult:
    """Moment estimate of a common tau with a pooled profile interval.

    The estimate solves sum_j Q_j(tau) = sum_j (k_j - 1), where Q_j is
    pair j's generalized Q with its own stratified mean; interval ends
    solve the same curve against chi-squared quantiles.  All solutions
    truncate at zero, and the interval's upper end saturates at
    `tau_max` (default 100 sqrt(max_j sum_i s_ji^2)) with
    `upper_unbounded` set.
    """
    pairs = _corpus_pairs(corpus)
    level = _check_level(level)
    df = sum(p.k - 1 for p in pairs)
    if tau_max is None:
        tau_max = 100.0 * math.sqrt(max(sum(s * s for s in p.std_errs()) for p in pairs))
    elif not (math.isfinite(tau_max) and tau_max > 0.0):
        raise DomainError(f"tau_max must be positive, got {tau_max!r}")

    def q_at(tau: float) -> float:
        return sum(generalized_q(p, tau) for p in pairs)

    q0 = q_at(0.0)
    p_value = chisq_sf(q0, df)
    q_cap = q_at(tau_max)

    def solve_capped(target: float) -> float:
        if q0 <= target:
            return 0.0
        if q_cap > target:
            return tau_max
        return brent_root(lambda t: q_at(t) - target, 0.0, tau_max)

    # the point estimate is never censored by tau_max: widen the bracket
    if q0 <= df:
        tau_hat = 0.0
    else:
        hi = tau_max
        for _ in range(60):
            if q_at(hi) <= df:
                break
            hi *= 2.0
        else:
            raise NumericalError("pooled Q does not fall to its degrees of freedom")
        tau_hat = brent_root(lambda t: q_at(t) - df, 0.0, hi)
    lower = solve_capped(chisq_quantile(0.5 * (1.0 + level), df))
    upper_target = chisq_quantile(0.5 * (1.0 - level), df)
    unbounded = q0 > upper_target and q_cap > upper_target
    upper = solve_capped(upper_target)
    return CommonTauResult(
        tau_hat=tau_hat,
        interval=(lower, upper),
        q_total=q0,
        df=df,
        p_value=p_value,
        level=level,
        upper_unbounded=unbounded,
    )


def common_tau_bayes(
    corpus,
    prior: HalfNormalPrior | None = None,
    level: float = 0.95,
    interval: str = "shortest",
) -> HeterogeneityResult:
    """Grid posterior for a common tau across all pairs.

    The posterior multiplies every pair's marginal likelihood (mean
    integrated against an improper uniform) at a shared tau.  With
    ``prior=None`` the tau prior is improper uniform, which is proper
    only when the pooled degrees of freedom reach 2; pass a
    HalfNormalPrior otherwise.
    """
    pairs = _corpus_pairs(corpus)
    level = _check_level(level)
    if prior is not None and not isinstance(prior, HalfNormalPrior):
        raise DomainError("prior must be a HalfNormalPrior or None")
    df = sum(p.k - 1 for p in pairs)
    if prior is None and df < 2:
        raise ValidationError(
            "an improper uniform tau prior needs at least 2 pooled degrees of freedom; "
            "use a HalfNormalPrior for this corpus"
        )
    data = _pair_arrays(pairs)

    def logf(taus: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(taus) if prior is None else prior.log_pdf(taus)
        for ys, s2s in data:
            acc = acc + _log_ml_arrays(ys, s2s, taus, None)
        return acc

    if prior is not None:
        hint = prior.scale
    else:
        pm = common_tau_freq(corpus, level=level)
        max_se = max(max(p.std_errs()) for p in pairs)
        hint = max(pm.tau_hat, max_se)
    gp = _adaptive_grid_posterior(logf, hint)
    med, lo, hi = _summarize(gp, level, interval)
    return HeterogeneityResult(
        tau_hat=med,
        interval=(lo, hi),
        level=level,
        method="bayes-median",
        upper_unbounded=False,
    )


def halfnormal_mixture_cdf(t, scales, weights):
    """CDF of a mixture of half-normals with the given scales/weights."""
    scales = np.asarray(scales, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if scales.shape != weights.shape or scales.ndim != 1:
        raise DomainError("scales and weights must be 1-d arrays of equal length")
    if np.any(scales <= 0.0) or np.any(weights < 0.0):
        raise DomainError("scales must be positive and weights non-negative")
    total = weights.sum()
    if total <= 0.0:
        raise DomainError("weights must not all be zero")
    arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    z = arr[:, None] / scales[None, :]
    vals = (weights[None, :] / total) * (2.0 * gaussian_cdf(z) - 1.0)
    out = np.where(arr < 0.0, 0.0, np.sum(vals, axis=1))
    return float(out[0]) if np.ndim(t) == 0 else out.reshape(np.shape(t))


def random_tau_predictive(
    corpus,
    hyper_upper: float = 10.0,
    n_phi: int = 400,
    n_tau: int = 400,
) -> HierTauResult:
    """Predictive heterogeneity for an unseen pair under a half-normal
    hierarchy: tau_j ~ HN(phi) per pair, phi ~ Uniform(0, hyper_upper).

    Each pair's evidence about phi is the integral of its marginal
    likelihood against HN(phi); the predictive for a new pair's tau
    mixes HN(phi) over the phi posterior.
    """
    pairs = _corpus_pairs(corpus)
    if not (math.isfinite(hyper_upper) and hyper_upper > 0.0):
        raise DomainError(f"hyper_upper must be positive, got {hyper_upper!r}")
    if n_phi < 50 or n_tau < 50:
        raise DomainError("grids need at least 50 knots")
    data = _pair_arrays(pairs)

    phis = np.linspace(1e-4, hyper_upper, n_phi)
    u = np.linspace(0.0, 8.0, n_tau)
    taus = phis[:, None] * u[None, :]
    # log HN(tau; phi) along each row
    log_hn = (
        math.log(2.0)
        - np.log(phis)[:, None]
        - 0.5 * math.log(2.0 * math.pi)
        - 0.5 * u[None, :] ** 2
    )
    log_phi_post = np.zeros(n_phi)
    flat = taus.ravel()
    for ys, s2s in data:
        integrand = _log_ml_arrays(ys, s2s, flat, None).reshape(n_phi, n_tau) + log_hn
        shift = integrand.max(axis=1)
        vals = np.trapezoid(np.exp(integrand - shift[:, None]), u, axis=1) * phis
        log_phi_post += shift + np.log(np.maximum(vals, 1e-320))
    phi_gp = GridPosterior.from_log_density(phis, log_phi_post)

    h = phis[1] - phis[0]
    weights = phi_gp.density * h
    weights[0] *= 0.5
    weights[-1] *= 0.5
    weights = weights / weights.sum()

    def pred_cdf(t: float) -> float:
        return halfnormal_mixture_cdf(t, phis, weights)

    hi_t = 8.0 * hyper_upper
    predictive_median = brent_root(lambda t: pred_cdf(t) - 0.5, 0.0, hi_t)
    predictive_q95 = brent_root(lambda t: pred_cdf(t) - 0.95, 0.0, hi_t)
    t999 = brent_root(lambda t: pred_cdf(t) - 0.999, 0.0, hi_t)
    # geometric spacing resolves mixture components as narrow as phis[0]
    grid_t = np.concatenate(
        [[0.0], np.geomspace(0.1 * phis[0], 1.2 * t999, 2400)]
    )
    z = grid_t[:, None] / phis[None, :]
    dens = np.sum(
        weights[None, :]
        * (2.0 / (phis[None, :] * math.sqrt(2.0 * math.pi)))
        * np.exp(-0.5 * z * z),
        axis=1,
    )
    pred_gp = GridPosterior.from_log_density(grid_t, np.log(np.maximum(dens, 1e-320)))
    return HierTauResult(
        phi_posterior=phi_gp,
        predictive=pred_gp,
        predictive_median=predictive_median,
        predictive_q95=predictive_q95,
    )
