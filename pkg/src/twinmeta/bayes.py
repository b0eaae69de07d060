"""Bayesian inference for one pair under the normal-normal hierarchy.

The between-study standard deviation tau gets a half-normal prior and a
grid posterior; the mean effect posterior is the implied mixture of
normals over that grid.  The mean parameter is integrated out in closed
form, so no sampling is involved anywhere: every posterior is a
deterministic quadrature whose grid is extended until the tail mass is
negligible and refined until the reported median stabilizes.

Point summaries are posterior medians; intervals are shortest
(highest-density for these unimodal posteriors) by default, with
equal-tailed available via ``interval="central"``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError, ValidationError
from .model import (
    HeterogeneityResult,
    PooledEffect,
    StudyPair,
    TwinCorpus,
    back_transform,
    require_pair,
)
from .statfn import gaussian_quantile

_LOG_2PI = math.log(2.0 * math.pi)
_SQRT2 = math.sqrt(2.0)

# unit half-normal quantiles at 0.5 and 0.975
_HN_MEDIAN = 0.6744897501960817
_HN_UPPER95 = 1.9599639845400542


@dataclass(frozen=True)
class HalfNormalPrior:
    """Half-normal distribution on tau >= 0 with the given scale.

    Density 2/(scale sqrt(2 pi)) exp(-tau^2 / (2 scale^2)); the scale is
    in the same units as tau.
    """

    scale: float

    def __post_init__(self):
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise DomainError(f"half-normal scale must be positive, got {self.scale!r}")

    def log_pdf(self, tau):
        arr = np.asarray(tau, dtype=np.float64)
        const = math.log(2.0) - math.log(self.scale) - 0.5 * _LOG_2PI
        out = np.where(
            arr < 0.0, -np.inf, const - 0.5 * (arr / self.scale) ** 2
        )
        return float(out) if np.ndim(tau) == 0 else out

    def pdf(self, tau):
        out = np.exp(self.log_pdf(tau))
        return float(out) if np.ndim(tau) == 0 else out

    def cdf(self, tau):
        from ._kernel import erf

        arr = np.asarray(tau, dtype=np.float64)
        out = np.where(arr < 0.0, 0.0, erf(np.maximum(arr, 0.0) / (self.scale * _SQRT2)))
        return float(out) if np.ndim(tau) == 0 else out

    def quantile(self, p: float) -> float:
        p = float(p)
        if not 0.0 < p < 1.0:
            raise DomainError(f"probability must lie in (0, 1), got {p!r}")
        return self.scale * gaussian_quantile(0.5 * (1.0 + p))

    @property
    def median(self) -> float:
        return self.scale * _HN_MEDIAN


@dataclass(frozen=True)
class NormalPrior:
    """Normal prior for the mean effect, parameterized by sd (not variance)."""

    mean: float
    sd: float

    def __post_init__(self):
        if not (math.isfinite(self.sd) and self.sd > 0.0):
            raise DomainError(f"normal prior sd must be positive, got {self.sd!r}")
        if not math.isfinite(self.mean):
            raise DomainError(f"normal prior mean must be finite, got {self.mean!r}")


@dataclass(frozen=True)
class PriorSummary:
    """Median and central interval of a prior, for reporting."""

    median: float
    interval: tuple[float, float]
    level: float


@dataclass(frozen=True)
class GridPosterior:
    """Density known on a grid of knots, normalized by trapezoid rule.

    `log_density` is stored shifted so its maximum is 0;
    `normalization` is the trapezoid integral of exp(log_density), and
    `log_offset` restores the original scale: the integral of the raw
    density is exp(log_offset) * normalization.
    """

    grid: np.ndarray
    log_density: np.ndarray
    normalization: float
    log_offset: float

    @classmethod
    def from_log_density(cls, grid, log_density) -> "GridPosterior":
        grid = np.asarray(grid, dtype=np.float64)
        logd = np.asarray(log_density, dtype=np.float64)
        if grid.ndim != 1 or grid.size < 3:
            raise DomainError("posterior grid needs at least 3 knots")
        if logd.shape != grid.shape:
            raise DomainError("grid and log_density must have matching shapes")
        if not np.all(np.diff(grid) > 0.0):
            raise DomainError("posterior grid must be strictly increasing")
        if np.any(np.isnan(logd)):
            raise NumericalError("posterior log-density contains NaN")
        shift = float(np.max(logd))
        if not math.isfinite(shift):
            raise NumericalError("posterior log-density has no finite maximum")
        shifted = logd - shift
        dens = np.exp(shifted)
        norm = float(np.trapezoid(dens, grid))
        if not (math.isfinite(norm) and norm > 0.0):
            raise NumericalError("posterior density does not integrate to a positive value")
        return cls(
            grid=grid, log_density=shifted, normalization=norm, log_offset=shift
        )

    def __post_init__(self):
        dens = np.exp(self.log_density) / self.normalization
        steps = np.diff(self.grid)
        cdf = np.concatenate(
            [[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * steps)]
        )
        object.__setattr__(self, "_density", dens)
        object.__setattr__(self, "_cdf_knots", cdf)

    @property
    def density(self) -> np.ndarray:
        """Normalized density at the knots."""
        return self._density

    def log_integral(self) -> float:
        """Log of the integral of the raw (pre-normalization) density."""
        return self.log_offset + math.log(self.normalization)

    def pdf(self, x):
        out = np.interp(np.asarray(x, dtype=np.float64), self.grid, self._density,
                        left=0.0, right=0.0)
        return float(out) if np.ndim(x) == 0 else out

    def cdf(self, x):
        out = np.interp(np.asarray(x, dtype=np.float64), self.grid, self._cdf_knots,
                        left=0.0, right=1.0)
        out = np.clip(out / self._cdf_knots[-1], 0.0, 1.0)
        return float(out) if np.ndim(x) == 0 else out

    def quantile(self, q):
        arr = np.asarray(q, dtype=np.float64)
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise DomainError("quantile probabilities must lie in [0, 1]")
        cdf = self._cdf_knots / self._cdf_knots[-1]
        out = np.interp(arr, cdf, self.grid)
        return float(out) if np.ndim(q) == 0 else out

    @property
    def median(self) -> float:
        return self.quantile(0.5)

    def central_interval(self, level: float) -> tuple[float, float]:
        level = _check_level(level)
        return (
            self.quantile(0.5 * (1.0 - level)),
            self.quantile(0.5 * (1.0 + level)),
        )

    def shortest_interval(self, level: float) -> tuple[float, float]:
        """Narrowest interval holding `level` posterior mass (level >= 0.5)."""
        level = _check_level(level)
        if level < 0.5:
            raise DomainError(
                "shortest intervals are supported for level >= 0.5 only"
            )
        cdf = self._cdf_knots / self._cdf_knots[-1]
        span = 1.0 - level

        def scan(lo_q: float, hi_q: float, m: int):
            qs = np.linspace(lo_q, hi_q, m)
            left = np.interp(qs, cdf, self.grid)
            right = np.interp(qs + level, cdf, self.grid)
            i = int(np.argmin(right - left))
            return float(qs[i]), float(left[i]), float(right[i])

        q1, a1, b1 = scan(0.0, span, 4001)
        window = span / 4000.0
        q2, a2, b2 = scan(max(0.0, q1 - window), min(span, q1 + window), 2001)
        if b2 - a2 <= b1 - a1:
            return a2, b2
        return a1, b1


def _check_level(level: float) -> float:
    level = float(level)
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level!r}")
    return level


def _log_ml_arrays(ys, s2s, taus, mu_prior: NormalPrior | None) -> np.ndarray:
    """Log marginal likelihood at each tau with the mean integrated out."""
    y = np.asarray(ys, dtype=np.float64)[:, None]
    s2 = np.asarray(s2s, dtype=np.float64)[:, None]
    tau2 = np.asarray(taus, dtype=np.float64)[None, :] ** 2
    k = y.shape[0]
    v = s2 + tau2
    w = 1.0 / v
    total = np.sum(w, axis=0)
    sum_log_v = np.sum(np.log(v), axis=0)
    if mu_prior is None:
        mean = np.sum(w * y, axis=0) / total
        qgen = np.sum(w * (y - mean) ** 2, axis=0)
        return (
            -0.5 * (k - 1) * _LOG_2PI
            - 0.5 * sum_log_v
            - 0.5 * np.log(total)
            - 0.5 * qgen
        )
    var0 = mu_prior.sd**2
    r = y - mu_prior.mean
    swr = np.sum(w * r, axis=0)
    swr2 = np.sum(w * r * r, axis=0)
    c = 1.0 + var0 * total
    quad = swr2 - var0 * swr * swr / c
    return -0.5 * k * _LOG_2PI - 0.5 * (sum_log_v + np.log(c)) - 0.5 * quad


def marginal_likelihood(pair: StudyPair, tau, mu_prior: NormalPrior | None = None):
    """Log marginal likelihood of the pair's data at heterogeneity tau.

    With ``mu_prior=None`` the mean is integrated against an improper
    uniform prior (the reference analysis); with a NormalPrior the value
    is the proper log density of the data under covariance
    diag(s_i^2) + tau^2 I + sd^2 J.  `tau` may be a scalar or an array.
    """
    pair = require_pair(pair)
    arr = np.atleast_1d(np.asarray(tau, dtype=np.float64))
    if np.any(arr < 0.0) or np.any(~np.isfinite(arr)):
        raise DomainError("tau must be non-negative and finite")
    out = _log_ml_arrays(
        pair.estimates(), [s * s for s in pair.std_errs()], arr.ravel(), mu_prior
    )
    if np.ndim(tau) == 0:
        return float(out[0])
    return out.reshape(np.shape(tau))


def _adaptive_grid_posterior(
    logf,
    scale_hint: float,
    *,
    n0: int = 401,
    median_tol: float = 1e-4,
    max_extend: int = 80,
    max_refine: int = 6,
) -> GridPosterior:
    """Posterior on [0, inf) truncated where its tail is negligible.

    A uniform bulk grid on [0, hi] is extended until it holds the peak
    and most of the mass, a geometric tail carries slowly decaying
    densities down to a 1e-12 relative cut, and the bulk knot count
    doubles until the posterior median stabilizes.
    """
    hi = 6.0 * scale_hint
    bulk_cut = math.log(1e-6)
    for _ in range(max_extend):
        grid = np.linspace(0.0, hi, n0)
        logd = logf(grid)
        if logd[-1] - np.max(logd) <= bulk_cut:
            break
        hi *= 1.5
    else:
        raise NumericalError(
            "posterior tail does not decay within the quadrature search range"
        )
    peak = float(np.max(logd))
    tail_cut = math.log(1e-12)
    tail_knots: list[np.ndarray] = []
    t = hi
    for _ in range(120):
        block = t * 1.06 ** np.arange(1, 33)
        done = logf(block) - peak <= tail_cut
        if np.any(done):
            tail_knots.append(block[: int(np.argmax(done)) + 1])
            break
        tail_knots.append(block)
        t = block[-1]
    else:
        raise NumericalError(
            "posterior tail does not decay within the quadrature search range"
        )
    tail = np.concatenate(tail_knots)
    previous = None
    n = n0
    for _ in range(max_refine + 1):
        grid = np.concatenate([np.linspace(0.0, hi, n), tail])
        gp = GridPosterior.from_log_density(grid, logf(grid))
        med = gp.median
        if previous is not None and abs(med - previous) <= median_tol * max(
            abs(med), 1e-12
        ):
            return gp
        previous = med
        n = 2 * n - 1
    raise NumericalError("posterior median failed to stabilize under grid refinement")


def _tau_log_posterior(pair: StudyPair, prior: HalfNormalPrior):
    ys = pair.estimates()
    s2s = [s * s for s in pair.std_errs()]

    def logf(taus: np.ndarray) -> np.ndarray:
        return _log_ml_arrays(ys, s2s, taus, None) + prior.log_pdf(taus)

    return logf


def _summarize(gp: GridPosterior, level: float, interval: str) -> tuple[float, float, float]:
    if interval == "shortest":
        lo, hi = gp.shortest_interval(level)
    elif interval == "central":
        lo, hi = gp.central_interval(level)
    else:
        raise DomainError(
            f"interval must be 'shortest' or 'central', got {interval!r}"
        )
    return gp.median, lo, hi


def tau_posterior(
    pair: StudyPair,
    prior: HalfNormalPrior,
    level: float = 0.95,
    interval: str = "shortest",
) -> tuple[HeterogeneityResult, GridPosterior]:
    """Posterior for the heterogeneity tau under a half-normal prior.

    Returns the median-and-interval summary together with the full grid
    posterior.  The posterior is proportional to
    prior(tau) * marginal_likelihood(pair, tau).
    """
    pair = require_pair(pair)
    if not isinstance(prior, HalfNormalPrior):
        raise DomainError("tau needs a HalfNormalPrior")
    level = _check_level(level)
    gp = _adaptive_grid_posterior(_tau_log_posterior(pair, prior), prior.scale)
    med, lo, hi = _summarize(gp, level, interval)
    result = HeterogeneityResult(
        tau_hat=med,
        interval=(lo, hi),
        level=level,
        method="bayes-median",
        upper_unbounded=False,
    )
    return result, gp


def _thin(gp: GridPosterior, max_knots: int = 2049) -> tuple[np.ndarray, np.ndarray]:
    """Grid and normalized trapezoid weights, capped for mixture work."""
    grid = gp.grid
    dens = gp.density
    if grid.size > max_knots:
        g2 = np.linspace(grid[0], grid[-1], max_knots)
        dens = np.interp(g2, grid, dens)
        grid = g2
    weights = dens * np.gradient(grid)
    weights[0] *= 0.5
    weights[-1] *= 0.5
    weights = np.maximum(weights, 0.0)
    weights /= weights.sum()
    return grid, weights


def _mixture_log_density(x: np.ndarray, means, sds, weights) -> np.ndarray:
    """Log density of a normal mixture, evaluated in chunks."""
    out = np.empty_like(x)
    inv = 1.0 / np.asarray(sds)
    coef = np.asarray(weights) * inv / math.sqrt(2.0 * math.pi)
    m = np.asarray(means)
    for start in range(0, x.size, 512):
        chunk = x[start : start + 512, None]
        z = (chunk - m[None, :]) * inv[None, :]
        dens = np.sum(coef[None, :] * np.exp(-0.5 * z * z), axis=1)
        out[start : start + 512] = dens
    return np.log(np.maximum(out, 1e-320))


def mu_posterior(
    pair: StudyPair,
    prior: HalfNormalPrior,
    level: float = 0.95,
    interval: str = "shortest",
) -> tuple[PooledEffect, GridPosterior]:
    """Posterior for the mean effect: a tau-mixture of conditional normals.

    Conditional on tau the mean posterior (improper-uniform mean prior)
    is normal with mean mu_hat(tau) and variance 1/sum(w_i(tau)); mixing
    over the tau posterior yields p(mu | y).  The summary effect is the
    posterior median with a shortest credible interval, back-transformed
    onto the ratio scale for log-scale pairs; the returned grid
    posterior always stays on the analysis scale.
    """
    pair = require_pair(pair)
    if not isinstance(prior, HalfNormalPrior):
        raise DomainError("tau needs a HalfNormalPrior")
    level = _check_level(level)
    gp_tau = _adaptive_grid_posterior(_tau_log_posterior(pair, prior), prior.scale)
    taus, weights = _thin(gp_tau)
    y = np.asarray(pair.estimates())[:, None]
    s2 = np.asarray([s * s for s in pair.std_errs()])[:, None]
    v = s2 + taus[None, :] ** 2
    w = 1.0 / v
    total = np.sum(w, axis=0)
    cond_mean = np.sum(w * y, axis=0) / total
    cond_sd = np.sqrt(1.0 / total)
    lo_x = float(np.min(cond_mean - 8.5 * cond_sd))
    hi_x = float(np.max(cond_mean + 8.5 * cond_sd))
    x = np.linspace(lo_x, hi_x, 4001)
    gp_mu = GridPosterior.from_log_density(
        x, _mixture_log_density(x, cond_mean, cond_sd, weights)
    )
    med, lo, hi = _summarize(gp_mu, level, interval)
    effect = PooledEffect.build(med, lo, hi, method="Bayes")
    if pair.scale == "log":
        effect = back_transform(effect)
    return effect, gp_mu


def prior_summary(prior: HalfNormalPrior, level: float = 0.95) -> PriorSummary:
    """Median and central [0, upper] interval of a half-normal prior."""
    level = _check_level(level)
    upper = prior.scale * gaussian_quantile(0.5 * (1.0 + level))
    return PriorSummary(median=prior.median, interval=(0.0, upper), level=level)


def _as_pairs(pairs) -> tuple[StudyPair, ...]:
    if isinstance(pairs, StudyPair):
        seq: tuple[StudyPair, ...] = (pairs,)
    elif isinstance(pairs, TwinCorpus):
        seq = tuple(pairs.pairs)
    else:
        seq = tuple(pairs)
    if not seq:
        raise ValidationError("at least one pair is required")
    scales = {p.scale for p in seq}
    if len(scales) > 1:
        raise ValidationError(f"mixed scales across pairs: {sorted(scales)}")
    for p in seq:
        require_pair(p)
    return seq


def bayes_factor_homogeneity(
    pairs,
    mu_prior_sd: float,
    tau_prior: HalfNormalPrior,
) -> float:
    """Bayes factor BF01 for homogeneity (tau = 0) against heterogeneity.

    BF01 = m(y | tau=0) / integral of m(y | tau) tau_prior(tau) dtau,
    where each pair gets an independent, proper Normal(0, sd) prior on
    its mean and the tau integral is shared across pairs.  Values above
    1 favor homogeneity.
    """
    seq = _as_pairs(pairs)
    sd = float(mu_prior_sd) if mu_prior_sd is not None else math.nan
    if not (math.isfinite(sd) and sd > 0.0):
        raise DomainError(
            "Bayes factors require a proper mean prior: mu_prior_sd must be a positive real"
        )
    if not isinstance(tau_prior, HalfNormalPrior):
        raise DomainError("tau_prior must be a HalfNormalPrior (proper)")
    mean_prior = NormalPrior(mean=0.0, sd=sd)
    data = [
        (p.estimates(), [s * s for s in p.std_errs()]) for p in seq
    ]
    log_numerator = sum(
        float(_log_ml_arrays(ys, s2s, np.array([0.0]), mean_prior)[0])
        for ys, s2s in data
    )

    def logf(taus: np.ndarray) -> np.ndarray:
        acc = tau_prior.log_pdf(taus)
        for ys, s2s in data:
            acc = acc + _log_ml_arrays(ys, s2s, taus, mean_prior)
        return acc

    gp = _adaptive_grid_posterior(logf, tau_prior.scale)
    return math.exp(log_numerator - gp.log_integral())
