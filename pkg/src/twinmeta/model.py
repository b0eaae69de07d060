"""Domain types shared by every analysis: studies, pairs, corpora,
results, and effect-scale transforms.

Constructors are permissive so that questionable data can be loaded,
inspected, and reported on; `validate_pair` collects every rule
violation instead of stopping at the first.  Analysis functions refuse
invalid input by raising ValidationError (see `require_pair`).

All types are immutable and freely shareable across threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ValidationError

MEASURES = ("MD", "logOR", "logRR", "logIRR", "logHR")
SCALES = ("identity", "log")

# measures whose estimates live on the log scale and back-transform by exp
LOG_MEASURES = ("logOR", "logRR", "logIRR", "logHR")


@dataclass(frozen=True)
class StudyResult:
    """One study's effect estimate on the analysis scale.

    `estimate` and `std_err` always live on the scale the analysis runs
    on; for ratio measures that is the log scale (see `from_ratio_ci`).
    `notes` carries ingestion caveats such as asymmetric source CIs.
    """

    label: str
    estimate: float
    std_err: float
    sample_size: int | None = None
    notes: tuple[str, ...] = ()


@dataclass(frozen=True)
class StudyPair:
    """An ordered collection of studies estimating one common effect.

    Pair-only operations require exactly two studies; the joint models
    accept longer groups (k > 2) under the same type.
    """

    pair_id: str
    studies: tuple[StudyResult, ...]
    measure: str = "MD"
    scale: str = "identity"

    @property
    def k(self) -> int:
        return len(self.studies)

    def estimates(self) -> tuple[float, ...]:
        return tuple(s.estimate for s in self.studies)

    def std_errs(self) -> tuple[float, ...]:
        return tuple(s.std_err for s in self.studies)


@dataclass(frozen=True)
class TwinCorpus:
    """A collection of study pairs analyzed together."""

    pairs: tuple[StudyPair, ...]
    provenance: str | None = None

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


@dataclass(frozen=True)
class HeterogeneityResult:
    """Between-study standard deviation estimate with its interval.

    `method` tags the producing estimator: "freq-k2" for the closed-form
    pair estimator with Q-profile interval, "PM-joint" for the common
    value across many pairs, "bayes-median" for a posterior median with
    credible interval.  `upper_unbounded` records that the profile never
    crossed its target below the search cap, so `interval[1]` is the cap
    rather than a genuine bound.
    """

    tau_hat: float
    interval: tuple[float, float]
    level: float
    method: str
    upper_unbounded: bool = False


@dataclass(frozen=True)
class PooledEffect:
    """Combined effect estimate with a confidence or credible interval."""

    estimate: float
    interval: tuple[float, float]
    width: float
    method: str
    back_transformed: bool = False

    @classmethod
    def build(
        cls,
        estimate: float,
        lo: float,
        hi: float,
        method: str,
        back_transformed: bool = False,
    ) -> "PooledEffect":
        """Construct with the width derived from the interval ends."""
        if not lo <= estimate <= hi:
            raise ValidationError(
                f"pooled estimate {estimate!r} outside its interval [{lo!r}, {hi!r}]"
            )
        return cls(
            estimate=float(estimate),
            interval=(float(lo), float(hi)),
            width=float(hi) - float(lo),
            method=method,
            back_transformed=back_transformed,
        )


@dataclass(frozen=True)
class ValidationReport:
    """Everything wrong (and questionable) about one pair."""

    pair_id: str
    violations: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def _finite(x) -> bool:
    try:
        return math.isfinite(float(x))
    except (TypeError, ValueError):
        return False


def from_ratio_ci(
    point: float,
    lo: float,
    hi: float,
    level: float = 0.95,
    label: str = "",
    sample_size: int | None = None,
) -> StudyResult:
    """Convert a ratio-scale point estimate and CI to a log-scale study.

    The returned estimate is ln(point); the standard error comes from
    the full CI width, s = (ln(hi) - ln(lo)) / (2 z), with z the normal
    quantile for the given two-sided level.  Published CIs are rounded,
    so when the log-scale half-widths disagree by more than 5% a note is
    attached rather than guessing which half to trust.
    """
    for name, value in (("point", point), ("lo", lo), ("hi", hi)):
        if not _finite(value) or float(value) <= 0.0:
            raise ValidationError(f"{name} must be a positive real, got {value!r}")
    point, lo, hi = float(point), float(lo), float(hi)
    if not lo < point < hi:
        raise ValidationError(
            f"bounds must satisfy lo < point < hi, got lo={lo!r} point={point!r} hi={hi!r}"
        )
    if not (_finite(level) and 0.0 < float(level) < 1.0):
        raise ValidationError(f"level must lie in (0, 1), got {level!r}")
    from .statfn import gaussian_quantile

    z = gaussian_quantile(0.5 * (1.0 + float(level)))
    y = math.log(point)
    s = (math.log(hi) - math.log(lo)) / (2.0 * z)
    up = math.log(hi) - y
    down = y - math.log(lo)
    notes = ()
    mean_half = 0.5 * (up + down)
    if abs(up - down) > 0.05 * mean_half:
        notes = (
            "asymmetric interval on the log scale: half-widths differ by "
            f"{100.0 * abs(up - down) / mean_half:.1f}%",
        )
    return StudyResult(
        label=label, estimate=y, std_err=s, sample_size=sample_size, notes=notes
    )


def validate_pair(pair: StudyPair) -> StudyPair | ValidationReport:
    """Check every structural rule; return the pair untouched when clean.

    A pair with violations (or ingestion warnings worth surfacing) comes
    back as a ValidationReport listing all of them.  Validating a pair
    that was returned by a previous call changes nothing.
    """
    violations: list[str] = []
    warnings: list[str] = []
    if not pair.pair_id:
        violations.append("pair_id must be non-empty")
    if pair.k < 2:
        violations.append("pair requires at least two studies")
    for i, s in enumerate(pair.studies):
        where = f"studies[{i}]" + (f" ({s.label})" if s.label else "")
        if not _finite(s.estimate):
            violations.append(f"{where}: estimate must be a finite real")
        if not _finite(s.std_err) or float(s.std_err) <= 0.0:
            violations.append(f"{where}: std_err must be positive")
        if s.sample_size is not None and (
            not isinstance(s.sample_size, int) or s.sample_size <= 0
        ):
            violations.append(f"{where}: sample_size must be a positive integer")
        for note in s.notes:
            warnings.append(f"{where}: {note}")
    if pair.measure not in MEASURES:
        if "|" in pair.measure:
            violations.append(f"mixed effect measures: {pair.measure}")
        else:
            violations.append(f"unknown effect measure: {pair.measure!r}")
    if pair.scale not in SCALES:
        if "|" in pair.scale:
            violations.append(f"mixed scales: {pair.scale}")
        else:
            violations.append(f"unknown scale: {pair.scale!r}")
    if pair.measure in LOG_MEASURES and pair.scale == "identity":
        violations.append(f"measure {pair.measure} must use the log scale")
    if pair.measure == "MD" and pair.scale == "log":
        violations.append("measure MD must use the identity scale")
    if violations or warnings:
        return ValidationReport(
            pair_id=pair.pair_id,
            violations=tuple(violations),
            warnings=tuple(warnings),
        )
    return pair


def require_pair(pair: StudyPair, k: int | None = None) -> StudyPair:
    """Validate for analysis use; raise ValidationError on any violation."""
    result = validate_pair(pair)
    if isinstance(result, ValidationReport) and not result.ok:
        raise ValidationError(
            f"pair {pair.pair_id!r}: " + "; ".join(result.violations)
        )
    if k is not None and pair.k != k:
        raise ValidationError(
            f"pair {pair.pair_id!r}: operation requires exactly {k} studies, got {pair.k}"
        )
    return pair


def require_corpus(corpus: TwinCorpus) -> TwinCorpus:
    """Validate every pair and the corpus-level uniqueness rule."""
    seen: set[str] = set()
    for pair in corpus.pairs:
        if pair.pair_id in seen:
            raise ValidationError(f"duplicate pair_id {pair.pair_id!r} in corpus")
        seen.add(pair.pair_id)
        require_pair(pair)
    if not corpus.pairs:
        raise ValidationError("corpus contains no pairs")
    return corpus


def back_transform(effect: PooledEffect) -> PooledEffect:
    """Exponentiate a log-scale pooled effect for display on the ratio scale."""
    if effect.back_transformed:
        return effect
    lo, hi = effect.interval
    return PooledEffect.build(
        math.exp(effect.estimate),
        math.exp(lo),
        math.exp(hi),
        method=effect.method,
        back_transformed=True,
    )
