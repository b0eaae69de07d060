"""Descriptive analysis of an observed corpus of study pairs.

Counts how often the four agreement indicators fire on real data,
cross-tabulates effect direction against per-study significance,
summarizes precision imbalance within pairs, and checks the corpus of
Q-test p-values against uniformity.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .events import EVENT_KINDS, event_threshold
from .freq import cochran_q, is_significant
from .model import TwinCorpus, require_corpus
from .statfn import ks_uniform

_CONCORDANCE_ROWS = ("same", "opposite")


@dataclass(frozen=True)
class CorpusSummary:
    """Corpus-level counts and ratios.

    `event_frequencies` are exact fractions of pairs on which each
    indicator fires; `concordance` maps direction agreement to counts
    by number of significant studies (none, one, both); ratios are
    max/min within each pair, summarized by median and max across
    pairs.  `size_ratio` is None when sample sizes are incomplete, with
    an explanatory note.
    """

    n_pairs: int
    event_frequencies: dict[str, float]
    concordance: dict[str, tuple[int, int, int]]
    size_ratio: dict[str, float] | None
    se_ratio: dict[str, float]
    q_pvalues: tuple[float, ...]
    notes: tuple[str, ...] = ()


def _indicator_fires(kind: str, pair) -> bool:
    y1, y2 = pair.estimates()
    s1, s2 = pair.std_errs()
    # observed-data analogue: the event holds when |y2 - y1| does not
    # exceed the threshold, so the tau-hat = 0 boundary counts as firing
    return abs(y2 - y1) <= event_threshold(kind, s1, s2)


def summarize_corpus(corpus) -> CorpusSummary:
    """Event frequencies, concordance table, and precision ratios.

    Indicators are evaluated from each pair's observed estimates and
    standard errors with 95% intervals and a 5% Q test; per-study
    significance means |y_i / s_i| above the two-sided 5% normal
    cutoff, and direction agreement compares the estimates' signs.
    """
    if not isinstance(corpus, TwinCorpus):
        corpus = TwinCorpus(pairs=tuple(corpus))
    require_corpus(corpus)
    for pair in corpus.pairs:
        if pair.k != 2:
            raise ValidationError(
                f"corpus summaries need exactly 2 studies per pair; "
                f"pair {pair.pair_id!r} has {pair.k}"
            )
    n = len(corpus.pairs)
    event_counts = {kind: 0 for kind in EVENT_KINDS}
    table = {row: [0, 0, 0] for row in _CONCORDANCE_ROWS}
    se_ratios = []
    size_ratios = []
    missing_sizes = []
    q_pvalues = []
    for pair in corpus.pairs:
        y1, y2 = pair.estimates()
        s1, s2 = pair.std_errs()
        for kind in EVENT_KINDS:
            if _indicator_fires(kind, pair):
                event_counts[kind] += 1
        n_sig = int(is_significant(y1, s1)) + int(is_significant(y2, s2))
        row = "same" if y1 * y2 >= 0.0 else "opposite"
        table[row][n_sig] += 1
        se_ratios.append(max(s1, s2) / min(s1, s2))
        sizes = [st.sample_size for st in pair.studies]
        if any(sz is None for sz in sizes):
            missing_sizes.append(pair.pair_id)
        else:
            size_ratios.append(max(sizes) / min(sizes))
        q_pvalues.append(cochran_q(pair).p_value)
    notes = []
    if missing_sizes:
        size_ratio = None
        notes.append(
            "size_ratio omitted: sample sizes missing for "
            + ", ".join(repr(p) for p in missing_sizes)
        )
    else:
        size_ratio = {
            "median": float(np.median(size_ratios)),
            "max": float(np.max(size_ratios)),
        }
    return CorpusSummary(
        n_pairs=n,
        event_frequencies={k: event_counts[k] / n for k in EVENT_KINDS},
        concordance={row: tuple(cells) for row, cells in table.items()},
        size_ratio=size_ratio,
        se_ratio={
            "median": float(np.median(se_ratios)),
            "max": float(np.max(se_ratios)),
        },
        q_pvalues=tuple(q_pvalues),
        notes=tuple(notes),
    )


def uniformity_diagnostics(p_values) -> dict[str, float]:
    """KS comparison of p-values against Uniform(0,1), plus the
    Beta(1, n) quantile of the smallest p-value.

    The smallest of n independent uniforms has CDF 1 - (1-p)^n; a
    small quantile flags that even the minimum p-value is unremarkable.
    Tied p-values only warn: exact ties have probability zero under the
    continuous model, so they usually indicate rounded inputs.
    """
    arr = np.asarray(list(p_values), dtype=np.float64)
    if arr.size == 0:
        raise DomainError("at least one p-value is required")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError("p-values must lie in [0, 1]")
    if np.unique(arr).size < arr.size:
        warnings.warn("tied p-values found; uniformity diagnostics assume "
                      "continuous inputs", stacklevel=2)
    ks_d, ks_p = ks_uniform(arr)
    min_p = float(np.min(arr))
    n = arr.size
    if min_p >= 1.0:
        quantile = 1.0
    else:
        quantile = -math.expm1(n * math.log1p(-min_p))
    return {
        "ks_d": ks_d,
        "ks_p": ks_p,
        "min_p": min_p,
        "min_p_quantile": quantile,
    }
