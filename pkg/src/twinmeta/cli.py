"""Batch command-line interface.

Subcommands cover the full analysis surface: `analyze` pools one pair
under several methods, `events` tabulates indicator probabilities,
`simulate` runs the Monte Carlo verifier, `corpus` summarizes many
pairs, and `forest` draws an SVG forest plot.

Artifacts are diff-able text: JSON reports (with a tool version, an
input checksum, and the full configuration echo needed to reproduce
them), CSV tables at full float precision, and SVG 1.1 figures.  Every
artifact is written atomically via a temp file and rename; when a
command fails partway, artifacts it already produced are removed.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile

from . import __version__
from ._svg import curves_svg, forest_svg
from .bayes import HalfNormalPrior, mu_posterior, tau_posterior
from .empirical import summarize_corpus, uniformity_diagnostics
from .errors import TwinMetaError, ValidationError
from .events import (
    CONVENTIONS,
    EVENT_KINDS,
    EventSpec,
    event_probability,
    event_threshold,
    i2_from_ratio,
)
from .freq import cochran_q, pooled_effect, tau_estimate_k2
from .model import (
    MEASURES,
    StudyPair,
    StudyResult,
    TwinCorpus,
    back_transform,
    from_ratio_ci,
    require_corpus,
)
from .sim import SimConfig, mc_event_probabilities
from .statfn import gaussian_quantile

_CSV_COLUMNS = (
    "pair_id", "study_label", "estimate", "se",
    "ci_lower", "ci_upper", "measure", "scale", "n",
)
# ratio-scale tags are log-transformed on ingestion
_RATIO_MEASURES = {"OR": "logOR", "RR": "logRR", "IRR": "logIRR", "HR": "logHR"}
_METHOD_TOKENS = {"fe": "FE", "re": "RE", "hksj": "HKSJ", "mkh": "mKH",
                  "bayes": "Bayes"}


def _cell(row: dict, key: str) -> str | None:
    value = row.get(key)
    if value is None:
        return None
    value = value.strip()
    return value or None


def _row_float(raw: str, line: int, column: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ValidationError(
            f"row {line}: column {column!r} is not a number: {raw!r}"
        ) from None


def ingest_csv(path, allow_k_gt_2: bool = False) -> TwinCorpus:
    """Load a corpus from CSV.

    Expected header columns: pair_id, study_label, estimate, se,
    ci_lower, ci_upper, measure, scale, n.  Each row needs exactly one
    of `se` or the `ci_lower`/`ci_upper` pair; intervals are read as
    two-sided 95% and converted to a standard error.  Measures OR, RR,
    IRR, and HR are ratio-scale inputs: their point and interval are
    log-transformed on ingestion (such rows must supply the interval,
    since a bare `se` on the ratio scale has no single meaning).  A
    blank measure defaults to MD.  Rows sharing a pair_id become one
    StudyPair, in file order; every pair must contain exactly two
    studies unless `allow_k_gt_2`.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ValidationError(f"{path}: empty file, header required")
        missing = [c for c in _CSV_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise ValidationError(
                f"{path}: header is missing columns: " + ", ".join(missing)
            )
        groups: dict[str, list[StudyResult]] = {}
        group_tags: dict[str, tuple[str, str]] = {}
        for row in reader:
            line = reader.line_num
            pair_id = _cell(row, "pair_id")
            if pair_id is None:
                raise ValidationError(f"row {line}: pair_id must be non-empty")
            raw_measure = _cell(row, "measure") or "MD"
            se = _cell(row, "se")
            lo = _cell(row, "ci_lower")
            hi = _cell(row, "ci_upper")
            est = _cell(row, "estimate")
            if est is None:
                raise ValidationError(f"row {line}: estimate is required")
            if se is not None and (lo is not None or hi is not None):
                raise ValidationError(
                    f"row {line}: supply either se or ci_lower/ci_upper, not both"
                )
            if se is None and (lo is None) != (hi is None):
                raise ValidationError(
                    f"row {line}: ci_lower and ci_upper must come together"
                )
            if se is None and lo is None:
                raise ValidationError(
                    f"row {line}: one of se or ci_lower/ci_upper is required"
                )
            label = _cell(row, "study_label") or f"study-{line}"
            n_raw = _cell(row, "n")
            if n_raw is None:
                n = None
            else:
                try:
                    n = int(n_raw)
                except ValueError:
                    raise ValidationError(
                        f"row {line}: column 'n' is not an integer: {n_raw!r}"
                    ) from None
            estimate = _row_float(est, line, "estimate")
            if raw_measure in _RATIO_MEASURES:
                measure = _RATIO_MEASURES[raw_measure]
                scale = "log"
                if se is not None:
                    raise ValidationError(
                        f"row {line}: ratio measure {raw_measure} needs "
                        "ci_lower/ci_upper on the ratio scale; use measure="
                        f"{measure} to pass a log-scale se directly"
                    )
                try:
                    study = from_ratio_ci(
                        estimate,
                        _row_float(lo, line, "ci_lower"),
                        _row_float(hi, line, "ci_upper"),
                        label=label,
                        sample_size=n,
                    )
                except ValidationError as exc:
                    raise ValidationError(f"row {line}: {exc}") from None
            elif raw_measure in MEASURES:
                measure = raw_measure
                scale = "identity" if measure == "MD" else "log"
                if se is not None:
                    std_err = _row_float(se, line, "se")
                else:
                    lo_v = _row_float(lo, line, "ci_lower")
                    hi_v = _row_float(hi, line, "ci_upper")
                    if not lo_v < estimate < hi_v:
                        raise ValidationError(
                            f"row {line}: estimate must lie strictly inside "
                            "its interval"
                        )
                    z = gaussian_quantile(0.975)
                    std_err = (hi_v - lo_v) / (2.0 * z)
                study = StudyResult(
                    label=label, estimate=estimate, std_err=std_err,
                    sample_size=n,
                )
            else:
                raise ValidationError(
                    f"row {line}: unknown measure tag {raw_measure!r}; "
                    f"expected MD, one of {'/'.join(_RATIO_MEASURES)}, or "
                    f"one of {'/'.join(m for m in MEASURES if m != 'MD')}"
                )
            declared_scale = _cell(row, "scale")
            if declared_scale is not None and declared_scale != scale:
                raise ValidationError(
                    f"row {line}: scale {declared_scale!r} contradicts "
                    f"measure {raw_measure!r} (analysis scale {scale!r})"
                )
            tags = (measure, scale)
            if pair_id in groups:
                if group_tags[pair_id] != tags:
                    raise ValidationError(
                        f"row {line}: pair {pair_id!r} mixes measures "
                        f"{group_tags[pair_id][0]} and {measure}"
                    )
                groups[pair_id].append(study)
            else:
                groups[pair_id] = [study]
                group_tags[pair_id] = tags
    pairs = []
    for pair_id, studies in groups.items():
        if len(studies) != 2 and not allow_k_gt_2:
            raise ValidationError(
                f"pair {pair_id!r} has {len(studies)} studies, expected 2 "
                "(pass --allow-k-gt-2 for larger groups)"
            )
        if len(studies) < 2:
            raise ValidationError(
                f"pair {pair_id!r} has a single study; pairs need at least 2"
            )
        measure, scale = group_tags[pair_id]
        pairs.append(StudyPair(
            pair_id=pair_id, studies=tuple(studies),
            measure=measure, scale=scale,
        ))
    return require_corpus(
        TwinCorpus(pairs=tuple(pairs), provenance=os.fspath(path))
    )


class _Artifacts:
    """Atomic text outputs with all-or-nothing cleanup per command."""

    def __init__(self):
        self.written: list[str] = []

    def write_text(self, path, text: str) -> None:
        path = os.fspath(path)
        directory = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(
            dir=directory, prefix=".twinmeta-", suffix=".part"
        )
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise
        self.written.append(path)

    def discard_all(self) -> None:
        for path in self.written:
            try:
                os.unlink(path)
            except OSError:
                pass
        self.written.clear()


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([
            repr(v) if isinstance(v, float) else v for v in row
        ])
    return buf.getvalue()


def _find_pair(corpus: TwinCorpus, pair_id: str) -> StudyPair:
    for pair in corpus.pairs:
        if pair.pair_id == pair_id:
            return pair
    known = ", ".join(repr(p.pair_id) for p in corpus.pairs)
    raise ValidationError(f"pair {pair_id!r} not found; input has {known}")


def _parse_methods(raw: str) -> list[str]:
    methods = []
    for token in raw.split(","):
        token = token.strip().lower()
        if not token:
            continue
        if token not in _METHOD_TOKENS:
            raise ValidationError(
                f"unknown method {token!r}; expected a comma list from "
                + ", ".join(sorted(_METHOD_TOKENS))
            )
        name = _METHOD_TOKENS[token]
        if name not in methods:
            methods.append(name)
    if not methods:
        raise ValidationError("at least one method is required")
    return methods


def _parse_scales(raw: str | None) -> list[float]:
    if raw is None:
        return []
    scales = []
    for token in raw.split(","):
        token = token.strip()
        if not token:
            continue
        value = float(token)
        if value <= 0.0:
            raise ValidationError(
                f"half-normal scale must be positive, got {token!r}"
            )
        scales.append(value)
    return scales


def _interval_json(interval) -> list[float]:
    return [float(interval[0]), float(interval[1])]


def _effect_json(effect, pair_scale: str) -> dict:
    if pair_scale != "log":
        return {
            "method": effect.method,
            "scale": "identity",
            "estimate": effect.estimate,
            "interval": _interval_json(effect.interval),
            "width": effect.width,
        }
    if effect.back_transformed:
        ratio, log_est = effect, math.log(effect.estimate)
        log_lo, log_hi = (math.log(v) for v in effect.interval)
    else:
        ratio = back_transform(effect)
        log_est = effect.estimate
        log_lo, log_hi = effect.interval
    return {
        "method": effect.method,
        "scale": "log",
        "estimate": log_est,
        "interval": [log_lo, log_hi],
        "width": log_hi - log_lo,
        "ratio": {
            "estimate": ratio.estimate,
            "interval": _interval_json(ratio.interval),
            "width": ratio.width,
        },
    }


def _heterogeneity_json(result, **extra) -> dict:
    payload = {
        "tau_hat": result.tau_hat,
        "interval": _interval_json(result.interval),
        "level": result.level,
        "method": result.method,
        "upper_unbounded": result.upper_unbounded,
    }
    payload.update(extra)
    return payload


def _pair_json(pair: StudyPair) -> dict:
    return {
        "pair_id": pair.pair_id,
        "measure": pair.measure,
        "scale": pair.scale,
        "studies": [
            {
                "label": s.label,
                "estimate": s.estimate,
                "std_err": s.std_err,
                "sample_size": s.sample_size,
                "notes": list(s.notes),
            }
            for s in pair.studies
        ],
    }


def _report_envelope(args, input_path) -> dict:
    return {
        "tool": "twinmeta",
        "version": __version__,
        "input": {
            "path": os.fspath(input_path),
            "sha256": _sha256(input_path),
        },
    }


def _tau_freq_for(pair: StudyPair, level: float):
    if pair.k == 2:
        return tau_estimate_k2(pair, level=level)
    from .multipair import common_tau_freq

    joint = common_tau_freq(TwinCorpus(pairs=(pair,)), level=level)
    from .model import HeterogeneityResult

    return HeterogeneityResult(
        tau_hat=joint.tau_hat, interval=joint.interval, level=level,
        method="PM-joint", upper_unbounded=joint.upper_unbounded,
    )


def cmd_analyze(args, artifacts: _Artifacts) -> None:
    corpus = ingest_csv(args.input, allow_k_gt_2=args.allow_k_gt_2)
    pair = _find_pair(corpus, args.pair_id)
    methods = _parse_methods(args.methods)
    scales = _parse_scales(args.hn_scale)
    if "Bayes" in methods and not scales:
        raise ValidationError("--methods bayes requires --hn-scale")
    q = cochran_q(pair)
    effects = []
    heterogeneity = [_heterogeneity_json(_tau_freq_for(pair, args.level))]
    for method in methods:
        if method == "Bayes":
            for scale in scales:
                prior = HalfNormalPrior(scale)
                het, _ = tau_posterior(
                    pair, prior, level=args.level, interval=args.interval
                )
                heterogeneity.append(
                    _heterogeneity_json(het, prior_scale=scale)
                )
                effect, _ = mu_posterior(
                    pair, prior, level=args.level, interval=args.interval
                )
                entry = _effect_json(effect, pair.scale)
                entry["prior_scale"] = scale
                effects.append(entry)
        else:
            effects.append(_effect_json(
                pooled_effect(pair, method=method, level=args.level),
                pair.scale,
            ))
    report = _report_envelope(args, args.input)
    report.update({
        "config": {
            "command": "analyze",
            "pair_id": args.pair_id,
            "methods": args.methods,
            "hn_scale": args.hn_scale,
            "level": args.level,
            "interval": args.interval,
            "allow_k_gt_2": args.allow_k_gt_2,
        },
        "pair": _pair_json(pair),
        "q_test": {"Q": q.Q, "df": q.df, "p_value": q.p_value},
        "heterogeneity": heterogeneity,
        "effects": effects,
    })
    artifacts.write_text(args.out, _json_text(report))
    print(f"wrote {args.out}")


def _parse_ratio_grid(raw: str) -> list[float]:
    parts = raw.split(":")
    if len(parts) != 3:
        raise ValidationError(
            f"--ratio-grid must look like lo:hi:step, got {raw!r}"
        )
    lo, hi, step = (float(p) for p in parts)
    if step <= 0.0 or hi < lo or lo < 0.0:
        raise ValidationError(
            f"--ratio-grid needs 0 <= lo <= hi and step > 0, got {raw!r}"
        )
    count = int(round((hi - lo) / step)) + 1
    grid = [lo + i * step for i in range(count)]
    if grid[-1] > hi + 1e-9 * step:
        grid.pop()
    return grid


def cmd_events(args, artifacts: _Artifacts) -> None:
    grid_mode = args.ratio_grid is not None
    sigma_mode = args.sigma1 is not None or args.sigma2 is not None
    if grid_mode == sigma_mode:
        raise ValidationError(
            "choose one mode: --ratio-grid, or --sigma1/--sigma2 [--tau]"
        )
    if grid_mode:
        ratios = _parse_ratio_grid(args.ratio_grid)
        header = ["tau_over_sigma", "i_squared", *EVENT_KINDS]
        rows = []
        curve_values: dict[str, list[float]] = {k: [] for k in EVENT_KINDS}
        for r in ratios:
            row: list = [float(r), float(i2_from_ratio(r))]
            for kind in EVENT_KINDS:
                spec = EventSpec(kind, alpha=args.alpha,
                                 ci_level=args.ci_level)
                p = float(event_probability(
                    spec, 1.0, 1.0, r, convention=args.convention,
                ))
                row.append(p)
                curve_values[kind].append(p)
            rows.append(row)
        artifacts.write_text(args.csv, _csv_text(header, rows))
        print(f"wrote {args.csv}")
        if args.svg is not None:
            fig = curves_svg(
                ratios, curve_values, "tau / sigma",
                f"event probabilities ({args.convention})",
            )
            artifacts.write_text(args.svg, fig)
            print(f"wrote {args.svg}")
        return
    if args.sigma1 is None or args.sigma2 is None:
        raise ValidationError("--sigma1 and --sigma2 must come together")
    if args.svg is not None:
        raise ValidationError("--svg needs --ratio-grid mode")
    header = ["event", "threshold", "probability"]
    rows = []
    for kind in EVENT_KINDS:
        spec = EventSpec(kind, alpha=args.alpha, ci_level=args.ci_level)
        rows.append([
            kind,
            float(event_threshold(
                kind, args.sigma1, args.sigma2,
                alpha=args.alpha, ci_level=args.ci_level,
            )),
            float(event_probability(
                spec, args.sigma1, args.sigma2, args.tau,
                convention=args.convention,
            )),
        ])
    artifacts.write_text(args.csv, _csv_text(header, rows))
    print(f"wrote {args.csv}")


def cmd_simulate(args, artifacts: _Artifacts) -> None:
    kinds = []
    for token in (args.event or ",".join(EVENT_KINDS)).split(","):
        token = token.strip()
        if token:
            kinds.append(token)
    config = SimConfig(
        mu=args.mu, tau=args.tau, sigma1=args.sigma1, sigma2=args.sigma2,
        reps=args.reps, seed=args.seed,
    )
    results = mc_event_probabilities(config, kinds)
    header = ["event", "reps", "mc_estimate", "mc_std_err",
              "analytic", "convention", "z"]
    rows = []
    for kind in kinds:
        est = results[kind]["estimate"]
        se = results[kind]["mc_std_err"]
        analytic = float(event_probability(
            kind, args.sigma1, args.sigma2, args.tau,
            convention=args.convention,
        ))
        if se > 0.0:
            z = (est - analytic) / se
        else:
            z = 0.0 if est == analytic else math.inf
        rows.append([kind, args.reps, est, se, analytic,
                     args.convention, z])
        print(f"{kind}: {est:.6f} +/- {se:.6f} "
              f"(analytic {analytic:.6f}, z = {z:+.2f})")
    artifacts.write_text(args.csv, _csv_text(header, rows))
    print(f"wrote {args.csv}")


def cmd_corpus(args, artifacts: _Artifacts) -> None:
    corpus = ingest_csv(args.input, allow_k_gt_2=args.allow_k_gt_2)
    summary = summarize_corpus(corpus)
    diagnostics = uniformity_diagnostics(summary.q_pvalues)
    report = _report_envelope(args, args.input)
    report.update({
        "config": {
            "command": "corpus",
            "allow_k_gt_2": args.allow_k_gt_2,
        },
        "n_pairs": summary.n_pairs,
        "event_frequencies": summary.event_frequencies,
        "concordance": {
            row: list(cells) for row, cells in summary.concordance.items()
        },
        "size_ratio": summary.size_ratio,
        "se_ratio": summary.se_ratio,
        "q_pvalues": list(summary.q_pvalues),
        "uniformity": diagnostics,
        "notes": list(summary.notes),
    })
    artifacts.write_text(args.out, _json_text(report))
    print(f"wrote {args.out}")
    if args.csv is not None:
        header = ["pair_id", "y1", "s1", "y2", "s2", "q", "q_p_value",
                  "tau_hat", *EVENT_KINDS]
        rows = []
        for pair in corpus.pairs:
            (y1, y2), (s1, s2) = pair.estimates(), pair.std_errs()
            q = cochran_q(pair)
            row: list = [
                pair.pair_id, y1, s1, y2, s2, q.Q, q.p_value,
                tau_estimate_k2(pair).tau_hat,
            ]
            for kind in EVENT_KINDS:
                fires = abs(y2 - y1) <= event_threshold(kind, s1, s2)
                row.append(int(fires))
            rows.append(row)
        artifacts.write_text(args.csv, _csv_text(header, rows))
        print(f"wrote {args.csv}")


def cmd_forest(args, artifacts: _Artifacts) -> None:
    corpus = ingest_csv(args.input, allow_k_gt_2=args.allow_k_gt_2)
    pair = _find_pair(corpus, args.pair_id)
    methods = _parse_methods(args.methods)
    scales = _parse_scales(args.hn_scale)
    if "Bayes" in methods and not scales:
        raise ValidationError("--methods bayes requires --hn-scale")
    z = gaussian_quantile(0.5 * (1.0 + args.level))
    studies = []
    for s in pair.studies:
        weight = 1.0 / (s.std_err * s.std_err)
        studies.append((
            s.label, s.estimate,
            s.estimate - z * s.std_err, s.estimate + z * s.std_err,
            weight,
        ))
    pooled = []
    for method in methods:
        if method == "Bayes":
            for scale in scales:
                effect, gp = mu_posterior(
                    pair, HalfNormalPrior(scale), level=args.level,
                    interval=args.interval,
                )
                if pair.scale == "log":
                    est = math.log(effect.estimate)
                    lo, hi = (math.log(v) for v in effect.interval)
                else:
                    est, (lo, hi) = effect.estimate, effect.interval
                pooled.append((f"Bayes HN({scale:g})", est, lo, hi))
        else:
            effect = pooled_effect(pair, method=method, level=args.level)
            pooled.append((
                method, effect.estimate,
                effect.interval[0], effect.interval[1],
            ))
    x_label = pair.measure if pair.scale == "identity" else f"log {pair.measure[3:]}"
    fig = forest_svg(
        f"pair {pair.pair_id}", studies, pooled, ref_x=0.0, x_label=x_label,
    )
    artifacts.write_text(args.svg, fig)
    print(f"wrote {args.svg}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twinmeta",
        description="meta-analysis of study twins: pooling, heterogeneity, "
                    "event probabilities, Monte Carlo checks, and plots",
    )
    parser.add_argument("--version", action="version",
                        version=f"twinmeta {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input(p):
        p.add_argument("--input", required=True, help="corpus CSV path")
        p.add_argument("--allow-k-gt-2", action="store_true",
                       help="accept pairs with more than two studies")

    p = sub.add_parser("analyze", help="pool one pair under several methods")
    add_input(p)
    p.add_argument("--pair-id", required=True)
    p.add_argument("--methods", default="fe,re,hksj,mkh",
                   help="comma list: fe,re,hksj,mkh,bayes")
    p.add_argument("--hn-scale", default=None,
                   help="half-normal prior scale(s), comma separated")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--interval", choices=("shortest", "central"),
                   default="shortest", help="credible interval style")
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("events", help="indicator probability tables")
    p.add_argument("--sigma1", type=float, default=None)
    p.add_argument("--sigma2", type=float, default=None)
    p.add_argument("--tau", type=float, default=0.0)
    p.add_argument("--ratio-grid", default=None,
                   help="tau/sigma grid as lo:hi:step (equal unit sigmas)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--ci-level", type=float, default=0.95)
    p.add_argument("--convention", choices=CONVENTIONS, default="2tau2")
    p.add_argument("--csv", required=True, help="output CSV path")
    p.add_argument("--svg", default=None, help="probability-curve figure")
    p.set_defaults(func=cmd_events)

    p = sub.add_parser("simulate", help="Monte Carlo verification table")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--sigma1", type=float, default=1.0)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--event", default=None,
                   help="comma list of events (default: all four)")
    p.add_argument("--convention", choices=CONVENTIONS, default="2tau2")
    p.add_argument("--csv", required=True, help="output CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("corpus", help="summarize a corpus of pairs")
    add_input(p)
    p.add_argument("--out", required=True, help="summary JSON path")
    p.add_argument("--csv", default=None,
                   help="optional per-pair detail table")
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("forest", help="SVG forest plot for one pair")
    add_input(p)
    p.add_argument("--pair-id", required=True)
    p.add_argument("--methods", default="fe,re",
                   help="pooled diamonds to draw")
    p.add_argument("--hn-scale", default=None,
                   help="half-normal prior scale(s) for bayes diamonds")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--interval", choices=("shortest", "central"),
                   default="shortest")
    p.add_argument("--svg", required=True, help="output SVG path")
    p.set_defaults(func=cmd_forest)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    artifacts = _Artifacts()
    try:
        args.func(args, artifacts)
    except (TwinMetaError, OSError, ValueError) as exc:
        artifacts.discard_all()
        message = " ".join(str(exc).split()) or exc.__class__.__name__
        print(f"error: {message}", file=sys.stderr)
        return 1
    return 0
