"""Hand-rolled SVG 1.1 emission for forest plots and probability curves.

Fixed layout, few knobs: these figures are verification artifacts, not
publication graphics.  No third-party plotting dependency.
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

_FONT = 'font-family="Helvetica, Arial, sans-serif"'
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _nice_step(span: float, target: int) -> float:
    if span <= 0.0 or not math.isfinite(span):
        return 1.0
    raw = span / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            return mult * mag
    return 10.0 * mag


def _ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    step = _nice_step(hi - lo, target)
    first = math.ceil(lo / step - 1e-9) * step
    out = []
    t = first
    while t <= hi + 1e-9 * step:
        out.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return out


def _fmt(x: float) -> str:
    return f"{x:g}"


class _Canvas:
    def __init__(self, width: int, height: int, title: str):
        self.width = width
        self.height = height
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f"<title>{escape(title)}</title>",
            f'<rect width="{width}" height="{height}" fill="white"/>',
        ]

    def line(self, x1, y1, x2, y2, color="#333", width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{color}" stroke-width="{width}"{d}/>'
        )

    def rect(self, x, y, w, h, color):
        self.parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
            f'fill="{color}"/>'
        )

    def polygon(self, points, color):
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.parts.append(f'<polygon points="{pts}" fill="{color}"/>')

    def polyline(self, points, color, width=1.8):
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"/>'
        )

    def text(self, x, y, s, size=12, anchor="start", color="#111"):
        self.parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" {_FONT} font-size="{size}" '
            f'text-anchor="{anchor}" fill="{color}">{escape(s)}</text>'
        )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def forest_svg(
    title: str,
    studies: list[tuple[str, float, float, float, float]],
    pooled: list[tuple[str, float, float, float]],
    ref_x: float = 0.0,
    x_label: str = "effect",
) -> str:
    """Forest plot: one row per study (label, estimate, lo, hi, weight),
    then one diamond row per pooled result (label, estimate, lo, hi).

    Squares are scaled by relative weight; whiskers span the interval;
    a dashed reference line marks `ref_x` when it falls inside range.
    """
    left, right, top, bottom = 150.0, 180.0, 44.0, 52.0
    row_h = 28.0
    plot_w = 430.0
    rows = len(studies) + len(pooled)
    height = int(top + bottom + row_h * rows)
    width = int(left + plot_w + right)
    xs = [ref_x]
    for _, _, lo, hi, _ in studies:
        xs += [lo, hi]
    for _, _, lo, hi in pooled:
        xs += [lo, hi]
    x_lo, x_hi = min(xs), max(xs)
    pad = 0.06 * (x_hi - x_lo or 1.0)
    x_lo -= pad
    x_hi += pad

    def sx(v: float) -> float:
        return left + plot_w * (v - x_lo) / (x_hi - x_lo)

    cv = _Canvas(width, height, title)
    cv.text(left, 22, title, size=14)
    axis_y = top + row_h * rows + 8.0
    if x_lo < ref_x < x_hi:
        cv.line(sx(ref_x), top - 6, sx(ref_x), axis_y, color="#888",
                width=1.0, dash="4,3")
    w_max = max((w for *_, w in studies), default=1.0)
    y = top + 0.5 * row_h
    for label, est, lo, hi, w in studies:
        cv.text(left - 10, y + 4, label, anchor="end")
        cv.line(sx(lo), y, sx(hi), y, color="#333", width=1.2)
        half = 3.0 + 5.0 * math.sqrt(max(w, 0.0) / w_max)
        cv.rect(sx(est) - half, y - half, 2 * half, 2 * half, "#3b5b92")
        cv.text(left + plot_w + 12, y + 4,
                f"{est:.3g} [{lo:.3g}, {hi:.3g}]")
        y += row_h
    for label, est, lo, hi in pooled:
        cv.text(left - 10, y + 4, label, anchor="end")
        cv.polygon(
            [(sx(lo), y), (sx(est), y - 7.0), (sx(hi), y), (sx(est), y + 7.0)],
            "#7a1f1f",
        )
        cv.text(left + plot_w + 12, y + 4,
                f"{est:.3g} [{lo:.3g}, {hi:.3g}]")
        y += row_h
    cv.line(left, axis_y, left + plot_w, axis_y, color="#111", width=1.0)
    for t in _ticks(x_lo, x_hi):
        cv.line(sx(t), axis_y, sx(t), axis_y + 5, color="#111", width=1.0)
        cv.text(sx(t), axis_y + 18, _fmt(t), size=11, anchor="middle")
    cv.text(left + 0.5 * plot_w, axis_y + 36, x_label, size=12,
            anchor="middle")
    return cv.render()


def curves_svg(
    xs,
    curves: dict[str, list[float]],
    x_label: str,
    title: str,
) -> str:
    """Line chart of probabilities in [0, 1] against a shared x grid."""
    left, right, top, bottom = 62.0, 24.0, 42.0, 52.0
    plot_w, plot_h = 540.0, 330.0
    width = int(left + plot_w + right)
    height = int(top + plot_h + bottom)
    xs = [float(v) for v in xs]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0

    def px(v: float) -> float:
        return left + plot_w * (v - x_lo) / (x_hi - x_lo)

    def py(p: float) -> float:
        return top + plot_h * (1.0 - p)

    cv = _Canvas(width, height, title)
    cv.text(left, 24, title, size=14)
    for p in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
        cv.line(left, py(p), left + plot_w, py(p), color="#ddd", width=0.8)
        cv.text(left - 8, py(p) + 4, f"{p:.1f}", size=11, anchor="end")
    for t in _ticks(x_lo, x_hi, 6):
        cv.line(px(t), top + plot_h, px(t), top + plot_h + 5,
                color="#111", width=1.0)
        cv.text(px(t), top + plot_h + 18, _fmt(t), size=11, anchor="middle")
    cv.line(left, top, left, top + plot_h, color="#111", width=1.0)
    cv.line(left, top + plot_h, left + plot_w, top + plot_h,
            color="#111", width=1.0)
    legend_y = top + 14.0
    for i, (name, ys) in enumerate(curves.items()):
        color = _PALETTE[i % len(_PALETTE)]
        cv.polyline([(px(x), py(float(p))) for x, p in zip(xs, ys)], color)
        cv.line(left + plot_w - 150, legend_y - 4, left + plot_w - 126,
                legend_y - 4, color=color, width=2.2)
        cv.text(left + plot_w - 120, legend_y, name, size=11)
        legend_y += 16.0
    cv.text(left + 0.5 * plot_w, top + plot_h + 38, x_label, size=12,
            anchor="middle")
    mid_y = top + 0.5 * plot_h
    cv.parts.append(
        f'<text x="18" y="{mid_y:.2f}" {_FONT} font-size="12" '
        f'text-anchor="middle" fill="#111" '
        f'transform="rotate(-90 18 {mid_y:.2f})">probability</text>'
    )
    return cv.render()
