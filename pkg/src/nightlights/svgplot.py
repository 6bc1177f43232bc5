"""Minimal deterministic SVG scatter plot with a fitted line.

No plotting library: the output must be byte-identical across runs, and a
scatter with axes is small enough to write by hand.  Fixed 800x600 viewport.
"""

from __future__ import annotations

import math

WIDTH, HEIGHT = 800, 600
_ML, _MR, _MT, _MB = 80, 30, 50, 60  # margins: left, right, top, bottom


def _ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi]."""
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def scatter_svg(
    xs,
    ys,
    slope: float,
    intercept: float,
    xlabel: str = "x",
    ylabel: str = "y",
    title: str = "",
) -> str:
    xs = [float(v) for v in xs]
    ys = [float(v) for v in ys]
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    line_ends = [intercept + slope * xmin, intercept + slope * xmax]
    ymin = min(ymin, *line_ends)
    ymax = max(ymax, *line_ends)
    # degenerate spans still need a drawable box
    xpad = (xmax - xmin) * 0.05 or max(abs(xmin), 1.0) * 0.05
    ypad = (ymax - ymin) * 0.05 or max(abs(ymin), 1.0) * 0.05
    xmin, xmax = xmin - xpad, xmax + xpad
    ymin, ymax = ymin - ypad, ymax + ypad

    def px(x: float) -> float:
        return _ML + (x - xmin) / (xmax - xmin) * (WIDTH - _ML - _MR)

    def py(y: float) -> float:
        return HEIGHT - _MB - (y - ymin) / (ymax - ymin) * (HEIGHT - _MT - _MB)

    e = []
    e.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    e.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    if title:
        e.append(
            f'<text x="{WIDTH / 2:.1f}" y="28" font-family="sans-serif" font-size="16" '
            f'text-anchor="middle">{title}</text>'
        )
    # axes
    e.append(
        f'<line x1="{_ML}" y1="{HEIGHT - _MB}" x2="{WIDTH - _MR}" y2="{HEIGHT - _MB}" '
        f'stroke="black"/>'
    )
    e.append(f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{HEIGHT - _MB}" stroke="black"/>')
    for t in _ticks(xmin, xmax):
        x = px(t)
        e.append(
            f'<line x1="{x:.2f}" y1="{HEIGHT - _MB}" x2="{x:.2f}" y2="{HEIGHT - _MB + 5}" '
            f'stroke="black"/>'
        )
        e.append(
            f'<text x="{x:.2f}" y="{HEIGHT - _MB + 20}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{t:.6g}</text>'
        )
    for t in _ticks(ymin, ymax):
        y = py(t)
        e.append(f'<line x1="{_ML - 5}" y1="{y:.2f}" x2="{_ML}" y2="{y:.2f}" stroke="black"/>')
        e.append(
            f'<text x="{_ML - 8}" y="{y + 4:.2f}" font-family="sans-serif" font-size="11" '
            f'text-anchor="end">{t:.6g}</text>'
        )
    e.append(
        f'<text x="{(_ML + WIDTH - _MR) / 2:.1f}" y="{HEIGHT - 15}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle">{xlabel}</text>'
    )
    e.append(
        f'<text x="20" y="{(_MT + HEIGHT - _MB) / 2:.1f}" font-family="sans-serif" '
        f'font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 20 {(_MT + HEIGHT - _MB) / 2:.1f})">{ylabel}</text>'
    )
    # fitted line, then points on top
    e.append(
        f'<line x1="{px(xmin):.2f}" y1="{py(intercept + slope * xmin):.2f}" '
        f'x2="{px(xmax):.2f}" y2="{py(intercept + slope * xmax):.2f}" '
        f'stroke="#d62728" stroke-width="1.5"/>'
    )
    for x, y in zip(xs, ys):
        e.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="4" fill="#1f77b4"/>')
    e.append("</svg>")
    return "\n".join(e) + "\n"
