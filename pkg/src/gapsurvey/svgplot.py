"""Self-contained SVG emission for the survey's log-log charts.

One chart type: dyadic sample counts on the x axis, gap minima and
distance-to-final estimates on the y axis (both log scale), plus an
optional fitted power-law as a dashed line. No external assets, no
plotting-library dependency, so output files are diffable text.
"""

from __future__ import annotations

import math

__all__ = ["Series", "write_loglog_svg"]

_W, _H = 640, 440
_ML, _MR, _MT, _MB = 72, 24, 36, 56  # margins
_COLORS = ("#1f77b4", "#333333", "#d62728")


class Series:
    """One plotted series: (x, y) pairs with y > 0, a label and a marker."""

    def __init__(self, label, points, marker="circle"):
        self.label = label
        self.points = [(float(x), float(y)) for x, y in points
                       if y > 0.0 and math.isfinite(y) and x > 0.0]
        if marker not in ("circle", "triangle"):
            raise ValueError(f"unknown marker {marker!r}")
        self.marker = marker


def _decades(lo, hi):
    return range(math.floor(math.log10(lo)), math.ceil(math.log10(hi)) + 1)


def _fmt_pow10(e):
    return f"1e{e:+03d}" if e not in range(-3, 4) else f"{10.0 ** e:g}"


def write_loglog_svg(path, series, fit=None, title=""):
    """Write the chart; ``fit`` is an optional (alpha, beta) pair drawn as
    alpha * x^(-beta) over the x range of the last series."""
    series = [s for s in series if s.points]
    if not series:
        raise ValueError("nothing to plot: no positive data points")
    xs = [x for s in series for x, _ in s.points]
    ys = [y for s in series for _, y in s.points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo / 2.0, x_hi * 2.0
    if y_lo == y_hi:
        y_lo, y_hi = y_lo / 2.0, y_hi * 2.0
    lx0, lx1 = math.log10(x_lo), math.log10(x_hi)
    ly0, ly1 = math.log10(y_lo), math.log10(y_hi)
    ly0 -= 0.05 * (ly1 - ly0) or 0.1
    ly1 += 0.05 * (ly1 - ly0) or 0.1

    def px(x):
        return _ML + (math.log10(x) - lx0) / (lx1 - lx0) * (_W - _ML - _MR)

    def py(y):
        return _H - _MB - (math.log10(y) - ly0) / (ly1 - ly0) * (_H - _MT - _MB)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="monospace" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="#ffffff"/>',
        f'<text x="{_ML}" y="20" font-size="14">{title}</text>',
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
        f'height="{_H - _MT - _MB}" fill="none" stroke="#000000"/>',
    ]
    for e in _decades(x_lo, x_hi):
        x = 10.0 ** e
        if x_lo <= x <= x_hi:
            out.append(f'<line x1="{px(x):.2f}" y1="{_MT}" x2="{px(x):.2f}" '
                       f'y2="{_H - _MB}" stroke="#dddddd"/>')
            out.append(f'<text x="{px(x):.2f}" y="{_H - _MB + 18}" '
                       f'text-anchor="middle">{_fmt_pow10(e)}</text>')
    for e in _decades(10.0 ** ly0, 10.0 ** ly1):
        y = 10.0 ** e
        if ly0 <= e <= ly1:
            out.append(f'<line x1="{_ML}" y1="{py(y):.2f}" x2="{_W - _MR}" '
                       f'y2="{py(y):.2f}" stroke="#dddddd"/>')
            out.append(f'<text x="{_ML - 6}" y="{py(y):.2f}" text-anchor="end" '
                       f'dominant-baseline="middle">{_fmt_pow10(e)}</text>')
    out.append(f'<text x="{(_ML + _W - _MR) / 2}" y="{_H - 12}" '
               f'text-anchor="middle">N</text>')

    if fit is not None:
        alpha, beta = fit
        steps = 64
        pts = []
        for i in range(steps + 1):
            x = 10.0 ** (lx0 + (lx1 - lx0) * i / steps)
            y = alpha * x ** (-beta)
            if 10.0 ** ly0 <= y <= 10.0 ** ly1:
                pts.append(f"{px(x):.2f},{py(y):.2f}")
        if len(pts) >= 2:
            out.append(f'<polyline points="{" ".join(pts)}" fill="none" '
                       f'stroke="{_COLORS[2]}" stroke-dasharray="6,4" '
                       f'stroke-width="1.5"/>')

    for si, s in enumerate(series):
        color = _COLORS[si % len(_COLORS)]
        for x, y in s.points:
            cx, cy = px(x), py(y)
            if s.marker == "circle":
                out.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="4" '
                           f'fill="none" stroke="{color}" stroke-width="1.5"/>')
            else:
                out.append(f'<path d="M {cx:.2f} {cy - 5:.2f} L {cx - 4.5:.2f} '
                           f'{cy + 4:.2f} L {cx + 4.5:.2f} {cy + 4:.2f} Z" '
                           f'fill="none" stroke="{color}" stroke-width="1.5"/>')

    ly = _MT + 16
    for si, s in enumerate(series):
        color = _COLORS[si % len(_COLORS)]
        out.append(f'<rect x="{_W - _MR - 170}" y="{ly - 10}" width="10" '
                   f'height="10" fill="{color}"/>')
        out.append(f'<text x="{_W - _MR - 154}" y="{ly}">{s.label}</text>')
        ly += 18
    if fit is not None:
        out.append(f'<rect x="{_W - _MR - 170}" y="{ly - 10}" width="10" '
                   f'height="10" fill="{_COLORS[2]}"/>')
        out.append(f'<text x="{_W - _MR - 154}" y="{ly}">fit</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
