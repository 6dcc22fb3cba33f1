"""Deterministic static SVG reports: VI curve plot and adjusted-p plot.

SVG elements are emitted directly (no plotting dependency) so identical
inputs always produce identical bytes.
"""

from __future__ import annotations

import numpy as np

from .errors import InputError

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 20, 30, 45
PLOT_W = WIDTH - MARGIN_L - MARGIN_R
PLOT_H = HEIGHT - MARGIN_T - MARGIN_B


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _x_px(x, x_min, x_max):
    span = (x_max - x_min) or 1.0
    return MARGIN_L + (x - x_min) / span * PLOT_W


def _y_px(y, y_min, y_max):
    span = (y_max - y_min) or 1.0
    return MARGIN_T + (1.0 - (y - y_min) / span) * PLOT_H


def _polyline(points, color, width=2, dash=None):
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (
        f'<polyline fill="none" stroke="{color}" stroke-width="{width}"'
        f'{dash_attr} points="{pts}" />'
    )


def _polygon(points, fill, opacity="0.25"):
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return f'<polygon fill="{fill}" fill-opacity="{opacity}" stroke="none" points="{pts}" />'


def _text(x, y, s, size=12, anchor="middle"):
    return (
        f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{size}" '
        f'font-family="sans-serif" text-anchor="{anchor}">{s}</text>'
    )


def _axes(x_min, x_max, y_min, y_max, x_label, y_label):
    parts = [
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{PLOT_W}" height="{PLOT_H}" '
        'fill="none" stroke="black" stroke-width="1" />'
    ]
    for i in range(6):
        xv = x_min + i * (x_max - x_min) / 5
        px = _x_px(xv, x_min, x_max)
        parts.append(_polyline([(px, MARGIN_T + PLOT_H), (px, MARGIN_T + PLOT_H + 5)], "black", 1))
        parts.append(_text(px, MARGIN_T + PLOT_H + 18, _fmt(xv), size=10))
        yv = y_min + i * (y_max - y_min) / 5
        py = _y_px(yv, y_min, y_max)
        parts.append(_polyline([(MARGIN_L - 5, py), (MARGIN_L, py)], "black", 1))
        parts.append(_text(MARGIN_L - 8, py + 3, _fmt(yv), size=10, anchor="end"))
    parts.append(_text(MARGIN_L + PLOT_W / 2, HEIGHT - 8, x_label))
    parts.append(
        f'<text x="14" y="{_fmt(MARGIN_T + PLOT_H / 2)}" font-size="12" '
        f'font-family="sans-serif" text-anchor="middle" '
        f'transform="rotate(-90 14 {_fmt(MARGIN_T + PLOT_H / 2)})">{y_label}</text>'
    )
    return parts


def _svg(parts):
    body = "\n".join(parts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">\n{body}\n</svg>\n'
    )


def curve_plot_svg(curves) -> str:
    """Level means of VIc and VIc_random with 5-95% replicate bands."""
    levels = np.asarray(curves.grid.levels)
    series = []
    for mat, color, label in (
        (curves.vic, "#1f77b4", "VIc"),
        (curves.vic_random, "#d62728", "VIc_random"),
    ):
        mean = np.nanmean(mat, axis=1)
        lo = np.nanpercentile(mat, 5, axis=1)
        hi = np.nanpercentile(mat, 95, axis=1)
        series.append((mean, lo, hi, color, label))
    y_max = max(float(np.nanmax(s[2])) for s in series) or 1.0
    y_min = 0.0
    parts = _axes(0.0, 1.0, y_min, y_max, "perturbation level p", "VI (nats)")
    for mean, lo, hi, color, label in series:
        band = [
            (_x_px(x, 0, 1), _y_px(v, y_min, y_max)) for x, v in zip(levels, lo)
        ] + [
            (_x_px(x, 0, 1), _y_px(v, y_min, y_max))
            for x, v in zip(levels[::-1], hi[::-1])
        ]
        parts.append(_polygon(band, color))
        line = [(_x_px(x, 0, 1), _y_px(v, y_min, y_max)) for x, v in zip(levels, mean)]
        parts.append(_polyline(line, color))
    parts.append(_polyline([(WIDTH - 170, 20), (WIDTH - 150, 20)], "#1f77b4"))
    parts.append(_text(WIDTH - 145, 24, "VIc", anchor="start"))
    parts.append(_polyline([(WIDTH - 100, 20), (WIDTH - 80, 20)], "#d62728"))
    parts.append(_text(WIDTH - 75, 24, "VIc_random", anchor="start"))
    return _svg(parts)


def pvalue_plot_svg(adjusted_p, levels) -> str:
    """Step plot of adjusted p per level; shading below 0.05 and 0.01."""
    adjusted = np.asarray(adjusted_p, dtype=float)
    levels = np.asarray(levels, dtype=float)
    if adjusted.size != levels.size:
        raise InputError("adjusted p-values and levels differ in length")
    parts = _axes(0.0, 1.0, 0.0, 1.0, "perturbation level p", "adjusted p-value")
    edges = np.concatenate([levels, [1.0]])
    for i, p_val in enumerate(adjusted):
        if p_val <= 0.01:
            fill, opacity = "#555555", "0.6"
        elif p_val <= 0.05:
            fill, opacity = "#bbbbbb", "0.6"
        else:
            continue
        x0 = _x_px(edges[i], 0, 1)
        x1 = _x_px(edges[i + 1], 0, 1)
        y0 = _y_px(0, 0, 1)
        y1 = _y_px(1, 0, 1)
        parts.append(
            _polygon([(x0, y0), (x1, y0), (x1, y1), (x0, y1)], fill, opacity)
        )
    steps = []
    for i, p_val in enumerate(adjusted):
        steps.append((_x_px(edges[i], 0, 1), _y_px(p_val, 0, 1)))
        steps.append((_x_px(edges[i + 1], 0, 1), _y_px(p_val, 0, 1)))
    parts.append(_polyline(steps, "black"))
    for thresh, color in ((0.05, "#d62728"), (0.01, "#8b0000")):
        y = _y_px(thresh, 0, 1)
        parts.append(
            _polyline([(MARGIN_L, y), (MARGIN_L + PLOT_W, y)], color, 1, dash="4 3")
        )
    return _svg(parts)
