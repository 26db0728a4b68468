"""Standalone SVG line plots with deterministic output bytes."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Dict, List, Sequence, Tuple
from xml.sax.saxutils import escape

from ..errors import InvalidInput

LOG_FLOOR = 1e-300
WIDTH, HEIGHT = 720, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 80, 170, 40, 60
COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"]
MAX_TICKS = 12

Series = Tuple[Sequence[float], Sequence[float]]


def trace_series(trace) -> Series:
    """(iteration, metric) pairs of a TraceRecord list."""
    return [r.iteration for r in trace], [r.metric for r in trace]


def _num(x: float) -> str:
    # fixed precision keeps the bytes stable
    return f"{x:.2f}"


def _label(x: float) -> str:
    if x == 0:
        return "0"
    if abs(x) >= 1e5 or abs(x) < 1e-3:
        return f"{x:.0e}"
    return f"{x:.6g}"


def nice_ticks(lo: float, hi: float, target: int = 6) -> List[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.floor(lo / step) * step
    ticks = []
    k = 0
    while True:
        t = first + k * step
        if t > hi + 1e-9 * step:
            break
        ticks.append(round(t, 12))
        k += 1
    return ticks


def decade_range(values: Sequence[float]) -> Tuple[int, int]:
    """Integer log10 bounds enclosing strictly positive ``values``."""
    lo = min(values)
    hi = max(values)
    d_lo = math.floor(math.log10(lo))
    d_hi = math.ceil(math.log10(hi))
    if d_hi == d_lo:
        d_hi += 1
    return d_lo, d_hi


def render_svg(
    series: Dict[str, Series],
    style: str = "linear",
    title: str = "",
    xlabel: str = "iteration",
    ylabel: str = "metric",
    markers: Dict[str, Tuple[float, float]] = None,
) -> str:
    if style not in ("linear", "log-y"):
        raise InvalidInput(f"unknown plot style {style!r}")
    named = [(name, list(map(float, xs)), list(map(float, ys))) for name, (xs, ys) in series.items()]
    named = [s for s in named if s[1]]
    if not named:
        raise InvalidInput("nothing to plot")

    clamped = False
    if style == "log-y":
        fixed = []
        for name, xs, ys in named:
            if any(y <= 0 for y in ys):
                clamped = True
            fixed.append((name, xs, [y if y > 0 else LOG_FLOOR for y in ys]))
        named = fixed

    markers = dict(markers or {})
    all_x = [x for _, xs, _ in named for x in xs] + [m[0] for m in markers.values()]
    all_y = [y for _, _, ys in named for y in ys]
    if style == "linear":
        all_y += [m[1] for m in markers.values()]
    x_lo, x_hi = min(all_x), max(all_x)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0

    if style == "log-y":
        d_lo, d_hi = decade_range(all_y)
        y_lo, y_hi = float(d_lo), float(d_hi)
        stride = max(1, math.ceil((d_hi - d_lo) / MAX_TICKS))
        y_ticks = [(float(d), f"1e{d}") for d in range(d_lo, d_hi + 1, stride)]

        def ymap(y):
            return math.log10(y)

    else:
        y_lo, y_hi = min(all_y), max(all_y)
        if y_hi == y_lo:
            y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
        ticks = nice_ticks(y_lo, y_hi)
        y_lo, y_hi = min(y_lo, ticks[0]), max(y_hi, ticks[-1])
        y_ticks = [(t, _label(t)) for t in ticks]

        def ymap(y):
            return y

    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(x):
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y):
        return MARGIN_T + ph - (ymap(y) - y_lo) / (y_hi - y_lo) * ph

    def py_raw(v):
        return MARGIN_T + ph - (v - y_lo) / (y_hi - y_lo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>')
    out.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>'
    )

    out.append('<g class="yticks">')
    for v, text in y_ticks:
        y = py_raw(v)
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{_num(y)}" x2="{MARGIN_L}" y2="{_num(y)}" stroke="black"/>')
        out.append(f'<line x1="{MARGIN_L}" y1="{_num(y)}" x2="{MARGIN_L + pw}" y2="{_num(y)}" stroke="#dddddd"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{_num(y + 4)}" text-anchor="end">{escape(text)}</text>')
    out.append("</g>")

    out.append('<g class="xticks">')
    for t in nice_ticks(x_lo, x_hi):
        if t < x_lo - 1e-12 or t > x_hi + 1e-12:
            continue
        x = px(t)
        yb = MARGIN_T + ph
        out.append(f'<line x1="{_num(x)}" y1="{yb}" x2="{_num(x)}" y2="{yb + 5}" stroke="black"/>')
        out.append(f'<text x="{_num(x)}" y="{yb + 18}" text-anchor="middle">{escape(_label(t))}</text>')
    out.append("</g>")

    out.append(
        f'<text x="{MARGIN_L + pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>'
    )
    ylab = ylabel if style == "linear" else f"{ylabel} (log scale)"
    out.append(
        f'<text x="18" y="{MARGIN_T + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN_T + ph / 2:.1f})">{escape(ylab)}</text>'
    )

    for k, (name, xs, ys) in enumerate(named):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{_num(px(x))},{_num(py(y))}" for x, y in zip(xs, ys))
        out.append(
            f'<polyline data-name="{escape(name)}" fill="none" stroke="{color}" '
            f'stroke-width="1.5" points="{pts}"/>'
        )

    for k, (name, (mx, my)) in enumerate(markers.items()):
        color = COLORS[(len(named) + k) % len(COLORS)]
        out.append(
            f'<circle data-name="{escape(name)}" cx="{_num(px(mx))}" cy="{_num(py(my))}" r="4" fill="{color}"/>'
        )

    lx = MARGIN_L + pw + 15
    out.append('<g class="legend">')
    entries = [name for name, _, _ in named] + list(markers)
    for k, name in enumerate(entries):
        color = COLORS[k % len(COLORS)]
        ly = MARGIN_T + 15 + 20 * k
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="3"/>')
        out.append(f'<text x="{lx + 32}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</g>")

    if clamped:
        out.append(
            f'<text x="{MARGIN_L + 5}" y="{MARGIN_T + ph - 6}" font-size="10" fill="#555555">'
            f"values &lt;= 0 drawn at {LOG_FLOOR:.0e}</text>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_plot(series: Dict[str, Series], style: str, path, **labels) -> Path:
    path = Path(path)
    path.write_text(render_svg(series, style, **labels), encoding="utf-8", newline="\n")
    return path
