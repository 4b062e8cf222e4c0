"""Minimal deterministic SVG line charts (no plotting library)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape

PALETTE = [
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#ff7f0e",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#17becf",
    "#7f7f7f",
    "#bcbd22",
]

WIDTH, HEIGHT = 720, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 170, 40, 50


@dataclass
class Line:
    label: str
    xs: Sequence[float]
    ys: Sequence[float]
    color: str | None = None
    dashed: bool = False
    steps: bool = False


@dataclass
class Chart:
    title: str
    xlabel: str
    ylabel: str
    lines: list[Line] = field(default_factory=list)
    bands: list[tuple[float, float]] = field(default_factory=list)
    hline: float | None = None


def _f(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _tick_label(v: float) -> str:
    return str(int(round(v))) if abs(v - round(v)) < 1e-9 else f"{v:.3g}"


def render(chart: Chart) -> str:
    xs = [float(x) for ln in chart.lines for x in ln.xs]
    ys = [float(y) for ln in chart.lines for y in ln.ys]
    if chart.hline is not None:
        ys.append(float(chart.hline))
    if not xs:
        raise ValueError("chart has no data")
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys + [0.0]), max(ys)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (float(x) - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + ph - (float(y) - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2 - RIGHT / 2:.0f}" y="22" text-anchor="middle" font-size="14">'
        f"{escape(chart.title)}</text>",
    ]
    for a, b in chart.bands:
        out.append(
            f'<rect class="shaded" x="{_f(px(a))}" y="{TOP}" width="{_f(px(b) - px(a))}" '
            f'height="{ph}" fill="#999999" fill-opacity="0.25"/>'
        )
    for v in _ticks(y0, y1):
        y = _f(py(v))
        out.append(f'<line x1="{LEFT}" y1="{y}" x2="{LEFT + pw}" y2="{y}" stroke="#eeeeee"/>')
        out.append(f'<text x="{LEFT - 6}" y="{y}" text-anchor="end" dy="4">{_tick_label(v)}</text>')
    for v in _ticks(x0, x1):
        x = _f(px(v))
        out.append(
            f'<text x="{x}" y="{TOP + ph + 16}" text-anchor="middle">{_tick_label(v)}</text>'
        )
    out.append(
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>'
    )
    out.append(
        f'<text x="{LEFT + pw / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle">'
        f"{escape(chart.xlabel)}</text>"
    )
    out.append(
        f'<text x="16" y="{TOP + ph / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {TOP + ph / 2:.0f})">{escape(chart.ylabel)}</text>'
    )
    if chart.hline is not None:
        y = _f(py(chart.hline))
        out.append(
            f'<line x1="{LEFT}" y1="{y}" x2="{LEFT + pw}" y2="{y}" stroke="black" '
            f'stroke-dasharray="2,3"/>'
        )

    for i, ln in enumerate(chart.lines):
        color = ln.color or PALETTE[i % len(PALETTE)]
        pts = []
        prev_y = None
        for x, y in zip(ln.xs, ln.ys):
            if ln.steps and prev_y is not None:
                pts.append(f"{_f(px(x))},{_f(py(prev_y))}")
            pts.append(f"{_f(px(x))},{_f(py(y))}")
            prev_y = y
        dash = ' stroke-dasharray="6,4"' if ln.dashed else ""
        out.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} '
            f'points="{" ".join(pts)}"><title>{escape(ln.label)}</title></polyline>'
        )
        ly = TOP + 10 + 16 * i
        lx = LEFT + pw + 12
        out.append(
            f'<line x1="{lx}" y1="{ly}" x2="{lx + 22}" y2="{ly}" stroke="{color}" '
            f'stroke-width="1.5"{dash}/>'
        )
        out.append(f'<text x="{lx + 28}" y="{ly + 4}">{escape(ln.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
