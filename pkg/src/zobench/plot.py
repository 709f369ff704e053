"""Dependency-free SVG convergence plots (log-scale optimality gap vs. iteration)."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

from .errors import ArgumentError
from .harness import LOG_FLOOR, mean_curve
from .trace import TraceRecord

WIDTH, HEIGHT = 760, 480
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 70, 170, 30, 50
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def render_svg(traces: dict[str, list[list[TraceRecord]]], title: str = "") -> str:
    """SVG text with one mean-over-seeds polyline per key of ``traces``, in order."""
    curves = {}
    for name, runs in traces.items():
        runs = [r for r in runs if r]
        if runs:
            curves[name] = mean_curve(runs)
    if not curves:
        raise ArgumentError("nothing to plot: no non-empty traces")

    logs = {name: [math.log10(max(float(g), LOG_FLOOR)) for g in gaps] for name, (_, gaps) in curves.items()}
    x_max = max(float(iters[-1]) for iters, _ in curves.values()) or 1.0
    y_lo = math.floor(min(min(v) for v in logs.values()))
    y_hi = math.ceil(max(max(v) for v in logs.values()))
    if y_hi == y_lo:
        y_lo -= 1
        y_hi += 1

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x):
        return MARGIN_LEFT + plot_w * x / x_max

    def sy(y):
        return MARGIN_TOP + plot_h * (y_hi - y) / (y_hi - y_lo)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{MARGIN_LEFT}" y="18" font-size="14">{escape(title)}</text>')
    step = max(1, math.ceil((y_hi - y_lo) / 10))
    for e in range(y_lo, y_hi + 1, step):
        y = _fmt(sy(e))
        out.append(f'<line x1="{MARGIN_LEFT}" y1="{y}" x2="{MARGIN_LEFT + plot_w}" y2="{y}" stroke="#ddd"/>')
        out.append(f'<text x="{MARGIN_LEFT - 6}" y="{y}" text-anchor="end" dominant-baseline="middle">1e{e}</text>')
    for i in range(6):
        xv = x_max * i / 5
        x = _fmt(sx(xv))
        out.append(f'<line x1="{x}" y1="{MARGIN_TOP + plot_h}" x2="{x}" y2="{MARGIN_TOP + plot_h + 4}" stroke="black"/>')
        out.append(f'<text x="{x}" y="{MARGIN_TOP + plot_h + 18}" text-anchor="middle">{xv:g}</text>')
    out.append(
        f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>'
    )
    out.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2}" y="{HEIGHT - 10}" text-anchor="middle">iteration</text>'
    )
    out.append(
        f'<text x="16" y="{MARGIN_TOP + plot_h / 2}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN_TOP + plot_h / 2})">optimality gap (log scale)</text>'
    )

    for idx, (name, (iters, _)) in enumerate(curves.items()):
        color = PALETTE[idx % len(PALETTE)]
        pts = " ".join(f"{_fmt(sx(float(x)))},{_fmt(sy(y))}" for x, y in zip(iters, logs[name]))
        out.append(f'<polyline class="curve" data-name="{escape(name)}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5" points="{pts}"/>')
        ly = MARGIN_TOP + 10 + 18 * idx
        lx = MARGIN_LEFT + plot_w + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text class="legend" x="{lx + 30}" y="{ly}" dominant-baseline="middle">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(traces: dict[str, list[list[TraceRecord]]], path, title: str = "") -> Path:
    """Write :func:`render_svg` output to ``path``."""
    path = Path(path)
    path.write_text(render_svg(traces, title), encoding="utf-8")
    return path
