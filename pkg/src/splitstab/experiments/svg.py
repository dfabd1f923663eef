"""Minimal deterministic SVG line plots read from CSV files."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

WIDTH = 640
HEIGHT = 400
MARGIN = (70, 20, 40, 50)  # left, right, top, bottom
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
LOG_FLOOR = 1e-300


class PlotError(ValueError):
    pass


@dataclass(frozen=True)
class PlotSpec:
    x: str
    y: tuple[str, ...]
    title: str = ""
    logx: bool = False
    logy: bool = False
    labels: tuple[str, ...] = field(default_factory=tuple)


def read_csv(path: str | Path) -> dict[str, list[float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0]:
        raise PlotError(f"{path}: empty CSV")
    header = rows[0]
    body = [r for r in rows[1:] if r]
    if not body:
        raise PlotError(f"{path}: CSV has a header but no data")
    cols = {name: [] for name in header}
    for r in body:
        for name, val in zip(header, r):
            cols[name].append(float(val))
    return cols


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, log: bool) -> list[float]:
    if log:
        a, b = math.floor(lo), math.ceil(hi)
        step = max(1, (b - a) // 6)
        return [float(k) for k in range(a, b + 1, step)]
    if hi == lo:
        return [lo]
    raw = (hi - lo) / 5
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-12 * step:
        out.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return out


def plot_lines(csv_path: str | Path, spec: PlotSpec, out_path: str | Path | None = None) -> Path:
    """Render the ``spec.y`` columns against ``spec.x`` as polylines.

    With a log axis, values <= 0 are clipped at 1e-300 and the plot carries a
    note saying so. Identical input gives a byte-identical file.
    """
    cols = read_csv(csv_path)
    missing = [c for c in (spec.x, *spec.y) if c not in cols]
    if missing:
        raise PlotError(f"{csv_path}: missing columns {missing}")
    notes = []

    def transform(vals, log, name):
        out = []
        clipped = False
        for v in vals:
            if log:
                if not v > 0:
                    if math.isnan(v):
                        out.append(float("nan"))
                        continue
                    clipped = True
                    v = LOG_FLOOR
                out.append(math.log10(v))
            else:
                out.append(v)
        if clipped:
            notes.append(f"{name}: nonpositive values clipped at 1e-300")
        return out

    xs = transform(cols[spec.x], spec.logx, spec.x)
    ys = [transform(cols[c], spec.logy, c) for c in spec.y]
    for n in notes:
        warnings.warn(n, RuntimeWarning, stacklevel=2)

    finite_x = [v for v in xs if math.isfinite(v)]
    finite_y = [v for s in ys for v in s if math.isfinite(v)]
    if not finite_x or not finite_y:
        raise PlotError(f"{csv_path}: no finite data to plot")
    x0, x1 = min(finite_x), max(finite_x)
    y0, y1 = min(finite_y), max(finite_y)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        pad = 0.5 if y0 == 0 else abs(y0) * 0.1
        y0, y1 = y0 - pad, y1 + pad
    left, right, top, bottom = MARGIN
    pw = WIDTH - left - right
    ph = HEIGHT - top - bottom

    def px(v):
        return left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + (y1 - v) / (y1 - y0) * ph

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    if spec.title:
        parts.append(f'<text x="{WIDTH / 2:.2f}" y="20" text-anchor="middle" font-size="14">{escape(spec.title)}</text>')
    for t in _ticks(x0, x1, spec.logx):
        if x0 <= t <= x1:
            label = f"1e{int(t)}" if spec.logx else f"{t:g}"
            parts.append(f'<line x1="{_fmt(px(t))}" y1="{top + ph}" x2="{_fmt(px(t))}" y2="{top + ph + 5}" stroke="black"/>')
            parts.append(f'<text x="{_fmt(px(t))}" y="{top + ph + 18}" text-anchor="middle" font-size="11">{label}</text>')
    for t in _ticks(y0, y1, spec.logy):
        if y0 <= t <= y1:
            label = f"1e{int(t)}" if spec.logy else f"{t:g}"
            parts.append(f'<line x1="{left - 5}" y1="{_fmt(py(t))}" x2="{left}" y2="{_fmt(py(t))}" stroke="black"/>')
            parts.append(f'<text x="{left - 8}" y="{_fmt(py(t) + 4)}" text-anchor="end" font-size="11">{label}</text>')
    parts.append(f'<text x="{left + pw / 2:.2f}" y="{HEIGHT - 8}" text-anchor="middle" font-size="12">{escape(spec.x)}</text>')
    labels = spec.labels or spec.y
    for k, (name, series) in enumerate(zip(labels, ys)):
        color = COLORS[k % len(COLORS)]
        segments = []
        cur = []
        for xv, yv in zip(xs, series):
            if math.isfinite(xv) and math.isfinite(yv):
                cur.append(f"{_fmt(px(xv))},{_fmt(py(yv))}")
            elif cur:
                segments.append(cur)
                cur = []
        if cur:
            segments.append(cur)
        for seg in segments:
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(seg)}"/>')
        ly = top + 14 + 14 * k
        parts.append(f'<line x1="{left + pw - 120}" y1="{ly - 4}" x2="{left + pw - 100}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{left + pw - 95}" y="{ly}" font-size="11">{escape(name)}</text>')
    for k, n in enumerate(notes):
        parts.append(f'<text x="{left + 5}" y="{top + ph - 6 - 13 * k}" font-size="10" fill="#555">{escape(n)}</text>')
    parts.append("</svg>")
    out = Path(out_path) if out_path is not None else Path(csv_path).with_suffix(".svg")
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return out
