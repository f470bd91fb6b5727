"""Small self-contained SVG line plots for verification artifacts."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#17becf", "#9467bd", "#ff7f0e")
PANEL_W, PANEL_H = 640, 280
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 30, 45


@dataclass
class Series:
    x: np.ndarray
    y: np.ndarray
    label: str
    color: str | None = None
    dashed: bool = False


@dataclass
class Panel:
    title: str
    xlabel: str
    ylabel: str
    series: list[Series] = field(default_factory=list)
    markers: list[tuple[float, str]] = field(default_factory=list)

    def add(self, x, y, label, color=None, dashed=False) -> Panel:
        self.series.append(Series(np.asarray(x, float), np.asarray(y, float), label, color, dashed))
        return self


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def _panel_svg(p: Panel, y0: int) -> list[str]:
    xs = np.concatenate([s.x for s in p.series]) if p.series else np.array([0.0, 1.0])
    ys = np.concatenate([s.y[np.isfinite(s.y)] for s in p.series]) if p.series else np.array([0.0, 1.0])
    xlo, xhi = float(xs.min()), float(xs.max())
    ylo, yhi = (float(ys.min()), float(ys.max())) if ys.size else (0.0, 1.0)
    if yhi == ylo:
        ylo, yhi = ylo - 1, yhi + 1
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad
    w = PANEL_W - MARGIN_L - MARGIN_R
    h = PANEL_H - MARGIN_T - MARGIN_B

    def px(x):
        return MARGIN_L + (x - xlo) / (xhi - xlo or 1.0) * w

    def py(y):
        return y0 + MARGIN_T + (yhi - y) / (yhi - ylo) * h

    out = [
        f'<rect x="{MARGIN_L}" y="{y0 + MARGIN_T}" width="{w}" height="{h}" '
        'fill="none" stroke="#444"/>',
        f'<text x="{PANEL_W / 2}" y="{y0 + 18}" text-anchor="middle" '
        f'font-size="14">{escape(p.title)}</text>',
        f'<text x="{PANEL_W / 2}" y="{y0 + PANEL_H - 8}" text-anchor="middle" '
        f'font-size="12">{escape(p.xlabel)}</text>',
        f'<text x="16" y="{y0 + MARGIN_T + h / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {y0 + MARGIN_T + h / 2})">{escape(p.ylabel)}</text>',
    ]
    for t in _nice_ticks(xlo, xhi):
        out.append(f'<line x1="{px(t):.1f}" y1="{py(ylo):.1f}" x2="{px(t):.1f}" '
                   f'y2="{py(ylo) + 4:.1f}" stroke="#444"/>')
        out.append(f'<text x="{px(t):.1f}" y="{py(ylo) + 16:.1f}" text-anchor="middle" '
                   f'font-size="10">{_fmt(t)}</text>')
    for t in _nice_ticks(ylo, yhi):
        out.append(f'<line x1="{MARGIN_L - 4}" y1="{py(t):.1f}" x2="{MARGIN_L + w}" '
                   f'y2="{py(t):.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{MARGIN_L - 6}" y="{py(t) + 3:.1f}" text-anchor="end" '
                   f'font-size="10">{_fmt(t)}</text>')
    for x, label in p.markers:
        if xlo <= x <= xhi:
            out.append(f'<line x1="{px(x):.1f}" y1="{py(yhi):.1f}" x2="{px(x):.1f}" '
                       f'y2="{py(ylo):.1f}" stroke="#888" stroke-dasharray="2,3"/>')
            out.append(f'<text x="{px(x) + 3:.1f}" y="{py(yhi) + 12:.1f}" '
                       f'font-size="10" fill="#555">{escape(label)}</text>')
    for i, s in enumerate(p.series):
        color = s.color or PALETTE[i % len(PALETTE)]
        ok = np.isfinite(s.y)
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(s.x[ok], s.y[ok]))
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"{dash}/>')
        ly = y0 + MARGIN_T + 14 + 14 * i
        out.append(f'<line x1="{MARGIN_L + w - 150}" y1="{ly - 4}" x2="{MARGIN_L + w - 130}" '
                   f'y2="{ly - 4}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{MARGIN_L + w - 125}" y="{ly}" font-size="10">'
                   f'{escape(s.label)}</text>')
    return out


def write_svg(path: str | Path, panels: list[Panel]) -> Path:
    path = Path(path)
    height = PANEL_H * len(panels)
    body = []
    for i, p in enumerate(panels):
        body.extend(_panel_svg(p, i * PANEL_H))
    path.write_text(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_W}" height="{height}" '
        f'viewBox="0 0 {PANEL_W} {height}" font-family="sans-serif">\n'
        '<rect width="100%" height="100%" fill="white"/>\n'
        + "\n".join(body) + "\n</svg>\n"
    )
    return path
