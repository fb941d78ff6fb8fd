"""Minimal self-contained SVG line plots (no plotting dependency).

Only what the replication outputs need: several line series over a shared
x grid, optional log-10 x axis, dotted vertical reference lines, and a
legend. Output is deterministic for identical inputs.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["line_plot"]

_W, _H = 760, 480
_ML, _MR, _MT, _MB = 70, 20, 36, 56  # margins around the plot box


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi) or hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def _fmt_num(v: float) -> str:
    return f"{v:.3g}"


def line_plot(
    path: str,
    *,
    title: str,
    xlabel: str,
    ylabel: str,
    x: np.ndarray,
    series: list[tuple],
    vlines: list[tuple] | None = None,
    logx: bool = False,
    comment: str | None = None,
) -> None:
    """Write an SVG. ``series`` holds (label, y, color, dasharray) tuples;
    ``vlines`` holds (x, label, color) dotted reference lines."""
    x = np.asarray(x, dtype=np.float64)
    u = np.log10(x) if logx else x
    ys = [np.asarray(y, dtype=np.float64) for _, y, _, _ in series]
    all_y = np.concatenate([y[np.isfinite(y)] for y in ys])
    ylo, yhi = float(all_y.min()), float(all_y.max())
    if yhi <= ylo:
        yhi = ylo + 1.0
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad
    ulo, uhi = float(np.min(u)), float(np.max(u))
    if uhi <= ulo:
        uhi = ulo + 1.0

    box_w = _W - _ML - _MR
    box_h = _H - _MT - _MB

    def sx(val: float) -> float:
        return _ML + (val - ulo) / (uhi - ulo) * box_w

    def sy(val: float) -> float:
        return _MT + (yhi - val) / (yhi - ylo) * box_h

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="monospace" font-size="12">'
    )
    if comment is not None:
        parts.append(f"<!-- {comment.replace('--', '==')} -->")
    parts.append(f'<rect width="{_W}" height="{_H}" fill="white"/>')
    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{box_w}" height="{box_h}" '
        f'fill="none" stroke="#888888"/>'
    )
    parts.append(
        f'<text x="{_W / 2:.1f}" y="20" text-anchor="middle" '
        f'font-size="14">{title}</text>'
    )

    for tick in _ticks(ulo, uhi):
        px = sx(tick)
        label = f"1e{tick:.2g}" if logx else _fmt_num(tick)
        parts.append(
            f'<line x1="{px:.1f}" y1="{_MT + box_h}" x2="{px:.1f}" '
            f'y2="{_MT + box_h + 4}" stroke="#888888"/>'
        )
        parts.append(
            f'<text x="{px:.1f}" y="{_MT + box_h + 18}" '
            f'text-anchor="middle">{label}</text>'
        )
    for tick in _ticks(ylo, yhi):
        py = sy(tick)
        parts.append(
            f'<line x1="{_ML - 4}" y1="{py:.1f}" x2="{_ML}" y2="{py:.1f}" '
            f'stroke="#888888"/>'
        )
        parts.append(
            f'<text x="{_ML - 8}" y="{py + 4:.1f}" '
            f'text-anchor="end">{_fmt_num(tick)}</text>'
        )
    parts.append(
        f'<text x="{_W / 2:.1f}" y="{_H - 16}" '
        f'text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{_H / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_H / 2:.1f})">{ylabel}</text>'
    )

    for xv, _, color in (vlines or []):
        uv = math.log10(xv) if logx else xv
        px = sx(uv)
        parts.append(
            f'<line x1="{px:.1f}" y1="{_MT}" x2="{px:.1f}" '
            f'y2="{_MT + box_h}" stroke="{color}" stroke-dasharray="2,4"/>'
        )

    for (label, y, color, dash), yv in zip(series, ys):
        pts = []
        for uxi, yi in zip(u, yv):
            if math.isfinite(yi):
                pts.append(f"{sx(uxi):.2f},{sy(yi):.2f}")
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(
            f'<polyline points="{" ".join(pts)}" fill="none" '
            f'stroke="{color}" stroke-width="1.5"{dash_attr}/>'
        )

    legend_y = _MT + 14
    for label, _, color, _ in series:
        parts.append(
            f'<line x1="{_ML + box_w - 150}" y1="{legend_y - 4}" '
            f'x2="{_ML + box_w - 126}" y2="{legend_y - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{_ML + box_w - 120}" y="{legend_y}">{label}</text>'
        )
        legend_y += 16

    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
