"""Minimal self-contained SVG line plots (no rendering dependencies)."""
from __future__ import annotations

import json

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 56, 16, 16, 40  # margins


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def line_plot(xs, ys, title: str, metadata: dict, x_label: str = "x",
              y_label: str = "") -> str:
    """One polyline with axes and embedded JSON metadata, as SVG 1.1 text."""
    xs = list(map(float, xs))
    ys = list(map(float, ys))
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    span_x = x1 - x0 if x1 > x0 else 1.0
    span_y = y1 - y0

    def px(x):
        return _ML + (x - x0) / span_x * (_W - _ML - _MR)

    def py(y):
        return _H - _MB - (y - y0) / span_y * (_H - _MT - _MB)

    pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    meta = json.dumps(metadata, sort_keys=True)
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {_W} {_H}" width="{_W}" height="{_H}">',
        f"<desc>{meta}</desc>",
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" '
        'stroke="black" stroke-width="1"/>',
    ]
    for frac in (0.0, 0.5, 1.0):
        xv = x0 + frac * span_x
        parts.append(
            f'<text x="{px(xv):.1f}" y="{_H - _MB + 18}" font-size="12" '
            f'text-anchor="middle">{_fmt(xv)}</text>'
        )
        yv = y0 + frac * span_y
        parts.append(
            f'<text x="{_ML - 6}" y="{py(yv) + 4:.1f}" font-size="12" '
            f'text-anchor="end">{_fmt(yv)}</text>'
        )
    parts.append(
        f'<polyline points="{pts}" fill="none" stroke="#1f6fb2" stroke-width="1.5"/>'
    )
    parts.append(
        f'<text x="{(_ML + _W - _MR) / 2:.0f}" y="{_H - 8}" font-size="13" '
        f'text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="{_ML + 8}" y="{_MT + 4}" font-size="13">{title}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
