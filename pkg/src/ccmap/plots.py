"""Dependency-free SVG scatter/line plots with the plotted data embedded as CSV."""
from __future__ import annotations

from html import escape
from pathlib import Path

W, H, PAD = 480, 360, 48
PALETTE = {"classical": "#e67e22", "quantum": "#2e86c1"}
DEFAULT_COLOR = "#34495e"


def _scale(vals, lo_px, hi_px):
    lo, hi = min(vals), max(vals)
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    return lambda v: lo_px + (v - lo) / (hi - lo) * (hi_px - lo_px), (lo, hi)


def scatter_svg(series: dict, lines: dict | None = None, xlabel="x", ylabel="y", title="") -> str:
    """``series`` maps a name to (x, y) points; ``lines`` maps a name to a polyline."""
    lines = lines or {}
    allpts = [p for pts in list(series.values()) + list(lines.values()) for p in pts]
    if not allpts:
        allpts = [(0.0, 0.0)]
    sx, (x0, x1) = _scale([p[0] for p in allpts], PAD, W - PAD / 2)
    sy, (y0, y1) = _scale([p[1] for p in allpts], H - PAD, PAD / 2)
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<line x1="{PAD}" y1="{H - PAD}" x2="{W - PAD / 2}" y2="{H - PAD}" stroke="black"/>',
        f'<line x1="{PAD}" y1="{H - PAD}" x2="{PAD}" y2="{PAD / 2}" stroke="black"/>',
        f'<text x="{W / 2}" y="{H - 10}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="14" y="{H / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 14 {H / 2})">{escape(ylabel)}</text>',
        f'<text x="{PAD}" y="{H - PAD + 14}" font-size="10">{x0:.3g}</text>',
        f'<text x="{W - PAD / 2}" y="{H - PAD + 14}" font-size="10" text-anchor="end">{x1:.3g}</text>',
        f'<text x="{PAD - 4}" y="{H - PAD}" font-size="10" text-anchor="end">{y0:.3g}</text>',
        f'<text x="{PAD - 4}" y="{PAD / 2 + 8}" font-size="10" text-anchor="end">{y1:.3g}</text>',
    ]
    if title:
        out.append(f'<text x="{W / 2}" y="16" text-anchor="middle" font-size="13">{escape(title)}</text>')
    for name, pts in series.items():
        color = PALETTE.get(name, DEFAULT_COLOR)
        for x, y in pts:
            out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" fill="{color}" fill-opacity="0.6"/>')
    for i, (name, pts) in enumerate(lines.items()):
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        dash = "" if i == 0 else ' stroke-dasharray="5,3"'
        out.append(f'<polyline points="{coords}" fill="none" stroke="#c0392b" stroke-width="1.5"{dash}><title>{escape(name)}</title></polyline>')
    rows = ["series,x,y"] + [f"{name},{x!r},{y!r}" for name, pts in {**series, **lines}.items() for x, y in pts]
    out.append("<metadata><![CDATA[\n" + "\n".join(rows) + "\n]]></metadata>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, svg: str) -> Path:
    path = Path(path)
    path.write_text(svg)
    return path
