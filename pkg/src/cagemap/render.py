"""Deterministic SVG drawing of one slice.

Three layers, each a ``<g>`` with a fixed id: the collision disks, the
alpha-complex simplices, and the exterior components.  Every element
carries a stable id so two drawings can be diffed line by line.  Numbers
are written with a fixed number of decimals and the y axis points up.
"""

from __future__ import annotations

import numpy as np

from .slicing import SliceApprox

PALETTE = ("#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4",
           "#42d4f4", "#f032e6", "#bfef45", "#469990", "#9a6324")
DECIMALS = 6


def _num(v: float) -> str:
    s = f"{v:.{DECIMALS}f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def component_color(k: int) -> str:
    return PALETTE[(k - 1) % len(PALETTE)]


def _bounds(sl: SliceApprox, margin: float):
    if sl.union is None:
        return -1.0, -1.0, 1.0, 1.0
    x0, y0, x1, y1 = sl.union.bounds()
    pad = margin * max(x1 - x0, y1 - y0, 1e-9)
    return x0 - pad, y0 - pad, x1 + pad, y1 + pad


def render_slice(sl: SliceApprox, width: int = 800, margin: float = 0.05) -> str:
    """SVG document for ``sl``; bounded components are filled with a palette
    color, the unbounded component is left unfilled."""
    x0, y0, x1, y1 = _bounds(sl, margin)
    w, h = x1 - x0, y1 - y0
    height = max(1, int(round(width * h / w)))
    stroke = _num(w / width)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{_num(x0)} {_num(-y1)} {_num(w)} {_num(h)}">',
        f'<title>slice {sl.index} theta [{_num(sl.interval[0])}, {_num(sl.interval[1])}] '
        f'components {sl.n_components}</title>',
        '<g transform="scale(1,-1)">',
    ]

    out.append(f'<g id="collision-disks" fill="#d0d0d0" fill-opacity="0.5" '
               f'stroke="#808080" stroke-width="{stroke}">')
    if sl.union is not None:
        r = _num(sl.union.common_radius)
        for k, (cx, cy) in enumerate(sl.union.centers):
            out.append(f'<circle id="disk-{k}" cx="{_num(cx)}" cy="{_num(cy)}" r="{r}"/>')
    out.append("</g>")

    out.append(f'<g id="alpha-complex" stroke="#202020" stroke-width="{stroke}">')
    if sl.dt is not None:
        pts = sl.dt.sites
        for t in np.flatnonzero(sl.complex.tri_member):
            a, b, c = pts[sl.dt.triangles[t]]
            out.append(f'<polygon id="simplex-tri-{t}" fill="#707070" fill-opacity="0.4" '
                       f'points="{_pts((a, b, c))}"/>')
        for e in np.flatnonzero(sl.complex.edge_member):
            a, b = pts[sl.dt.edges[e]]
            out.append(f'<line id="simplex-edge-{e}" x1="{_num(a[0])}" y1="{_num(a[1])}" '
                       f'x2="{_num(b[0])}" y2="{_num(b[1])}"/>')
    out.append("</g>")

    out.append('<g id="components" stroke="none">')
    if sl.dt is not None:
        pts = sl.dt.sites
        labels = sl.decomposition.labels
        for t in np.flatnonzero(labels >= 0):
            k = int(labels[t])
            fill = 'fill="none"' if k == 0 else f'fill="{component_color(k)}" fill-opacity="0.6"'
            out.append(f'<polygon id="comp-{k}-tri-{t}" {fill} '
                       f'points="{_pts(pts[sl.dt.triangles[t]])}"/>')
    out.append("</g>")
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _pts(points) -> str:
    return " ".join(f"{_num(p[0])},{_num(p[1])}" for p in points)


def count_elements(svg: str) -> dict:
    """Element counts per layer, handy for tests and quick summaries."""
    return {
        "disks": svg.count("<circle "),
        "triangles": svg.count('id="simplex-tri-'),
        "edges": svg.count('id="simplex-edge-'),
        "bounded": sum(1 for line in svg.splitlines()
                       if line.startswith('<polygon id="comp-') and 'fill="none"' not in line),
    }

