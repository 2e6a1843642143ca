"""Static SVG rendering of tables, momentum bodies, orbits and unfoldings.

Polygons become closed ``<path>`` elements and trajectories ``<polyline>``
elements; element order follows the input order so output is deterministic.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgument

SVG_NS = "http://www.w3.org/2000/svg"
KINDS = ("product-pair", "trajectory", "unfolding", "minimizer-family")
PANEL = 400.0
MARGIN = 20.0
STROKES = ("#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#ca6f1e", "#117a65")


@dataclass
class Figure:
    svg: str
    paths: int
    polylines: int

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.svg)


class _Panel:
    """Maps model coordinates (y up) into a square panel (y down)."""

    def __init__(self, points: np.ndarray, x0: float):
        lo = points.min(axis=0)
        hi = points.max(axis=0)
        span = float(max(hi - lo)) or 1.0
        self.k = (PANEL - 2 * MARGIN) / span
        self.c = (lo + hi) / 2
        self.x0 = x0

    def __call__(self, pts) -> str:
        pts = np.atleast_2d(pts)
        x = self.x0 + PANEL / 2 + (pts[:, 0] - self.c[0]) * self.k
        y = PANEL / 2 - (pts[:, 1] - self.c[1]) * self.k
        return " ".join(f"{a:.4f},{b:.4f}" for a, b in zip(x, y))


class _Doc:
    def __init__(self, panels: int, title: str):
        ET.register_namespace("", SVG_NS)
        w = PANEL * panels
        self.root = ET.Element(
            f"{{{SVG_NS}}}svg",
            {"version": "1.1", "width": f"{w:g}", "height": f"{PANEL:g}", "viewBox": f"0 0 {w:g} {PANEL:g}"},
        )
        ET.SubElement(self.root, f"{{{SVG_NS}}}title").text = title
        self.desc = ET.SubElement(self.root, f"{{{SVG_NS}}}desc")
        self.paths = 0
        self.polylines = 0

    def polygon(self, panel: _Panel, vertices, stroke: str, fill: str = "none", width: float = 1.5):
        pts = panel(vertices).split(" ")
        d = "M " + " L ".join(pts) + " Z"
        ET.SubElement(
            self.root,
            f"{{{SVG_NS}}}path",
            {"d": d, "fill": fill, "stroke": stroke, "stroke-width": f"{width:g}"},
        )
        self.paths += 1

    def polyline(self, panel: _Panel, points, stroke: str, width: float = 1.2):
        ET.SubElement(
            self.root,
            f"{{{SVG_NS}}}polyline",
            {"points": panel(points), "fill": "none", "stroke": stroke, "stroke-width": f"{width:g}"},
        )
        self.polylines += 1

    def finish(self) -> Figure:
        self.desc.text = f"paths={self.paths} polylines={self.polylines}"
        ET.indent(self.root)
        body = ET.tostring(self.root, encoding="unicode")
        return Figure('<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n", self.paths, self.polylines)


def _closed(points: np.ndarray) -> np.ndarray:
    return np.vstack([points, points[:1]])


def product_pair(K, T) -> Figure:
    doc = _Doc(2, "K (left) and T (right)")
    for i, P in enumerate((K, T)):
        panel = _Panel(np.vstack([P.vertices, [[0.0, 0.0]]]), i * PANEL)
        doc.polygon(panel, P.vertices, STROKES[i], fill="#f2f2f2")
    return doc.finish()


def trajectory(K, q: np.ndarray, T=None, p: np.ndarray | None = None) -> Figure:
    """Closed orbit ``q`` in ``K``; with ``T`` and ``p`` a second panel shows the momenta."""
    q = np.asarray(q, dtype=float)
    if len(q) < 2:
        raise InvalidArgument("a trajectory needs at least two bounce points")
    both = T is not None and p is not None
    doc = _Doc(2 if both else 1, "billiard trajectory")
    panel = _Panel(K.vertices, 0.0)
    doc.polygon(panel, K.vertices, STROKES[0])
    doc.polyline(panel, _closed(q), STROKES[1])
    if both:
        tp = _Panel(T.vertices, PANEL)
        doc.polygon(tp, T.vertices, STROKES[0])
        doc.polyline(tp, _closed(np.asarray(p, dtype=float)), STROKES[2])
    return doc.finish()


def unfolding(copies, points) -> Figure:
    """Reflected table copies and the straightened orbit."""
    if not len(copies):
        raise InvalidArgument("nothing to unfold")
    allpts = np.vstack(list(copies) + [np.asarray(points)])
    doc = _Doc(1, "unfolded trajectory")
    panel = _Panel(allpts, 0.0)
    for c in copies:
        doc.polygon(panel, c, "#7f8c8d", width=0.8)
    doc.polyline(panel, points, STROKES[1], width=1.5)
    return doc.finish()


def minimizer_family(K, curves) -> Figure:
    """Several closed curves of equal length drawn in one copy of ``K``."""
    if not len(curves):
        raise InvalidArgument("no curves to draw")
    doc = _Doc(1, "minimal closed billiard trajectories")
    panel = _Panel(K.vertices, 0.0)
    doc.polygon(panel, K.vertices, STROKES[0])
    for i, c in enumerate(curves):
        doc.polyline(panel, _closed(np.asarray(c, dtype=float)), STROKES[1 + i % (len(STROKES) - 1)])
    return doc.finish()


def emit_figure(kind: str, **inputs) -> Figure:
    """Dispatch on ``kind``; ``inputs`` are the keyword arguments of the matching renderer."""
    table = {
        "product-pair": product_pair,
        "trajectory": trajectory,
        "unfolding": unfolding,
        "minimizer-family": minimizer_family,
    }
    if kind not in table:
        raise InvalidArgument(f"unknown figure kind {kind!r}; choose from {', '.join(KINDS)}")
    try:
        return table[kind](**inputs)
    except TypeError as exc:
        raise InvalidArgument(f"bad inputs for {kind}: {exc}") from None
