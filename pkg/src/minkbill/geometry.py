"""Planar convex polygon geometry.

Polygons are stored counter-clockwise, starting from the lowest (then
leftmost) vertex, with collinear vertices merged.  All predicates share one
relative tolerance ``eps`` which is multiplied by the polygon's coordinate
scale before use.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgument, InvalidBody, NotOnBoundary

DEFAULT_EPS = 1e-9


def cross(a, b):
    """z-component of the 2D cross product; broadcasts over leading axes."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def _canonical_vertices(points: np.ndarray, tol: float) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InvalidArgument("vertices must be a list of 2D points")
    # drop repeated consecutive points (including the closing duplicate)
    keep = []
    for i in range(len(pts)):
        if np.linalg.norm(pts[i] - pts[i - 1]) > tol:
            keep.append(pts[i])
    pts = np.array(keep).reshape(-1, 2)
    if len(pts) < 3:
        raise InvalidArgument("a polygon needs at least 3 distinct vertices")

    signed = 0.5 * np.sum(cross(pts, np.roll(pts, -1, axis=0)))
    if signed < 0:
        pts = pts[::-1]

    # merge collinear triples until every turn is strictly left
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        n = len(pts)
        for i in range(n):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
            turn = cross(b - a, c - b)
            if abs(turn) <= tol * max(np.linalg.norm(b - a), np.linalg.norm(c - b), tol):
                if np.dot(b - a, c - b) < 0:
                    raise InvalidArgument("polygon folds back on itself")
                pts = np.delete(pts, i, axis=0)
                changed = True
                break
            if turn < 0:
                raise InvalidArgument("polygon is not convex")
    if len(pts) < 3:
        raise InvalidArgument("polygon is degenerate (all vertices collinear)")

    # a convex CCW polygon winds exactly once
    angles = np.arctan2(*(np.roll(pts, -1, axis=0) - pts)[:, ::-1].T)
    turning = np.mod(np.diff(np.append(angles, angles[0])), 2 * np.pi).sum()
    if abs(turning - 2 * np.pi) > 1e-6:
        raise InvalidArgument("polygon is not simple")

    start = min(range(len(pts)), key=lambda i: (pts[i, 1], pts[i, 0]))
    return np.roll(pts, -start, axis=0)


class Polygon2:
    """Convex polygon with counter-clockwise canonical vertex order."""

    __slots__ = ("_v", "eps", "_normals", "_offsets", "_scale")

    def __init__(self, vertices, eps: float = DEFAULT_EPS):
        raw = np.asarray(vertices, dtype=float)
        if raw.ndim != 2 or raw.shape[0] < 3:
            raise InvalidArgument("a polygon needs at least 3 vertices")
        scale = max(float(np.max(np.abs(raw))), float(np.ptp(raw, axis=0).max()), 1e-300)
        self._setup(_canonical_vertices(raw, eps * scale), eps)

    def _setup(self, v, eps):
        v = np.array(v, dtype=float)
        v.setflags(write=False)
        self._v = v
        self.eps = float(eps)
        self._scale = max(float(np.max(np.abs(v))), float(np.ptp(v, axis=0).max()))
        edges = np.roll(v, -1, axis=0) - v
        normals = np.column_stack([edges[:, 1], -edges[:, 0]])
        normals /= np.linalg.norm(normals, axis=1)[:, None]
        normals.setflags(write=False)
        self._normals = normals
        offsets = np.einsum("ij,ij->i", normals, v)
        offsets.setflags(write=False)
        self._offsets = offsets

    @classmethod
    def _from_trusted(cls, vertices, eps=DEFAULT_EPS):
        """Skip canonicalisation for vertices already known to be convex and CCW."""
        obj = cls.__new__(cls)
        obj._setup(vertices, eps)
        return obj

    # -- basic accessors -------------------------------------------------
    @property
    def vertices(self) -> np.ndarray:
        return self._v

    @property
    def normals(self) -> np.ndarray:
        """Outer unit normal of edge ``i`` (from vertex ``i`` to ``i+1``)."""
        return self._normals

    @property
    def offsets(self) -> np.ndarray:
        """Support value ``<n_i, v_i>`` of every edge line."""
        return self._offsets

    @property
    def edges(self) -> np.ndarray:
        return np.roll(self._v, -1, axis=0) - self._v

    @property
    def scale(self) -> float:
        return self._scale

    @property
    def tol(self) -> float:
        """Absolute tolerance: ``eps`` times the coordinate scale."""
        return self.eps * self._scale

    def __len__(self):
        return len(self._v)

    def __repr__(self):
        return f"Polygon2({self._v.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, Polygon2):
            return NotImplemented
        return self._v.shape == other._v.shape and bool(
            np.allclose(self._v, other._v, rtol=0, atol=max(self.tol, other.tol))
        )

    def __hash__(self):
        return hash(self._v.tobytes())

    def vertex(self, i: int) -> np.ndarray:
        return self._v[i % len(self._v)]

    def edge_point(self, i: int, lam: float) -> np.ndarray:
        """Point ``(1-lam) v_i + lam v_{i+1}`` on edge ``i``."""
        a = self.vertex(i)
        b = self.vertex(i + 1)
        return a + lam * (b - a)

    def has_interior_origin(self) -> bool:
        return bool(np.all(self._offsets > self.tol))

    def require_interior_origin(self, what: str = "polygon"):
        if not self.has_interior_origin():
            raise InvalidBody(f"{what} must contain the origin in its interior")

    def circumradius(self) -> float:
        return float(np.max(np.linalg.norm(self._v, axis=1)))

    # -- affine maps -----------------------------------------------------
    def scaled(self, alpha: float) -> "Polygon2":
        if not alpha > 0:
            raise InvalidArgument("scale factor must be positive")
        return Polygon2(self._v * alpha, self.eps)

    def rotated(self, theta: float) -> "Polygon2":
        c, s = math.cos(theta), math.sin(theta)
        rot = np.array([[c, -s], [s, c]])
        return Polygon2(self._v @ rot.T, self.eps)

    def translated(self, t) -> "Polygon2":
        return Polygon2(self._v + np.asarray(t, dtype=float), self.eps)

    def reflected(self) -> "Polygon2":
        """Point reflection ``-P``."""
        return Polygon2(-self._v, self.eps)

    def contains(self, x, strict: bool = False) -> bool:
        vals = self._normals @ np.asarray(x, dtype=float) - self._offsets
        if strict:
            return bool(np.all(vals < -self.tol))
        return bool(np.all(vals <= self.tol))

    def to_dict(self) -> dict:
        return {"vertices": self._v.tolist()}


# ---------------------------------------------------------------------------
# constructors


def regular_polygon(sides: int, circumradius: float = 1.0, phase: float = 0.0, eps: float = DEFAULT_EPS) -> Polygon2:
    """Regular polygon with vertex ``k`` at angle ``phase + 2*pi*k/sides``."""
    if int(sides) != sides or sides < 3:
        raise InvalidArgument("a regular polygon needs at least 3 sides")
    if not circumradius > 0:
        raise InvalidArgument("circumradius must be positive")
    k = np.arange(int(sides))
    ang = phase + 2 * np.pi * k / sides
    return Polygon2(circumradius * np.column_stack([np.cos(ang), np.sin(ang)]), eps)


# ---------------------------------------------------------------------------
# support, gauge, polarity


def support(P: Polygon2, u) -> float:
    """``h_P(u) = max <v, u>`` over the vertices of ``P``."""
    u = np.asarray(u, dtype=float)
    return float(np.max(P.vertices @ u))


def support_many(P: Polygon2, U) -> np.ndarray:
    """Vectorised support function for an ``(..., 2)`` array of directions."""
    U = np.asarray(U, dtype=float)
    return np.max(U @ P.vertices.T, axis=-1)


def gauge(P: Polygon2, x) -> float:
    """Minkowski functional ``inf{r >= 0 : x in rP}``."""
    P.require_interior_origin()
    vals = P.normals @ np.asarray(x, dtype=float) / P.offsets
    return float(max(0.0, np.max(vals)))


def gauge_many(P: Polygon2, X) -> np.ndarray:
    P.require_interior_origin()
    X = np.asarray(X, dtype=float)
    vals = (X @ P.normals.T) / P.offsets
    return np.maximum(np.max(vals, axis=-1), 0.0)


def polar(P: Polygon2) -> Polygon2:
    """Polar body: one vertex ``n_i / h_P(n_i)`` per edge of ``P``."""
    P.require_interior_origin()
    return Polygon2(P.normals / P.offsets[:, None], P.eps)


def area(P: Polygon2) -> float:
    v = P.vertices
    return float(0.5 * np.sum(cross(v, np.roll(v, -1, axis=0))))


def perimeter(P: Polygon2) -> float:
    return float(np.sum(np.linalg.norm(P.edges, axis=1)))


def width(P: Polygon2, u) -> float:
    u = np.asarray(u, dtype=float)
    return support(P, u) + support(P, -u)


# ---------------------------------------------------------------------------
# normal cones and boundary location


@dataclass(frozen=True)
class Feature:
    """Boundary feature: ``kind`` is ``"edge"`` or ``"vertex"``.

    For an edge, ``lam`` is the parameter of the point along the edge; for a
    vertex it is 0.
    """

    kind: str
    index: int
    lam: float = 0.0

    def position(self) -> float:
        """Arc parameter: integer values are vertices, ``i + lam`` lies on edge ``i``."""
        return float(self.index) if self.kind == "vertex" else self.index + self.lam

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "index": self.index}
        if self.kind == "edge":
            d["lam"] = self.lam
        return d


@dataclass(frozen=True)
class Cone:
    """Outer normal cone at a boundary point, spanned by 1 or 2 unit rays (CCW)."""

    feature: Feature
    rays: tuple

    def contains(self, u, tol: float = 1e-9) -> bool:
        u = np.asarray(u, dtype=float)
        nu = np.linalg.norm(u)
        if nu <= tol:
            return True
        if len(self.rays) == 1:
            r = self.rays[0]
            return bool(abs(cross(r, u)) <= tol * nu and np.dot(r, u) > 0)
        r1, r2 = self.rays
        return bool(cross(r1, u) >= -tol * nu and cross(u, r2) >= -tol * nu)


def locate(P: Polygon2, x, tol: float | None = None) -> Feature:
    """Boundary feature of ``x``; raises :class:`NotOnBoundary` if ``x`` is off the boundary."""
    tol = P.tol if tol is None else tol
    x = np.asarray(x, dtype=float)
    v = P.vertices
    d_vert = np.linalg.norm(v - x, axis=1)
    i = int(np.argmin(d_vert))
    if d_vert[i] <= tol:
        return Feature("vertex", i)
    e = P.edges
    lam = np.clip(np.einsum("ij,ij->i", x - v, e) / np.einsum("ij,ij->i", e, e), 0.0, 1.0)
    closest = v + lam[:, None] * e
    dist = np.linalg.norm(closest - x, axis=1)
    j = int(np.argmin(dist))
    if dist[j] > tol:
        raise NotOnBoundary(f"point {x.tolist()} is {dist[j]:.3g} away from the boundary")
    return Feature("edge", j, float(lam[j]))


def normal_cone(P: Polygon2, x, tol: float | None = None) -> Cone:
    """Outer normal cone ``N_P(x)`` for a boundary point ``x``."""
    f = locate(P, x, tol)
    if f.kind == "vertex":
        n = len(P)
        rays = (P.normals[(f.index - 1) % n].copy(), P.normals[f.index].copy())
    else:
        rays = (P.normals[f.index].copy(),)
    return Cone(f, rays)


def feature_point(P: Polygon2, f: Feature) -> np.ndarray:
    if f.kind == "vertex":
        return P.vertex(f.index).copy()
    return P.edge_point(f.index, f.lam)


# ---------------------------------------------------------------------------
# polygon intersection and translatability


def clip_halfplane(poly: np.ndarray, a, b: float) -> np.ndarray:
    """Clip a convex vertex loop to ``{x : <a, x> <= b}`` (Sutherland-Hodgman)."""
    if len(poly) == 0:
        return poly
    a = np.asarray(a, dtype=float)
    vals = poly @ a - b
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        vp, vq = vals[i], vals[(i + 1) % n]
        if vp <= 0:
            out.append(p)
        if (vp < 0 < vq) or (vq < 0 < vp):
            t = vp / (vp - vq)
            out.append(p + t * (q - p))
    return np.array(out).reshape(-1, 2)


def intersect_vertices(A: np.ndarray, B: Polygon2) -> np.ndarray:
    """Vertices of ``conv(A) ∩ B`` for a convex vertex loop ``A``."""
    out = np.asarray(A, dtype=float)
    for n, h in zip(B.normals, B.offsets):
        out = clip_halfplane(out, n, h)
        if len(out) == 0:
            break
    return out


def _loop_area(v: np.ndarray) -> float:
    if len(v) < 3:
        return 0.0
    return float(0.5 * np.sum(cross(v, np.roll(v, -1, axis=0))))


def _loop_perimeter(v: np.ndarray) -> float:
    if len(v) < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)))


def _loop_centroid(v: np.ndarray) -> np.ndarray:
    a = _loop_area(v)
    if a <= 0:
        return v.mean(axis=0)
    c = cross(v, np.roll(v, -1, axis=0))
    s = v + np.roll(v, -1, axis=0)
    return (s * c[:, None]).sum(axis=0) / (6.0 * a)


@dataclass(frozen=True)
class Translatability:
    translatable: bool
    witness: np.ndarray | None = None

    def __bool__(self):
        return self.translatable


def translatable_into_interior(P: Polygon2, points) -> Translatability:
    """Decide whether ``points`` fit into ``int(P) + t`` for some translation ``t``.

    The admissible translations form the intersection of the polygons
    ``q_i - P``, computed by successive convex clipping.  The set counts as
    empty when its thickness ``2*area/perimeter`` does not exceed ``P.tol``,
    so configurations that only touch the boundary are not translatable.
    The witness is the centroid of the admissible set.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        raise InvalidArgument("need at least one point")
    neg = -P.vertices  # point reflection keeps the CCW order
    region = pts[0] + neg
    for q in pts[1:]:
        region = intersect_vertices(region, Polygon2._from_trusted(q + neg, P.eps))
        if len(region) < 3:
            return Translatability(False)
    a = _loop_area(region)
    per = _loop_perimeter(region)
    if per <= 0 or 2 * a / per <= P.tol or a <= P.tol**2:
        return Translatability(False)
    return Translatability(True, _loop_centroid(region))


# ---------------------------------------------------------------------------
# affine maps and Minkowski combination


def transform(P: Polygon2, *, scale: float | None = None, rotate: float | None = None, translate=None) -> Polygon2:
    """Apply (in this order) scaling, rotation and translation."""
    out = P
    if scale is not None:
        out = out.scaled(scale)
    if rotate is not None:
        out = out.rotated(rotate)
    if translate is not None:
        out = out.translated(translate)
    return out


def _merged_sum(A: Polygon2, B: Polygon2, sa: float, sb: float) -> Polygon2:
    """``sa*A + sb*B`` by merging the edge sequences in angular order."""
    ea, eb = A.edges, B.edges
    # both polygons start at the lowest-leftmost vertex, so edge angles
    # increase monotonically through [0, 2*pi)
    ang_a = np.mod(np.arctan2(ea[:, 1], ea[:, 0]), 2 * np.pi)
    ang_b = np.mod(np.arctan2(eb[:, 1], eb[:, 0]), 2 * np.pi)
    out = [sa * A.vertices[0] + sb * B.vertices[0]]
    i = j = 0
    while i < len(ea) or j < len(eb):
        if j >= len(eb) or (i < len(ea) and ang_a[i] <= ang_b[j]):
            step = sa * ea[i]
            i += 1
        else:
            step = sb * eb[j]
            j += 1
        out.append(out[-1] + step)
    return Polygon2(np.array(out[:-1]), min(A.eps, B.eps))


def minkowski_sum(A: Polygon2, B: Polygon2) -> Polygon2:
    """``A + B``."""
    return _merged_sum(A, B, 1.0, 1.0)


def minkowski_combine(A: Polygon2, B: Polygon2, lam: float) -> Polygon2:
    """``lam*A + (1-lam)*B`` for ``lam`` in ``[0, 1]``.

    Edges shorter than the tolerance (tiny ``lam`` or ``1 - lam``) are merged
    away by the constructor.
    """
    if not 0.0 <= lam <= 1.0:
        raise InvalidArgument("lam must lie in [0, 1]")
    if lam == 1.0:
        return A
    if lam == 0.0:
        return B
    return _merged_sum(A, B, lam, 1.0 - lam)


def difference_body(P: Polygon2) -> Polygon2:
    """``P - P``."""
    return minkowski_sum(P, P.reflected())


# ---------------------------------------------------------------------------
# JSON I/O


def polygon_from_dict(data: dict, eps: float = DEFAULT_EPS) -> Polygon2:
    if not isinstance(data, dict) or "vertices" not in data:
        raise InvalidArgument("polygon JSON needs a 'vertices' list")
    verts = data["vertices"]
    try:
        arr = np.array([[float(x), float(y)] for x, y in verts])
    except (TypeError, ValueError) as exc:
        raise InvalidArgument(f"malformed vertex list: {exc}") from exc
    return Polygon2(arr, eps)


def read_polygon(path, eps: float = DEFAULT_EPS) -> Polygon2:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidArgument(f"{path}: malformed JSON ({exc.msg})") from exc
    return polygon_from_dict(data, eps)


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def polygon_to_json(P: Polygon2) -> str:
    rows = ", ".join(f"[{format_float(x)}, {format_float(y)}]" for x, y in P.vertices)
    return '{"vertices": [' + rows + "]}"


def write_polygon(P: Polygon2, path) -> None:
    Path(path).write_text(polygon_to_json(P) + "\n")


def as_points(points: Iterable[Sequence[float]]) -> np.ndarray:
    return np.asarray(list(points), dtype=float).reshape(-1, 2)
