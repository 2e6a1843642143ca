"""EHZ capacity of Lagrangian products ``K x T`` of convex polygons.

The capacity equals the minimal ``h_T``-length of a closed polygonal curve
with at most three vertices that cannot be translated into the interior of
``K``.  Two independent routes are provided:

* :func:`min_curve_exact` enumerates combinatorial classes (which edges of
  ``K`` carry the bounce points, and the cyclic order).  Inside a class the
  length is convex and piecewise linear in the edge parameters, linear on the
  cells cut out by the "kink" planes where a segment becomes parallel to an
  edge normal of ``T``.  The minimum therefore sits on a vertex of that
  arrangement intersected with the parameter box, and we enumerate them.
* :func:`min_curve_grid` scores every 2- and 3-point cycle drawn from a
  uniform boundary grid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.optimize import linprog

from .errors import InternalError, InvalidArgument, InvalidBody, NoCrossing, NotOnBoundary
from .geometry import (
    Feature,
    Polygon2,
    area,
    cross,
    difference_body,
    feature_point,
    locate,
    minkowski_combine,
    normal_cone,
    support_many,
    translatable_into_interior,
)

# values closer than this (relative to the capacity scale) count as ties
TIE_RTOL = 1e-11
# classes with more plane combinations than this are screened by an LP first
LP_SCREEN_COMBOS = 2000
LP_MARGIN = 1e-7


# ---------------------------------------------------------------------------
# closed polygonal curves


@dataclass(frozen=True)
class PolyCurve:
    """Closed polygonal curve with its vertices on the boundary of ``K``."""

    points: np.ndarray
    features: tuple
    orientation: int  # +1 counter-clockwise, -1 clockwise, 0 for 2-cycles

    @classmethod
    def on(cls, K: Polygon2, points, tol: float | None = None) -> "PolyCurve":
        pts = np.asarray(points, dtype=float).reshape(-1, 2)
        tol = K.tol if tol is None else tol
        feats = tuple(locate(K, q, tol) for q in pts)
        # snap points onto their features so later predicates see exact incidences
        snapped = np.array([feature_point(K, f) for f in feats])
        for i in range(len(snapped)):
            if np.linalg.norm(snapped[i] - snapped[i - 1]) <= tol:
                raise InvalidArgument("consecutive curve points coincide")
        return cls(snapped, feats, _orientation(snapped))

    def __len__(self):
        return len(self.points)

    def key(self) -> tuple:
        """Tie-break key: fewer points first, then the smallest rotation of the arc parameters."""
        pos = [f.position() for f in self.features]
        rots = [tuple(pos[i:] + pos[:i]) for i in range(len(pos))]
        return (len(pos), min(rots))

    def to_dict(self) -> dict:
        return {
            "points": self.points.tolist(),
            "features": [f.to_dict() for f in self.features],
            "orientation": {1: "ccw", -1: "cw", 0: "none"}[self.orientation],
        }


def _orientation(points: np.ndarray) -> int:
    if len(points) < 3:
        return 0
    a = 0.5 * np.sum(cross(points, np.roll(points, -1, axis=0)))
    return 1 if a > 0 else -1 if a < 0 else 0


def _as_points(curve) -> np.ndarray:
    if isinstance(curve, PolyCurve):
        return curve.points
    return np.asarray(curve, dtype=float).reshape(-1, 2)


def tlength(T: Polygon2, curve) -> float:
    """``sum h_T(q_{i+1} - q_i)`` over the closed cycle."""
    q = _as_points(curve)
    d = np.roll(q, -1, axis=0) - q
    return float(np.sum(support_many(T, d)))


@dataclass
class CapacityResult:
    value: float
    minimizer: PolyCurve
    momenta: np.ndarray | None
    method: str
    classes_examined: int = 0

    def to_dict(self) -> dict:
        return {
            "capacity": self.value,
            "minimizer": self.minimizer.to_dict(),
            "momenta": None if self.momenta is None else self.momenta.tolist(),
            "method": self.method,
        }


# ---------------------------------------------------------------------------
# billiard-law certification


@dataclass
class BilliardVerdict:
    certified: bool
    momenta: np.ndarray | None = None
    reason: str | None = None
    violation: float = 0.0

    def __bool__(self):
        return self.certified


def _support_face(T: Polygon2, d: np.ndarray, tol: float):
    """Endpoints ``(a, b)`` of the face of ``T`` maximising ``<., d>`` (``a == b`` for a vertex)."""
    W = T.vertices
    vals = W @ d
    top = vals.max()
    hit = np.flatnonzero(vals >= top - tol * max(np.linalg.norm(d), 1.0))
    n = len(W)
    if len(hit) == 1:
        return W[hit[0]], W[hit[0]]
    # the hits are cyclically contiguous; find the run's first and last vertex
    hs = set(hit.tolist())
    first = next(i for i in hit if (i - 1) % n not in hs)
    last = next(i for i in hit if (i + 1) % n not in hs)
    return W[first], W[last]


def verify_billiard(K: Polygon2, T: Polygon2, curve, tol: float = 1e-8) -> BilliardVerdict:
    """Search momenta ``p_j`` on the boundary of ``T`` certifying the billiard law.

    ``p_j`` must lie on the face of ``T`` whose normal cone contains
    ``q_{j+1} - q_j``; the remaining freedom (a parameter along each face
    that is an edge) is fixed by a small LP minimising the worst violation of
    ``p_{j+1} - p_j in -N_K(q_{j+1})``.
    """
    q = _as_points(curve)
    m = len(q)
    if m < 2:
        raise InvalidArgument("a closed billiard needs at least two bounce points")
    btol = tol * max(K.scale, 1.0)
    cones = []
    for j in range(m):
        try:
            cones.append(normal_cone(K, q[j], btol))
        except NotOnBoundary:
            raise NotOnBoundary(f"bounce point {j} is not on the boundary of K") from None
    d = np.roll(q, -1, axis=0) - q
    if np.any(np.linalg.norm(d, axis=1) <= btol):
        return BilliardVerdict(False, reason="consecutive bounce points coincide")

    faces = [_support_face(T, d[j], tol * max(T.scale, 1.0)) for j in range(m)]
    var_of = {}
    for j, (a, b) in enumerate(faces):
        if np.linalg.norm(b - a) > 0:
            var_of[j] = len(var_of)
    nv = len(var_of) + 1  # last variable: the violation bound s

    def affine(j):
        """p_j as (constant, coefficient row)."""
        a, b = faces[j]
        row = np.zeros(nv)
        if j in var_of:
            row[var_of[j]] = 1.0
            return a, np.outer(b - a, row)  # 2 x nv
        return a, np.zeros((2, nv))

    rows, rhs, labels = [], [], []
    for j in range(m):
        k = (j + 1) % m
        c0, C0 = affine(j)
        c1, C1 = affine(k)
        const = c1 - c0  # v = const + (C1 - C0) x
        lin = C1 - C0
        cone = cones[k]

        def add(vec_a, vec_b, label):
            # constraint: <vec_a, ...> style scalar = cross/dot expressed as w . v <= s
            rows.append(vec_a)
            rhs.append(vec_b)
            labels.append(label)

        if len(cone.rays) == 1:
            r = cone.rays[0]
            perp = np.array([-r[1], r[0]])  # cross(r, v) = <perp, v>
            for w, lab in ((perp, "parallel"), (-perp, "parallel"), (r, "sign")):
                coeff = w @ lin
                coeff[-1] -= 1.0
                add(coeff, -(w @ const), (k, lab))
        else:
            r1, r2 = cone.rays
            w1 = np.array([-r1[1], r1[0]])  # cross(r1, v) <= s
            w2 = np.array([r2[1], -r2[0]])  # cross(v, r2) <= s
            for w in (w1, w2):
                coeff = w @ lin
                coeff[-1] -= 1.0
                add(coeff, -(w @ const), (k, "sector"))

    c = np.zeros(nv)
    c[-1] = 1.0
    bounds = [(0.0, 1.0)] * (nv - 1) + [(0.0, None)]
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method="highs")
    if res.status != 0:
        raise InternalError(f"momentum LP failed: {res.message}")
    x = res.x
    momenta = []
    for j in range(m):
        a, b = faces[j]
        t = x[var_of[j]] if j in var_of else 0.0
        momenta.append(a + t * (b - a))
    momenta = np.array(momenta)
    s = float(x[-1])
    if s <= tol * max(T.scale, 1.0):
        return BilliardVerdict(True, momenta, violation=s)
    viol = np.array(rows) @ x - np.array(rhs) + s
    worst = int(np.argmax(viol))
    k, lab = labels[worst]
    return BilliardVerdict(
        False,
        None,
        reason=f"p_{k} - p_{(k - 1) % m} not in -N_K(q_{k}) ({lab} condition off by {s:.3g})",
        violation=s,
    )


# ---------------------------------------------------------------------------
# exact minimisation over combinatorial classes


@dataclass
class _Slot:
    """A bounce point: a fixed vertex, or a point moving along an edge."""

    base: np.ndarray
    step: np.ndarray  # zero for fixed slots
    edge: int | None  # edge index for moving slots
    vertex: int | None = None


@dataclass(order=True)
class _Candidate:
    value: float
    key: tuple = field(compare=True)
    points: np.ndarray = field(compare=False, default=None)


def _slots_points(slots, lam: np.ndarray) -> np.ndarray:
    """Bounce points for a batch of parameter vectors; shape (B, m, 2)."""
    B = lam.shape[0]
    out = np.empty((B, len(slots), 2))
    vi = 0
    for i, s in enumerate(slots):
        if s.edge is None:
            out[:, i, :] = s.base
        else:
            out[:, i, :] = s.base + lam[:, vi : vi + 1] * s.step
            vi += 1
    return out


def _cycle_lengths(T: Polygon2, pts: np.ndarray) -> np.ndarray:
    d = np.roll(pts, -1, axis=1) - pts
    return support_many(T, d).sum(axis=1)


def _class_variables(slots) -> dict:
    var_idx = {}
    for i, s in enumerate(slots):
        if s.edge is not None:
            var_idx[i] = len(var_idx)
    return var_idx


def _class_planes(T: Polygon2, slots, var_idx: dict) -> np.ndarray:
    """Box faces plus the kink planes that actually cut the parameter box.

    ``h_T`` kinks where a segment direction is a positive multiple of an edge
    normal ``m`` of ``T``, so a plane ``cross(m, d) = 0`` is kept only if it
    straddles the box and ``<m, d> > 0`` somewhere on it.
    """
    k = len(var_idx)
    planes = []  # rows (a_1..a_k, b): a . lam = b
    for v in range(k):
        for val in (0.0, 1.0):
            row = np.zeros(k + 1)
            row[v] = 1.0
            row[k] = val
            planes.append(row)

    corners = np.array(list(itertools.product((0.0, 1.0), repeat=k)))
    m = len(slots)
    for i in range(m):
        j = (i + 1) % m
        si, sj = slots[i], slots[j]
        if si.edge is None and sj.edge is None:
            continue
        # segment direction at the box corners: d = base + lin . lam
        base = sj.base - si.base
        lin = np.zeros((k, 2))
        if sj.edge is not None:
            lin[var_idx[j]] += sj.step
        if si.edge is not None:
            lin[var_idx[i]] -= si.step
        dirs = base + corners @ lin  # (2^k, 2)
        M = T.normals
        crs = dirs[:, None, 0] * M[None, :, 1] - dirs[:, None, 1] * M[None, :, 0]  # cross(d, m)
        dots = dirs @ M.T
        for r in range(len(M)):
            if crs[:, r].min() > 0 or crs[:, r].max() < 0 or dots[:, r].max() <= 0:
                continue
            mk = M[r]
            row = np.zeros(k + 1)
            row[:k] = mk[0] * lin[:, 1] - mk[1] * lin[:, 0]
            row[k] = -cross(mk, base)
            if np.any(row[:k]):
                planes.append(row)
    return np.array(planes)


def _class_lp_value(T: Polygon2, slots, var_idx: dict) -> float:
    """Class minimum as a linear program: minimise the sum of ``t_i >= <w, d_i>`` over vertices ``w``."""
    k = len(var_idx)
    m = len(slots)
    W = T.vertices
    rows, rhs = [], []
    for i in range(m):
        j = (i + 1) % m
        si, sj = slots[i], slots[j]
        block = np.zeros((len(W), k + m))
        if sj.edge is not None:
            block[:, var_idx[j]] += W @ sj.step
        if si.edge is not None:
            block[:, var_idx[i]] -= W @ si.step
        block[:, k + i] = -1.0
        rows.append(block)
        rhs.append(-(W @ (sj.base - si.base)))
    c = np.r_[np.zeros(k), np.ones(m)]
    bounds = [(0.0, 1.0)] * k + [(None, None)] * m
    res = linprog(c, A_ub=np.vstack(rows), b_ub=np.concatenate(rhs), bounds=bounds, method="highs")
    if res.status != 0:
        raise InternalError(f"class LP failed: {res.message}")
    return float(res.fun)


def _class_minimum(T: Polygon2, slots, var_idx: dict | None = None, planes: np.ndarray | None = None):
    """Candidate parameter vectors and their cycle lengths for one class.

    Enumerates the vertices of the arrangement formed by the parameter box
    and the kink planes ``cross(m_k, q_{i+1} - q_i) = 0``.
    """
    if var_idx is None:
        var_idx = _class_variables(slots)
    k = len(var_idx)
    if k == 0:
        lam = np.zeros((1, 0))
        return lam, _cycle_lengths(T, _slots_points(slots, lam))
    if planes is None:
        planes = _class_planes(T, slots, var_idx)

    combos = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(len(planes)), k)), dtype=np.intp
    ).reshape(-1, k)
    sel = planes[combos]
    A = sel[:, :, :k]
    b = sel[:, :, k]
    det = np.linalg.det(A)
    ok = np.abs(det) > 1e-14
    sol = np.linalg.solve(A[ok], b[ok][..., None])[..., 0]
    inside = np.all((sol >= -1e-12) & (sol <= 1 + 1e-12), axis=1)
    lam = np.clip(sol[inside], 0.0, 1.0)
    lam = np.unique(np.round(lam, 15), axis=0)
    return lam, _cycle_lengths(T, _slots_points(slots, lam))


def _positions(K: Polygon2, slots, lam_row: np.ndarray) -> list[float]:
    """Arc parameters of the bounce points, snapping parameters 0/1 to vertices."""
    n = len(K)
    pos = []
    vi = 0
    for s in slots:
        if s.edge is None:
            pos.append(float(s.vertex))
            continue
        t = float(lam_row[vi])
        vi += 1
        if t <= 1e-12:
            pos.append(float(s.edge))
        elif t >= 1 - 1e-12:
            pos.append(float((s.edge + 1) % n))
        else:
            pos.append(s.edge + t)
    return pos


def _dedupe_cycle(pos: list[float], pts: np.ndarray, tol: float):
    """Drop consecutive coincident bounce points (a 3-cycle collapsing to a 2-cycle)."""
    keep = [i for i in range(len(pos)) if np.linalg.norm(pts[i] - pts[i - 1]) > tol]
    if len(keep) < len(pos) and len(keep) >= 2:
        # re-check cyclic coincidences after removal
        return [pos[i] for i in keep], pts[keep]
    return pos, pts


def _cycle_key(pos: list[float]) -> tuple:
    rots = [tuple(pos[i:] + pos[:i]) for i in range(len(pos))]
    return (len(pos), min(rots))


def _best_in_class(K, T, slots, bound, tie):
    var_idx = _class_variables(slots)
    planes = None
    k = len(var_idx)
    if k:
        planes = _class_planes(T, slots, var_idx)
        # large arrangements are screened by the LP optimum first
        if math.comb(len(planes), k) > LP_SCREEN_COMBOS and bound < math.inf:
            if _class_lp_value(T, slots, var_idx) > bound + LP_MARGIN * K.scale * T.scale:
                return None
    lam, vals = _class_minimum(T, slots, var_idx, planes)
    if len(vals) == 0:
        return None
    vmin = vals.min()
    if vmin > bound + tie:
        return None
    best = None
    pts_all = _slots_points(slots, lam)
    for r in np.flatnonzero(vals <= vmin + tie):
        pos, pts = _dedupe_cycle(_positions(K, slots, lam[r]), pts_all[r], K.tol)
        if len(pos) < 2:
            continue
        cand = _Candidate(float(vals[r]), _cycle_key(pos), pts)
        if best is None or cand.key < best.key:
            best = cand
    if best is not None:
        best.value = float(vmin)
    return best


def _pick(best: _Candidate | None, cand: _Candidate | None, tie: float) -> _Candidate | None:
    if cand is None:
        return best
    if best is None or cand.value < best.value - tie:
        return cand
    if abs(cand.value - best.value) <= tie and cand.key < best.key:
        return _Candidate(min(best.value, cand.value), cand.key, cand.points)
    return best


def _normal_angles(K: Polygon2) -> np.ndarray:
    ang = np.arctan2(K.normals[:, 1], K.normals[:, 0])
    return np.unwrap(ang)


def _edge_slot(K: Polygon2, e: int) -> _Slot:
    return _Slot(K.vertex(e).copy(), K.vertex(e + 1) - K.vertex(e), e)


def _vertex_slot(K: Polygon2, v: int) -> _Slot:
    return _Slot(K.vertex(v).copy(), np.zeros(2), None, v % len(K))


def two_cycle_classes(K: Polygon2):
    """Slot lists for every 2-cycle class whose curves cannot be translated inside ``K``.

    Vertex-to-edge classes need ``-n_e`` in the normal cone of the vertex;
    edge-to-edge classes need antiparallel edge normals.
    """
    n = len(K)
    N = K.normals
    out = []
    for v in range(n):
        r1, r2 = N[(v - 1) % n], N[v]
        for e in range(n):
            if e in (v, (v - 1) % n):
                continue
            u = -N[e]
            if cross(r1, u) >= -1e-12 and cross(u, r2) >= -1e-12:
                out.append([_vertex_slot(K, v), _edge_slot(K, e)])
    for a in range(n):
        for b in range(a + 1, n):
            if np.dot(N[a], N[b]) <= -1 + 1e-12:
                out.append([_edge_slot(K, a), _edge_slot(K, b)])
    return out


def spanning_triples(K: Polygon2) -> np.ndarray:
    """Edge triples ``a < b < c`` whose outer normals contain the origin in their hull."""
    n = len(K)
    if n < 3:
        return np.zeros((0, 3), dtype=int)
    th = _normal_angles(K)
    tri = np.array(list(itertools.combinations(range(n), 3)), dtype=int)
    ta, tb, tc = th[tri[:, 0]], th[tri[:, 1]], th[tri[:, 2]]
    gaps = np.stack([tb - ta, tc - tb, 2 * np.pi - (tc - ta)], axis=1)
    return tri[gaps.max(axis=1) <= np.pi + 1e-12]


def _directed_bounds(K: Polygon2, T: Polygon2) -> np.ndarray:
    """``D[x, y] <= min h_T(q_y - q_x)`` over ``q_x`` on edge ``x``, ``q_y`` on edge ``y``."""
    vals = K.vertices @ T.vertices.T  # (n, nT)
    nxt = np.roll(vals, -1, axis=0)
    emin = np.minimum(vals, nxt)
    emax = np.maximum(vals, nxt)
    D = (emin[None, :, :] - emax[:, None, :]).max(axis=2)
    return np.maximum(D, 0.0)


def _to_result(K, T, best: _Candidate, method: str, examined: int, verify: bool = True) -> CapacityResult:
    curve = PolyCurve.on(K, best.points)
    momenta = None
    if verify:
        verdict = verify_billiard(K, T, curve, tol=10 * K.eps)
        if not verdict:
            raise InternalError(f"minimizer failed billiard certification: {verdict.reason}")
        momenta = verdict.momenta
    return CapacityResult(best.value, curve, momenta, method, examined)


def _check_bodies(K: Polygon2, T: Polygon2):
    if area(K) <= K.tol**2:
        raise InvalidBody("K is degenerate")
    T.require_interior_origin("T")


def min_curve_exact(K: Polygon2, T: Polygon2) -> CapacityResult:
    """Minimal ``T``-length of closed curves in ``P(K)`` with at most 3 vertices."""
    _check_bodies(K, T)
    scale = K.scale * T.scale
    tie = TIE_RTOL * scale
    best = None
    examined = 0
    for slots in two_cycle_classes(K):
        examined += 1
        best = _pick(best, _best_in_class(K, T, slots, math.inf, tie), tie)

    triples = spanning_triples(K)
    if len(triples):
        D = _directed_bounds(K, T)
        a, b, c = triples.T
        lb_fwd = D[a, b] + D[b, c] + D[c, a]
        lb_rev = D[a, c] + D[c, b] + D[b, a]
        classes = [(lb_fwd[i], (a[i], b[i], c[i])) for i in range(len(triples))]
        classes += [(lb_rev[i], (a[i], c[i], b[i])) for i in range(len(triples))]
        classes.sort(key=lambda t: t[0])
        for lb, edges in classes:
            bound = math.inf if best is None else best.value
            if lb > bound + tie:
                break
            examined += 1
            slots = [_edge_slot(K, e) for e in edges]
            best = _pick(best, _best_in_class(K, T, slots, bound, tie), tie)
    if best is None:
        raise InternalError("no admissible closed curve found")
    return _to_result(K, T, best, "exact", examined)


# ---------------------------------------------------------------------------
# brute-force grid oracle


def _grid_points(K: Polygon2, N: int, closed: bool):
    """Boundary samples ``v_i + (j/N) e_i``; with ``closed`` each edge keeps both endpoints."""
    js = np.arange(N + 1 if closed else N) / N
    V = K.vertices
    E = K.edges
    pts = V[:, None, :] + js[None, :, None] * E[:, None, :]
    pos = np.arange(len(K))[:, None] + js[None, :]
    return pts, pos


@numba.njit(cache=True)
def _support_pairs(X, Y, W):
    """``G[i, j] = h_W(Y[j] - X[i])`` for vertex array ``W``."""
    G = np.empty((X.shape[0], Y.shape[0]))
    for i in range(X.shape[0]):
        for j in range(Y.shape[0]):
            dx = Y[j, 0] - X[i, 0]
            dy = Y[j, 1] - X[i, 1]
            m = -np.inf
            for w in range(W.shape[0]):
                v = W[w, 0] * dx + W[w, 1] * dy
                if v > m:
                    m = v
            G[i, j] = m
    return G


@numba.njit(cache=True)
def _two_cycle_scan(P, W, DN, DH, thresh, cutoff):
    """Scan pairs ``i < j`` of grid points blocked by the difference body.

    With ``cutoff = inf`` returns the minimal round-trip length; otherwise
    returns the first pair (in index order) whose length is ``<= cutoff``.
    """
    best = np.inf
    bi = bj = -1
    n = P.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            dx = P[j, 0] - P[i, 0]
            dy = P[j, 1] - P[i, 1]
            g = -np.inf
            for k in range(DN.shape[0]):
                v = (DN[k, 0] * dx + DN[k, 1] * dy) / DH[k]
                if v > g:
                    g = v
            if g < thresh:
                continue
            hp = -np.inf
            hm = -np.inf
            for w in range(W.shape[0]):
                v = W[w, 0] * dx + W[w, 1] * dy
                if v > hp:
                    hp = v
                if -v > hm:
                    hm = -v
            val = hp + hm
            if val <= cutoff:
                return val, i, j
            if val < best:
                best = val
                bi, bj = i, j
    return best, bi, bj


@numba.njit(cache=True)
def _minplus_rows(Gab, Gbc, Gca, rows, bound):
    best = np.inf
    bi = bj = bk = -1
    n = Gab.shape[1]
    for r in range(rows.shape[0]):
        i = rows[r]
        for j in range(n):
            head = Gab[i, j]
            if head >= bound:
                continue
            for k in range(n):
                v = head + Gbc[j, k] + Gca[k, i]
                if v < best:
                    best = v
                    bi, bj, bk = i, j, k
                    if v < bound:
                        bound = v
    return best, bi, bj, bk


def _minplus_cycle(Gab, Gbc, Gca, bound=math.inf):
    """``min over (i, j, k)`` of ``Gab[i,j] + Gbc[j,k] + Gca[k,i]`` and its argmin.

    Rows ``i`` whose lower bound already exceeds ``bound`` are skipped; the
    scan order (``i``, then ``j``, then ``k`` ascending, strict improvement)
    makes the argmin the lexicographically first minimiser.
    """
    row_lb = Gab.min(axis=1) + Gbc.min() + Gca.min(axis=0)
    live = np.flatnonzero(row_lb <= bound).astype(np.int64)
    if len(live) == 0:
        return math.inf, None
    best, i, j, k = _minplus_rows(
        np.ascontiguousarray(Gab), np.ascontiguousarray(Gbc), np.ascontiguousarray(Gca), live, float(bound)
    )
    if i < 0:
        return math.inf, None
    return float(best), (int(i), int(j), int(k))


def min_curve_grid(K: Polygon2, T: Polygon2, samples_per_edge: int) -> CapacityResult:
    """Exhaustive minimum over 2- and 3-cycles drawn from a boundary grid.

    Every edge contributes the points ``j / samples_per_edge`` (all vertices
    included).  A pair ``{a, b}`` cannot be translated into ``int K`` exactly
    when ``b - a`` lies outside ``int(K - K)``.  A triple with no such pair
    must be blocked by three edge lines whose normals contain the origin in
    their convex hull, one point per edge; those edge triples are scanned in
    both cyclic orders.  Triples containing a blocked pair are never shorter
    than that pair's 2-cycle and are skipped.
    """
    if samples_per_edge < 2:
        raise InvalidArgument("samples_per_edge must be at least 2")
    _check_bodies(K, T)
    N = int(samples_per_edge)
    tie = TIE_RTOL * K.scale * T.scale
    examined = 0

    # 2-cycles over all pairs of grid points
    pts, pos = _grid_points(K, N, closed=False)
    P = np.ascontiguousarray(pts.reshape(-1, 2))
    S = pos.reshape(-1)
    DK = difference_body(K)
    W = np.ascontiguousarray(T.vertices)
    args = (P, W, np.ascontiguousarray(DK.normals), np.ascontiguousarray(DK.offsets), 1 - 1e-9)
    vmin, i, j = _two_cycle_scan(*args, math.inf)
    if i < 0:
        raise InternalError("no non-translatable pair on the grid")
    # second pass: lexicographically first pair within the tie tolerance
    _, i, j = _two_cycle_scan(*args, vmin + tie)
    best = _Candidate(float(vmin), _cycle_key([float(S[i]), float(S[j])]), P[[i, j]])
    examined += len(P) * (len(P) - 1) // 2

    # 3-cycles over spanning edge triples
    gpts, gpos = _grid_points(K, N, closed=True)
    n = len(K)
    G = {}

    def gmat(x, y):
        if (x, y) not in G:
            G[(x, y)] = _support_pairs(np.ascontiguousarray(gpts[x]), np.ascontiguousarray(gpts[y]), W)
        return G[(x, y)]

    classes = []
    for a, b, c in spanning_triples(K):
        for e1, e2, e3 in ((a, b, c), (a, c, b)):
            lb = gmat(e1, e2).min() + gmat(e2, e3).min() + gmat(e3, e1).min()
            classes.append((lb, (e1, e2, e3)))
    classes.sort(key=lambda t: t[0])
    for lb, (e1, e2, e3) in classes:
        if lb > best.value + tie:
            break
        examined += 1
        val, arg = _minplus_cycle(gmat(e1, e2), gmat(e2, e3), gmat(e3, e1), best.value + tie)
        if arg is None or val > best.value + tie:
            continue
        i, j, k = arg
        pts3 = np.array([gpts[e1][i], gpts[e2][j], gpts[e3][k]])
        pos3 = [float(gpos[e][t]) % n for e, t in ((e1, i), (e2, j), (e3, k))]
        pos3, pts3 = _dedupe_cycle(pos3, pts3, K.tol)
        best = _pick(best, _Candidate(val, _cycle_key(pos3), pts3), tie)

    if best is None:
        raise InternalError("no non-translatable cycle on the grid")
    if translatable_into_interior(K, best.points):
        raise InternalError("grid minimizer can be translated into the interior")
    curve = PolyCurve.on(K, best.points)
    return CapacityResult(best.value, curve, None, "grid", examined)


# ---------------------------------------------------------------------------
# capacity, systolic ratio, interpolation


def ehz_capacity(K: Polygon2, T: Polygon2) -> float:
    return min_curve_exact(K, T).value


def systolic_ratio(K: Polygon2, T: Polygon2, capacity: float | None = None) -> float:
    """``c^2 / (2 area(K) area(T))`` for the 4-dimensional product ``K x T``."""
    c = ehz_capacity(K, T) if capacity is None else capacity
    return c * c / (2.0 * area(K) * area(T))


@dataclass
class SweepResult:
    table: list  # (lambda, sys) rows on the uniform grid
    root: float
    sys_at_root: float
    bracket: tuple


def interpolation_sweep(L_K, L_T, C_K, C_T, steps: int = 10, tol: float = 1e-6, max_iter: int = 200) -> SweepResult:
    """Systolic ratio along ``(lam L_K + (1-lam) C_K) x (lam L_T + (1-lam) C_T)``.

    Requires ``Sys(L) < 1 < Sys(C)``; bisects the first grid bracket that
    straddles 1 until ``|Sys - 1| <= tol``.
    """
    if steps < 1:
        raise InvalidArgument("steps must be positive")

    def sys_at(lam):
        return systolic_ratio(minkowski_combine(L_K, C_K, lam), minkowski_combine(L_T, C_T, lam))

    lams = np.linspace(0.0, 1.0, steps + 1)
    table = [(float(t), sys_at(float(t))) for t in lams]
    if not (table[-1][1] < 1.0 < table[0][1]):
        raise NoCrossing(f"need Sys(L) < 1 < Sys(C); got Sys(L)={table[-1][1]:.6g}, Sys(C)={table[0][1]:.6g}")
    for (t0, s0), (t1, s1) in zip(table, table[1:]):
        if (s0 - 1.0) * (s1 - 1.0) <= 0:
            break
    lo, hi, slo = t0, t1, s0
    mid, smid = lo, slo
    for _ in range(max_iter):
        if abs(slo - 1.0) <= tol:
            mid, smid = lo, slo
            break
        mid = 0.5 * (lo + hi)
        smid = sys_at(mid)
        if abs(smid - 1.0) <= tol:
            break
        if (smid - 1.0) * (slo - 1.0) > 0:
            lo, slo = mid, smid
        else:
            hi = mid
    else:
        raise InternalError("bisection did not converge")
    return SweepResult(table, float(mid), float(smid), (float(lo), float(hi)))
