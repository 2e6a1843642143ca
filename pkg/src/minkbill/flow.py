"""Polygonal T-billiard (Reeb) dynamics on the boundary of ``K x T``.

The characteristic flow of ``max(g_K(q), g_T(p))`` alternates two straight
motions: ``q`` runs along the outer normal of the edge of ``T`` carrying
``p`` until it reaches the boundary of ``K``, then ``p`` runs along minus the
outer normal of the edge of ``K`` carrying ``q`` until it reaches the boundary
of ``T``.  Vertices are never flowed through.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CornerHit, InvalidArgument, UndefinedCone, UnfoldUnsupported
from .geometry import Feature, Polygon2, locate, support_many

Q_MOVING = "q-moving"
P_MOVING = "p-moving"
PERIODIC_TOL = 1e-9


@dataclass(frozen=True)
class FlowState:
    q: np.ndarray
    p: np.ndarray
    phase: str
    q_feature: Feature
    p_feature: Feature

    @classmethod
    def at(cls, K: Polygon2, T: Polygon2, q, p, phase: str = Q_MOVING) -> "FlowState":
        """Build a state, locating (and snapping) ``q`` on ``K`` and ``p`` on ``T``."""
        if phase not in (Q_MOVING, P_MOVING):
            raise InvalidArgument(f"unknown phase {phase!r}")
        q = np.asarray(q, dtype=float)
        p = np.asarray(p, dtype=float)
        fq = locate(K, q)
        fp = locate(T, p)
        return cls(_snap(K, fq), _snap(T, fp), phase, fq, fp)

    def to_dict(self) -> dict:
        return {
            "q": self.q.tolist(),
            "p": self.p.tolist(),
            "phase": self.phase,
            "q_feature": self.q_feature.to_dict(),
            "p_feature": self.p_feature.to_dict(),
        }


def _snap(P: Polygon2, f: Feature) -> np.ndarray:
    if f.kind == "vertex":
        return P.vertex(f.index).copy()
    return P.edge_point(f.index, f.lam)


def _driving_edge(P: Polygon2, f: Feature, what: str) -> int:
    if f.kind != "edge":
        raise UndefinedCone(f"{what} sits on vertex {f.index}; its normal cone is not a single ray")
    return f.index


def _cast(P: Polygon2, x: np.ndarray, u: np.ndarray, step: int) -> tuple[np.ndarray, Feature]:
    """Exit point of the ray ``x + t u`` (t > 0) from ``P`` and its feature."""
    N, h = P.normals, P.offsets
    rate = N @ u
    tol = P.tol
    ahead = rate > tol
    if not np.any(ahead):
        raise InvalidArgument("flow direction is zero")
    t = (h[ahead] - N[ahead] @ x) / rate[ahead]
    if t.min() <= tol:
        raise InvalidArgument("flow direction leaves the body immediately")
    order = np.sort(t)
    if len(order) > 1 and order[1] - order[0] <= tol:
        raise CornerHit(f"ray reaches a vertex at step {step}", step)
    y = x + order[0] * u
    edge = int(np.flatnonzero(ahead)[np.argmin(t)])
    a, b = P.vertex(edge), P.vertex(edge + 1)
    lam = float(np.dot(y - a, b - a) / np.dot(b - a, b - a))
    L = float(np.linalg.norm(b - a))
    if lam * L <= tol or (1 - lam) * L <= tol:
        raise CornerHit(f"ray reaches a vertex at step {step}", step)
    return a + lam * (b - a), Feature("edge", edge, lam)


def step(K: Polygon2, T: Polygon2, s: FlowState, index: int = 0) -> FlowState:
    """Advance one straight motion; ``index`` only labels corner-hit errors."""
    if s.phase == Q_MOVING:
        e = _driving_edge(T, s.p_feature, "p")
        q, fq = _cast(K, s.q, T.normals[e], index)
        return FlowState(q, s.p, P_MOVING, fq, s.p_feature)
    e = _driving_edge(K, s.q_feature, "q")
    p, fp = _cast(T, s.p, -K.normals[e], index)
    return FlowState(s.q, p, Q_MOVING, s.q_feature, fp)


def _same_state(a: FlowState, b: FlowState, tol: float) -> bool:
    if a.phase != b.phase:
        return False
    for fa, fb in ((a.q_feature, b.q_feature), (a.p_feature, b.p_feature)):
        if fa.kind != fb.kind or fa.index != fb.index or abs(fa.lam - fb.lam) > tol:
            return False
    return True


@dataclass
class Trajectory:
    """Bounce record ``(q_j, p_j)``: ``p_j`` drives the segment ``q_j -> q_{j+1}``."""

    q: np.ndarray
    p: np.ndarray
    verdict: str  # periodic | corner-hit | open
    period: int | None = None
    tlength: float | None = None
    action: float | None = None
    step: int | None = None
    features: list = field(default_factory=list)

    @property
    def periodic(self) -> bool:
        return self.verdict == "periodic"

    @property
    def bounces(self) -> list:
        return list(zip(self.q, self.p))

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "q": self.q.tolist(), "p": self.p.tolist()}
        for key in ("period", "tlength", "action", "step"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out


def orbit_tlength(T: Polygon2, q: np.ndarray) -> float:
    d = np.roll(q, -1, axis=0) - q
    return float(support_many(T, d).sum())


def orbit_action(q: np.ndarray, p: np.ndarray) -> float:
    d = np.roll(q, -1, axis=0) - q
    return float(np.einsum("ij,ij->", p, d))


def simulate(
    K: Polygon2,
    T: Polygon2,
    s0: FlowState,
    max_bounces: int = 10000,
    tol: float = PERIODIC_TOL,
    on_corner: str = "raise",
) -> Trajectory:
    """Iterate :func:`step` until the first q-moving state recurs.

    ``on_corner="record"`` turns a corner hit into a ``corner-hit`` verdict
    instead of raising :class:`CornerHit`.
    """
    if max_bounces < 1:
        raise InvalidArgument("max_bounces must be positive")
    s = s0
    n_steps = 0
    try:
        if s.phase == P_MOVING:
            s = step(K, T, s, 0)
            n_steps = 1
        start = s
        qs, ps, feats = [], [], []
        while len(qs) < max_bounces:
            qs.append(s.q)
            ps.append(s.p)
            feats.append((s.q_feature, s.p_feature))
            s = step(K, T, s, n_steps)
            s = step(K, T, s, n_steps + 1)
            n_steps += 2
            if _same_state(s, start, tol):
                q, p = np.array(qs), np.array(ps)
                return Trajectory(
                    q, p, "periodic", len(qs), orbit_tlength(T, q), orbit_action(q, p), features=feats
                )
    except CornerHit as exc:
        if on_corner != "record":
            raise
        q = np.array(qs) if n_steps and qs else np.array([s0.q])
        p = np.array(ps) if n_steps and ps else np.array([s0.p])
        return Trajectory(q, p, "corner-hit", step=exc.step)
    return Trajectory(np.array(qs), np.array(ps), "open", features=feats)


def default_momentum(T: Polygon2, direction) -> np.ndarray:
    """Midpoint of the edge of ``T`` whose outer normal best matches ``direction``."""
    d = np.asarray(direction, dtype=float)
    if not np.any(d):
        raise InvalidArgument("initial direction must be nonzero")
    e = int(np.argmax(T.normals @ d))
    return T.edge_point(e, 0.5)


def admissible_momentum_edges(K: Polygon2, T: Polygon2, q_edge: int) -> np.ndarray:
    """Edges of ``T`` whose normal points from the ``q_edge`` of ``K`` into ``K``."""
    return np.flatnonzero(T.normals @ K.normals[q_edge] < -T.tol)


def random_start(K: Polygon2, T: Polygon2, rng: np.random.Generator) -> FlowState:
    e = int(rng.integers(len(K)))
    lam = float(rng.uniform(0.0, 1.0))
    choices = admissible_momentum_edges(K, T, e)
    f = int(choices[rng.integers(len(choices))])
    mu = float(rng.uniform(0.0, 1.0))
    q = K.edge_point(e, lam)
    p = T.edge_point(f, mu)
    return FlowState(q, p, Q_MOVING, Feature("edge", e, lam), Feature("edge", f, mu))


def midpoint_starts(K: Polygon2, T: Polygon2) -> list[FlowState]:
    """Edge-midpoint positions paired with the midpoints of every admissible momentum edge."""
    out = []
    for e in range(len(K)):
        for f in admissible_momentum_edges(K, T, e):
            q, p = K.edge_point(e, 0.5), T.edge_point(int(f), 0.5)
            out.append(FlowState(q, p, Q_MOVING, Feature("edge", e, 0.5), Feature("edge", int(f), 0.5)))
    return out


@dataclass
class LengthClass:
    period: int
    tlength: float
    count: int


@dataclass
class ClassReport:
    classes: list[LengthClass]
    trajectories: list[Trajectory]
    corner_hits: int
    open_orbits: int

    def keys(self) -> set:
        return {(c.period, c.tlength) for c in self.classes}


def cluster_lengths(trajs, tol: float = 1e-6) -> list[LengthClass]:
    """Group periodic trajectories by period, then by tlength within ``tol``."""
    out: list[LengthClass] = []
    for tr in sorted(trajs, key=lambda t: (t.period, t.tlength)):
        last = out[-1] if out else None
        if last is not None and last.period == tr.period and tr.tlength - last.tlength <= tol:
            last.count += 1
        else:
            out.append(LengthClass(tr.period, tr.tlength, 1))
    return out


def length_classes(
    K: Polygon2,
    T: Polygon2,
    n_starts: int,
    seed: int = 0,
    *,
    include_midpoints: bool = False,
    max_bounces: int = 10000,
    tol: float = 1e-6,
    max_resamples: int | None = None,
) -> ClassReport:
    """Simulate ``n_starts`` seeded random generic starts and cluster their lengths.

    Starts ending in a corner hit are resampled and counted.
    """
    if n_starts < 1:
        raise InvalidArgument("n_starts must be at least 1")
    rng = np.random.Generator(np.random.Philox(seed))
    budget = max_resamples if max_resamples is not None else 10 * n_starts
    trajs, corners, opened = [], 0, 0
    while len(trajs) + opened < n_starts:
        try:
            tr = simulate(K, T, random_start(K, T, rng), max_bounces)
        except CornerHit:
            corners += 1
            if corners > budget:
                break
            continue
        if tr.periodic:
            trajs.append(tr)
        else:
            opened += 1
    if include_midpoints:
        for s in midpoint_starts(K, T):
            try:
                tr = simulate(K, T, s, max_bounces)
            except CornerHit:
                corners += 1
                continue
            if tr.periodic:
                trajs.append(tr)
    return ClassReport(cluster_lengths(trajs, tol), trajs, corners, opened)


# ---------------------------------------------------------------------------
# unfolding


def reflection_defects(K: Polygon2, q: np.ndarray) -> np.ndarray:
    """Euclidean reflection-law defect at every bounce of a closed orbit."""
    m = len(q)
    out = np.empty(m)
    for j in range(m):
        d_in = q[j] - q[j - 1]
        d_out = q[(j + 1) % m] - q[j]
        f = locate(K, q[j])
        if f.kind != "edge":
            out[j] = np.inf
            continue
        n = K.normals[f.index]
        r = d_in / np.linalg.norm(d_in)
        mirrored = r - 2 * np.dot(r, n) * n
        out[j] = np.linalg.norm(mirrored - d_out / np.linalg.norm(d_out))
    return out


def _reflection(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Affine reflection ``x -> R x + c`` across the line through ``a`` and ``b``."""
    u = (b - a) / np.linalg.norm(b - a)
    R = 2 * np.outer(u, u) - np.eye(2)
    return R, a - R @ a


@dataclass
class Unfolding:
    copies: list[np.ndarray]  # vertex arrays of the reflected tables
    points: np.ndarray  # unfolded bounce points, closing point included

    @property
    def length(self) -> float:
        return float(np.linalg.norm(np.diff(self.points, axis=0), axis=1).sum())

    def deviation(self) -> float:
        """Largest distance of an unfolded point from the chord through the ends, over its length."""
        a, b = self.points[0], self.points[-1]
        L = np.linalg.norm(b - a)
        dev = np.abs((self.points[:, 0] - a[0]) * (b - a)[1] - (self.points[:, 1] - a[1]) * (b - a)[0]) / L
        return float(dev.max() / L)


def unfold(K: Polygon2, trajectory: Trajectory, tol: float = 1e-9) -> Unfolding:
    """Mirror-unfold a periodic orbit with Euclidean reflections into a segment chain."""
    if not trajectory.periodic:
        raise UnfoldUnsupported("only periodic trajectories can be unfolded")
    q = trajectory.q
    defects = reflection_defects(K, q)
    if np.any(defects > tol):
        j = int(np.argmax(defects))
        raise UnfoldUnsupported(f"bounce {j} does not follow the Euclidean reflection law")
    m = len(q)
    R, c = np.eye(2), np.zeros(2)
    copies = []
    points = [q[0].copy()]
    for j in range(m):
        copies.append(K.vertices @ R.T + c)
        nxt = q[(j + 1) % m]
        points.append(R @ nxt + c)
        e = locate(K, nxt).index
        Rj, cj = _reflection(K.vertex(e), K.vertex(e + 1))
        R, c = R @ Rj, R @ cj + c
    return Unfolding(copies, np.array(points))


def initial_state(K: Polygon2, T: Polygon2, q0, direction=None, p0=None) -> FlowState:
    """Start state from a boundary point and either a momentum or a direction."""
    if p0 is None:
        if direction is None:
            raise InvalidArgument("give an initial momentum or direction")
        p0 = default_momentum(T, direction)
    return FlowState.at(K, T, q0, p0, Q_MOVING)


__all__ = [
    "FlowState",
    "Trajectory",
    "Unfolding",
    "LengthClass",
    "ClassReport",
    "step",
    "simulate",
    "length_classes",
    "unfold",
    "initial_state",
    "default_momentum",
    "random_start",
    "midpoint_starts",
    "cluster_lengths",
    "reflection_defects",
    "orbit_tlength",
    "orbit_action",
]
