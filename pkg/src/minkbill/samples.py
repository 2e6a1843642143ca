"""Seeded random convex polygons for test suites and batch experiments."""

import numpy as np

from .geometry import Polygon2


def random_convex_polygon(rng: np.random.Generator, n_vertices: int, min_gap: float = 0.15) -> Polygon2:
    """Random convex ``n``-gon containing the origin in its interior.

    Vertices sit on an ellipse at sorted random angles (consecutive gaps at
    least ``min_gap`` radians, no gap reaching pi), then the polygon is
    rotated and shifted by a small offset that keeps the origin inside.
    """
    while True:
        ang = np.sort(rng.uniform(0, 2 * np.pi, n_vertices))
        gaps = np.diff(np.append(ang, ang[0] + 2 * np.pi))
        if gaps.min() < min_gap or gaps.max() >= np.pi - 0.2:
            continue
        axes = rng.uniform(0.6, 1.4, 2)
        pts = np.column_stack([axes[0] * np.cos(ang), axes[1] * np.sin(ang)])
        th = rng.uniform(0, 2 * np.pi)
        rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        pts = pts @ rot.T + rng.uniform(-0.15, 0.15, 2)
        P = Polygon2(pts)
        if len(P) == n_vertices and np.all(P.offsets > 0.1):
            return P


def random_pair(seed: int, lo: int = 5, hi: int = 8):
    rng = np.random.default_rng(seed)
    K = random_convex_polygon(rng, int(rng.integers(lo, hi + 1)))
    T = random_convex_polygon(rng, int(rng.integers(lo, hi + 1)))
    return K, T
