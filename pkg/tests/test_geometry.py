import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull
from shapely.geometry import Polygon as ShapelyPolygon

from conftest import polygon_from_seed, seeds, v
from minkbill.errors import InvalidArgument, InvalidBody, NotOnBoundary
from minkbill.geometry import (
    Polygon2,
    area,
    gauge,
    locate,
    minkowski_combine,
    normal_cone,
    perimeter,
    polar,
    polygon_from_dict,
    polygon_to_json,
    read_polygon,
    regular_polygon,
    support,
    transform,
    translatable_into_interior,
    write_polygon,
)


def angle(u):
    return math.atan2(u[1], u[0])


def same_vertex_set(P, pts, tol=1e-12):
    pts = np.asarray(pts)
    return len(P) == len(pts) and all(np.min(np.linalg.norm(pts - x, axis=1)) <= tol for x in P.vertices)


# -- construction ------------------------------------------------------------


def test_regular_pentagon_vertices(K):
    assert same_vertex_set(K, [v(k) for k in range(5)])


def test_rotated_pentagon_has_w0_at_bottom(T):
    assert np.allclose(T.vertices[0], [0.0, -1.0], atol=1e-15)


def test_square_from_regular_polygon():
    S = regular_polygon(4, math.sqrt(2), math.pi / 4)
    assert same_vertex_set(S, [(1, 1), (-1, 1), (-1, -1), (1, -1)], 1e-12)


@pytest.mark.parametrize("sides,radius", [(2, 1.0), (5, 0.0), (5, -1.0)])
def test_regular_polygon_rejects_bad_arguments(sides, radius):
    with pytest.raises(InvalidArgument):
        regular_polygon(sides, radius)


def test_canonical_order_is_ccw_from_lowest_leftmost():
    P = Polygon2([(1, 1), (1, -1), (-1, -1), (-1, 1)])  # clockwise input
    assert np.allclose(P.vertices, [(-1, -1), (1, -1), (1, 1), (-1, 1)])


def test_collinear_vertices_are_merged():
    P = Polygon2([(0, 0), (1, 0), (2, 0), (2, 2), (0, 2)])
    assert len(P) == 4


@pytest.mark.parametrize(
    "pts",
    [
        [(0, 0), (1, 0)],
        [(0, 0), (1, 0), (2, 0)],
        [(0, 0), (2, 0), (1, 0.5), (2, 2), (0, 2)],
    ],
)
def test_invalid_polygons_rejected(pts):
    with pytest.raises(InvalidArgument):
        Polygon2(pts)


# -- support, gauge, polar -----------------------------------------------------


def test_support_examples(K, T):
    assert support(T, (0, 0)) == 0
    # oracle: maximum of the five dot products, enumerated by hand
    assert support(T, (1, 0)) == pytest.approx(max(math.cos(-math.pi / 2 + 2 * math.pi * k / 5) for k in range(5)))
    assert support(T, (1, 0)) == pytest.approx(math.cos(math.pi / 10), abs=1e-15)
    assert support(K, (1, 0)) == pytest.approx(1.0, abs=1e-15)


def test_gauge_examples(K):
    assert gauge(K, (0, 0)) == 0
    assert gauge(K, v(2)) == pytest.approx(1.0, abs=1e-12)
    assert gauge(K, 0.5 * v(0)) == pytest.approx(0.5, abs=1e-12)


def test_gauge_needs_interior_origin(K):
    with pytest.raises(InvalidBody):
        gauge(K.translated((5, 0)), (1, 0))
    with pytest.raises(InvalidBody):
        polar(K.translated((1, 0)))


def test_polar_of_square_is_cross_polytope(square, cross_polytope):
    assert polar(square) == cross_polytope


def halfspace_polar(P):
    """Oracle: intersect consecutive dual lines <x, v_i> = 1 directly."""
    V = P.vertices
    out = []
    for i in range(len(V)):
        A = np.array([V[i], V[(i + 1) % len(V)]])
        out.append(np.linalg.solve(A, np.ones(2)))
    return np.array(out)


def test_polar_of_pentagon(K):
    PK = polar(K)
    r = 1 / math.cos(math.pi / 5)
    assert PK.circumradius() == pytest.approx(1.2360680, abs=1e-7)
    assert same_vertex_set(PK, halfspace_polar(K), 1e-12)
    angles = sorted(np.mod([angle(x) for x in PK.vertices], 2 * math.pi))
    expected = sorted(np.mod([math.pi / 5 + 2 * math.pi * k / 5 for k in range(5)], 2 * math.pi))
    assert np.allclose(angles, expected, atol=1e-12)
    assert np.allclose(np.linalg.norm(PK.vertices, axis=1), r, atol=1e-12)


def test_bipolar_pentagon(K):
    assert polar(polar(K)) == K


# -- normal cones ----------------------------------------------------------------


def test_normal_cone_on_edge(K):
    c = normal_cone(K, 0.5 * (v(0) + v(1)))
    assert len(c.rays) == 1
    assert angle(c.rays[0]) == pytest.approx(math.pi / 5, abs=1e-12)


def test_normal_cone_at_vertex(K, square):
    c = normal_cone(K, v(0))
    assert [angle(r) for r in c.rays] == pytest.approx([-math.pi / 5, math.pi / 5], abs=1e-12)
    c = normal_cone(square, (1, 1))
    assert np.allclose(c.rays, [(1, 0), (0, 1)])


def test_normal_cone_off_boundary(K):
    with pytest.raises(NotOnBoundary):
        normal_cone(K, (0.2, 0.1))


# -- translatability ---------------------------------------------------------------


def shapely_translatable(P, points, tol):
    """Oracle: shapely intersection of the translates q_i - P."""
    region = None
    for q in points:
        poly = ShapelyPolygon([tuple(q - x) for x in P.vertices])
        region = poly if region is None else region.intersection(poly)
    if region.is_empty or region.area == 0:
        return False
    return 2 * region.area / region.length > tol


def test_translatable_examples(K):
    r = translatable_into_interior(K, [(0, 0)])
    assert r.translatable
    assert np.allclose(r.witness, 0, atol=1e-12)
    assert not translatable_into_interior(K, [v(0), v(2)])
    assert translatable_into_interior(K, [v(0), 0.5 * v(2)])
    assert shapely_translatable(K, [v(0), 0.5 * v(2)], K.tol)


def test_translatable_witness_works(K):
    pts = np.array([v(0), 0.5 * v(2), 0.3 * v(3)])
    r = translatable_into_interior(K, pts)
    assert r.translatable
    assert all(K.contains(q - r.witness, strict=True) for q in pts)


def test_translatable_needs_points(K):
    with pytest.raises(InvalidArgument):
        translatable_into_interior(K, [])


@given(seeds, st.integers(1, 4))
def test_translatability_matches_polygon_intersection_oracle(seed, m):
    P = polygon_from_seed(seed)
    rng = np.random.default_rng(seed + 1)
    pts = rng.uniform(-1.2, 1.2, (m, 2))
    assert bool(translatable_into_interior(P, pts)) == shapely_translatable(P, pts, P.tol)


@given(seeds, st.integers(2, 5))
def test_translatability_monotone_under_subsets(seed, m):
    P = polygon_from_seed(seed)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1, 1, (m, 2))
    if translatable_into_interior(P, pts):
        for i in range(m):
            assert translatable_into_interior(P, np.delete(pts, i, axis=0))


@given(seeds, st.floats(0, 2 * math.pi), st.integers(1, 4))
def test_translatability_rotation_equivariant(seed, theta, m):
    P = polygon_from_seed(seed)
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-1.2, 1.2, (m, 2))
    R = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    assert bool(translatable_into_interior(P, pts)) == bool(translatable_into_interior(P.rotated(theta), pts @ R.T))


# -- transforms and Minkowski combinations ---------------------------------------------


def test_transform_examples(K):
    assert transform(K, scale=2.0) == Polygon2(2 * K.vertices)
    assert transform(K, translate=(1, 2)) == Polygon2(K.vertices + [1, 2])
    assert transform(K, rotate=2 * math.pi / 5) == K
    with pytest.raises(InvalidArgument):
        transform(K, scale=0.0)


def test_minkowski_combine_examples(K, square, cross_polytope):
    assert minkowski_combine(K, K, 0.5) == K
    assert minkowski_combine(square, cross_polytope, 1.0) == square
    assert minkowski_combine(square, cross_polytope, 0.0) == cross_polytope


def hull_area(A, B, lam):
    """Oracle: area of the convex hull of all pairwise vertex combinations."""
    pts = (lam * A.vertices[:, None, :] + (1 - lam) * B.vertices[None, :, :]).reshape(-1, 2)
    return ConvexHull(pts).volume


def test_square_cross_combination_is_octagon(square, cross_polytope):
    S = minkowski_combine(square, cross_polytope, 0.5)
    assert len(S) == 8
    assert area(S) == pytest.approx(3.5, abs=1e-12)
    assert hull_area(square, cross_polytope, 0.5) == pytest.approx(3.5, abs=1e-12)


@given(seeds, st.floats(0.0, 1.0))
def test_minkowski_combine_matches_hull(seed, lam):
    A, B = polygon_from_seed(seed), polygon_from_seed(seed + 7)
    S = minkowski_combine(A, B, lam)
    assert len(S) <= len(A) + len(B)
    # edges shorter than eps*scale are merged, moving the boundary by at most that much
    slack = 10 * S.tol * perimeter(S)
    assert area(S) == pytest.approx(hull_area(A, B, lam), rel=1e-12, abs=slack)


def test_minkowski_combine_rejects_lambda(K):
    with pytest.raises(InvalidArgument):
        minkowski_combine(K, K, 1.5)


# -- areas --------------------------------------------------------------------------


def test_area_examples(K, square):
    assert area(K) == pytest.approx(2.5 * math.sin(2 * math.pi / 5), abs=1e-15)
    assert area(K) == pytest.approx(2.3776413, abs=1e-7)
    assert area(square) == 4
    # oracle: shoelace over the independently computed polar vertices
    pv = halfspace_polar(K)
    shoelace = 0.5 * abs(np.sum(pv[:, 0] * np.roll(pv[:, 1], -1) - pv[:, 1] * np.roll(pv[:, 0], -1)))
    assert area(polar(K)) == pytest.approx(shoelace, rel=1e-13)
    assert area(polar(K)) == pytest.approx(2.5 * math.sin(2 * math.pi / 5) / math.cos(math.pi / 5) ** 2, rel=1e-13)


# -- properties ----------------------------------------------------------------------


@given(seeds)
def test_support_homogeneous_and_subadditive(seed):
    P = polygon_from_seed(seed)
    rng = np.random.default_rng(seed)
    for u, w_, lam in zip(rng.normal(size=(20, 2)), rng.normal(size=(20, 2)), rng.uniform(0, 5, 20)):
        assert support(P, lam * u) == pytest.approx(lam * support(P, u), rel=1e-12, abs=1e-14)
        assert support(P, u + w_) <= support(P, u) + support(P, w_) + 1e-12 * (1 + np.abs(u).sum() + np.abs(w_).sum())


@given(seeds)
def test_support_equals_gauge_of_polar(seed):
    P = polygon_from_seed(seed)
    PP = polar(P)
    rng = np.random.default_rng(seed)
    for u in rng.normal(size=(1000, 2)):
        assert abs(support(P, u) - gauge(PP, u)) <= 1e-9 * np.linalg.norm(u)


@given(seeds)
def test_bipolar(seed):
    P = polygon_from_seed(seed)
    Q = polar(polar(P))
    assert len(Q) == len(P)
    assert np.max(np.abs(Q.vertices - P.vertices)) <= 1e-9


@given(seeds)
def test_gauge_is_one_on_boundary(seed):
    P = polygon_from_seed(seed)
    rng = np.random.default_rng(seed)
    for i, lam in zip(rng.integers(len(P), size=10), rng.uniform(0, 1, 10)):
        assert gauge(P, P.edge_point(i, lam)) == pytest.approx(1.0, abs=1e-12)
        f = locate(P, P.edge_point(i, lam))
        assert f.kind == "vertex" or f.index == i


# -- JSON --------------------------------------------------------------------------


@given(seeds)
def test_json_round_trip_is_exact(seed):
    P = polygon_from_seed(seed)
    Q = polygon_from_dict(json.loads(polygon_to_json(P)))
    assert np.array_equal(P.vertices, Q.vertices)


def test_read_write_polygon(tmp_path, K):
    path = tmp_path / "k.json"
    write_polygon(K, path)
    assert np.array_equal(read_polygon(path).vertices, K.vertices)
    path.write_text("{not json")
    with pytest.raises(InvalidArgument):
        read_polygon(path)
    path.write_text('{"points": []}')
    with pytest.raises(InvalidArgument):
        read_polygon(path)
