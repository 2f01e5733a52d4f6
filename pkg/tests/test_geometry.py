import math
import random

import numpy as np
import pytest

from roadaccess.geometry import (
    PlanePoint,
    Polygon,
    Polyline,
    Segment,
    nearest_point_on_polyline,
    nearest_point_on_segment,
    point_in_polygon,
    polygon_area,
    polygon_centroid,
    rect_polygon_distance,
    segment_distance,
    segment_intersects_polygon,
    segments_intersect,
)


def square(x0, y0, x1, y1):
    return Polygon(
        [PlanePoint(x0, y0), PlanePoint(x1, y0), PlanePoint(x1, y1), PlanePoint(x0, y1)]
    )


def test_plane_point_rejects_non_finite():
    with pytest.raises(ValueError):
        PlanePoint(math.nan, 0.0)
    with pytest.raises(ValueError):
        PlanePoint(0.0, math.inf)


def test_polyline_drops_consecutive_duplicates():
    a, b, c = PlanePoint(0, 0), PlanePoint(1, 0), PlanePoint(2, 0)
    line = Polyline([a, a, b, b, c])
    assert line.vertices == (a, b, c)
    with pytest.raises(ValueError):
        Polyline([a, a])


def test_polygon_enforces_ring_closure():
    ring = [PlanePoint(0, 0), PlanePoint(1, 0), PlanePoint(0, 1)]
    poly = Polygon(ring)
    assert poly.exterior[0] == poly.exterior[-1]
    assert len(poly.exterior) == 4
    with pytest.raises(ValueError):
        Polygon([PlanePoint(0, 0), PlanePoint(1, 0)])


def test_unit_square_centroid():
    assert polygon_centroid(square(0, 0, 1, 1)) == PlanePoint(0.5, 0.5)


def test_l_shape_centroid():
    poly = Polygon(
        [
            PlanePoint(0, 0),
            PlanePoint(2, 0),
            PlanePoint(2, 1),
            PlanePoint(1, 1),
            PlanePoint(1, 2),
            PlanePoint(0, 2),
        ]
    )
    c = polygon_centroid(poly)
    assert c.x == pytest.approx(5.0 / 6.0, abs=1e-12)
    assert c.y == pytest.approx(5.0 / 6.0, abs=1e-12)


def test_degenerate_polygon_falls_back_to_vertex_mean():
    # collinear ring has zero area
    poly = Polygon([PlanePoint(0, 0), PlanePoint(1, 1), PlanePoint(2, 2)])
    assert polygon_centroid(poly) == PlanePoint(1.0, 1.0)


def test_centroid_with_hole():
    poly = Polygon(
        [PlanePoint(0, 0), PlanePoint(4, 0), PlanePoint(4, 4), PlanePoint(0, 4)],
        holes=[[PlanePoint(2, 2), PlanePoint(3, 2), PlanePoint(3, 3), PlanePoint(2, 3)]],
    )
    # (16*(2,2) - 1*(2.5,2.5)) / 15
    c = polygon_centroid(poly)
    assert c.x == pytest.approx(29.5 / 15.0, abs=1e-12)
    assert c.y == pytest.approx(29.5 / 15.0, abs=1e-12)
    assert polygon_area(poly) == pytest.approx(15.0)


def test_centroid_of_convex_polygon_lies_inside():
    rng = random.Random(42)
    for _ in range(200):
        n = rng.randint(3, 9)
        angles = sorted(rng.uniform(0, math.tau) for _ in range(n))
        if min(b - a for a, b in zip(angles, angles[1:])) < 1e-3:
            continue  # nearly repeated vertex, skip degenerate draw
        r = rng.uniform(5.0, 50.0)
        sx, sy = rng.uniform(0.5, 3.0), rng.uniform(0.5, 3.0)
        cx, cy = rng.uniform(-1000, 1000), rng.uniform(-1000, 1000)
        ring = [
            PlanePoint(cx + sx * r * math.cos(t), cy + sy * r * math.sin(t))
            for t in angles
        ]
        poly = Polygon(ring)
        assert point_in_polygon(polygon_centroid(poly), poly)


def test_nearest_point_on_segment_examples():
    s = Segment(PlanePoint(-1, 0), PlanePoint(1, 0))
    q, d = nearest_point_on_segment(PlanePoint(0, 1), s)
    assert q == PlanePoint(0, 0) and d == 1.0
    q, d = nearest_point_on_segment(PlanePoint(5, 1), s)
    assert q == PlanePoint(1, 0)
    assert d == pytest.approx(math.sqrt(17), abs=1e-12)
    q, d = nearest_point_on_segment(PlanePoint(0.25, 0), s)
    assert q == PlanePoint(0.25, 0) and d == 0.0


def test_nearest_point_on_degenerate_segment():
    s = Segment(PlanePoint(2, 2), PlanePoint(2, 2))
    q, d = nearest_point_on_segment(PlanePoint(2, 5), s)
    assert q == PlanePoint(2, 2) and d == 3.0


def test_nearest_point_on_polyline_matches_per_segment_minimum():
    rng = random.Random(7)
    for _ in range(300):
        line = Polyline(
            [PlanePoint(rng.uniform(0, 100), rng.uniform(0, 100)) for _ in range(rng.randint(2, 6))]
        )
        p = PlanePoint(rng.uniform(-50, 150), rng.uniform(-50, 150))
        q, d, idx = nearest_point_on_polyline(p, line)
        per_segment = [
            nearest_point_on_segment(p, seg) for seg in line.segments()
        ]
        best = min(range(len(per_segment)), key=lambda i: (per_segment[i][1], i))
        assert d == per_segment[best][1]
        assert idx == best
        assert q == per_segment[best][0]


def test_nearest_point_on_polyline_tie_takes_lowest_index():
    # p is equidistant from both segments of an L-shaped polyline
    line = Polyline([PlanePoint(0, 0), PlanePoint(1, 0), PlanePoint(1, 1)])
    _, d, idx = nearest_point_on_polyline(PlanePoint(0.5, 0.5), line)
    assert d == 0.5
    assert idx == 0


def test_segments_intersect_touching_counts():
    a, b = PlanePoint(0, 0), PlanePoint(2, 0)
    assert segments_intersect(a, b, PlanePoint(1, 0), PlanePoint(1, 1))  # T-touch
    assert segments_intersect(a, b, PlanePoint(2, 0), PlanePoint(3, 5))  # endpoint
    assert segments_intersect(a, b, PlanePoint(1, 0), PlanePoint(3, 0))  # collinear overlap
    assert not segments_intersect(a, b, PlanePoint(0, 1), PlanePoint(2, 1))
    assert not segments_intersect(a, b, PlanePoint(3, 0), PlanePoint(4, 0))


def test_segment_intersects_polygon_examples():
    box = square(0, 0, 2, 2)
    assert segment_intersects_polygon(
        Segment(PlanePoint(-1, 1), PlanePoint(3, 1)), box
    )
    assert not segment_intersects_polygon(
        Segment(PlanePoint(5, 5), PlanePoint(9, 9)), box
    )
    # both endpoints strictly inside: no edge crossing, endpoint rule applies
    assert segment_intersects_polygon(
        Segment(PlanePoint(0.5, 0.5), PlanePoint(1.5, 1.5)), box
    )
    # boundary touching counts
    assert segment_intersects_polygon(
        Segment(PlanePoint(-1, 0), PlanePoint(0, 0)), box
    )
    assert segment_intersects_polygon(
        Segment(PlanePoint(2, 2), PlanePoint(3, 3)), box
    )


def test_segment_in_hole_does_not_intersect():
    poly = Polygon(
        [PlanePoint(0, 0), PlanePoint(10, 0), PlanePoint(10, 10), PlanePoint(0, 10)],
        holes=[[PlanePoint(3, 3), PlanePoint(7, 3), PlanePoint(7, 7), PlanePoint(3, 7)]],
    )
    assert not segment_intersects_polygon(
        Segment(PlanePoint(4, 5), PlanePoint(6, 5)), poly
    )
    # crossing out of the hole touches the hole ring
    assert segment_intersects_polygon(
        Segment(PlanePoint(4, 5), PlanePoint(9, 5)), poly
    )


def _sampled_intersects(seg: Segment, poly: Polygon, n: int = 10_000) -> bool:
    """Dense-sampling oracle: point-in-polygon over n points along seg."""
    ts = np.linspace(0.0, 1.0, n)
    xs = seg.a.x + ts * (seg.b.x - seg.a.x)
    ys = seg.a.y + ts * (seg.b.y - seg.a.y)
    inside = np.zeros(n, dtype=bool)
    for ring in poly.rings():
        crossings = np.zeros(n, dtype=np.int64)
        for k in range(len(ring) - 1):
            a, b = ring[k], ring[k + 1]
            straddles = (a.y > ys) != (b.y > ys)
            with np.errstate(divide="ignore", invalid="ignore"):
                xcross = a.x + (ys - a.y) * (b.x - a.x) / (b.y - a.y)
            crossings += straddles & (xs < xcross)
        inside ^= (crossings % 2).astype(bool)
    return bool(inside.any())


def _clearance(seg: Segment, poly: Polygon) -> float:
    best = math.inf
    for ring in poly.rings():
        for k in range(len(ring) - 1):
            best = min(best, segment_distance(seg, Segment(ring[k], ring[k + 1])))
    return best


def test_segment_polygon_predicate_agrees_with_sampling_oracle():
    rng = random.Random(2024)
    disagreements = 0
    for _ in range(500):
        cx, cy = rng.uniform(0, 100), rng.uniform(0, 100)
        w, h = rng.uniform(1, 30), rng.uniform(1, 30)
        poly = square(cx, cy, cx + w, cy + h)
        seg = Segment(
            PlanePoint(rng.uniform(-20, 140), rng.uniform(-20, 140)),
            PlanePoint(rng.uniform(-20, 140), rng.uniform(-20, 140)),
        )
        predicted = segment_intersects_polygon(seg, poly)
        sampled = _sampled_intersects(seg, poly)
        if predicted != sampled:
            disagreements += 1
            if predicted and not sampled:
                # sampling may miss a sliver crossing: clearance must be ~0
                assert _clearance(seg, poly) < 1e-9
            else:
                pytest.fail("sampling found interior point but predicate said no")
    # transversal scenes should almost never disagree
    assert disagreements <= 5


def test_rect_polygon_distance():
    poly = square(0, 0, 1000, 1000)
    assert rect_polygon_distance((100, 100, 200, 200), poly) == 0.0  # inside
    assert rect_polygon_distance((900, 900, 1100, 1100), poly) == 0.0  # overlap
    assert rect_polygon_distance((1300, 0, 1400, 100), poly) == pytest.approx(300.0)
    assert rect_polygon_distance((1600, 0, 1700, 100), poly) == pytest.approx(600.0)
    # rect containing the whole polygon
    assert rect_polygon_distance((-10, -10, 1010, 1010), poly) == 0.0
