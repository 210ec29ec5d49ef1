import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pydantic import ValidationError

from geometry.euclid import (
    contains,
    distance,
    law_of_cosines_sq,
    max_circular_gap,
    nearest_in_cloud,
    project,
)
from schemas.projector_schemas import (
    BallSpec,
    BoxSpec,
    HalfspaceSpec,
    PointsSpec,
    SegmentSpec,
    SphereSpec,
    UnionSpec,
    dump_projector,
    parse_projector,
)
from spiral.curve import curve
from utils.errors import DegenerateProjection, DimensionMismatch, DomainError, EmptyCloud

coord = st.floats(min_value=-10, max_value=10, allow_nan=False, allow_infinity=False)


def points(dim):
    return st.lists(coord, min_size=dim, max_size=dim)


@st.composite
def convex_specs(draw):
    dim = draw(st.integers(1, 4))
    kind = draw(st.sampled_from(["ball", "box", "halfspace", "segment", "point"]))
    if kind == "ball":
        return BallSpec(center=draw(points(dim)), radius=draw(st.floats(0.1, 5)))
    if kind == "box":
        lo = draw(points(dim))
        widths = draw(st.lists(st.floats(0, 5), min_size=dim, max_size=dim))
        return BoxSpec(lower=lo, upper=[a + w for a, w in zip(lo, widths)])
    if kind == "halfspace":
        raw = np.array(draw(points(dim)))
        if np.linalg.norm(raw) < 1e-3:
            raw = np.ones(dim)
        normal = raw / np.linalg.norm(raw)
        return HalfspaceSpec(normal=normal.tolist(), offset=draw(coord))
    if kind == "segment":
        return SegmentSpec(a=draw(points(dim)), b=draw(points(dim)))
    return PointsSpec(coords=[draw(points(dim))])


@st.composite
def spec_and_query(draw, specs=convex_specs()):
    spec = draw(specs)
    return spec, draw(points(spec.dim))


@st.composite
def any_specs(draw):
    base = draw(convex_specs())
    dim = base.dim
    kind = draw(st.sampled_from(["convex", "sphere", "cloud", "union"]))
    if kind == "sphere":
        return SphereSpec(center=draw(points(dim)), radius=draw(st.floats(0.1, 5)))
    if kind == "cloud":
        return PointsSpec(coords=draw(st.lists(points(dim), min_size=1, max_size=6)))
    if kind == "union":
        return UnionSpec(members=[base, PointsSpec(coords=draw(st.lists(points(dim), min_size=1, max_size=4)))])
    return base


class TestDistance:
    def test_sphere_radial(self):
        assert distance(SphereSpec(center=[0, 0], radius=1), [2, 0]) == 1.0

    def test_sphere_distance_of_curve_start_is_exp_minus_alpha(self):
        assert distance(SphereSpec(center=[0, 0], radius=1), curve(0.0)) == pytest.approx(math.exp(-0.0))

    def test_union_takes_nearer_member(self):
        union = UnionSpec(members=[PointsSpec(coords=[[0, 0], [3, 0]])])
        assert distance(union, [1, 0]) == 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            distance(BallSpec(center=[0, 0], radius=1), [1, 2, 3])

    def test_nonfinite_query_rejected(self):
        with pytest.raises(DomainError):
            distance(BallSpec(center=[0, 0], radius=1), [math.nan, 0])


class TestProject:
    def test_ball_outside(self):
        result = project(BallSpec(center=[0, 0], radius=1), [2, 0])
        assert np.array_equal(result.point, [1.0, 0.0])
        assert result.distance == 1.0
        assert not result.multivalued

    def test_ball_inside_is_identity(self):
        result = project(BallSpec(center=[0, 0], radius=1), [0.3, -0.2])
        assert np.array_equal(result.point, [0.3, -0.2])
        assert result.distance == 0.0

    def test_sphere(self):
        result = project(SphereSpec(center=[0, 0], radius=1), [3, 4])
        assert result.point == pytest.approx([0.6, 0.8])
        assert result.distance == pytest.approx(4.0)

    def test_sphere_center_is_degenerate(self):
        with pytest.raises(DegenerateProjection):
            project(SphereSpec(center=[1, 1], radius=2), [1, 1])

    def test_box_clamps(self):
        result = project(BoxSpec(lower=[0, 0], upper=[1, 1]), [3, 0.5])
        assert np.array_equal(result.point, [1.0, 0.5])

    def test_halfspace(self):
        # {x : x_1 >= 1}
        spec = HalfspaceSpec(normal=[-1, 0], offset=-1)
        result = project(spec, [0, 2])
        assert result.point == pytest.approx([1.0, 2.0])
        assert project(spec, [5, 5]).distance == 0.0

    def test_segment_clamps_to_endpoint(self):
        spec = SegmentSpec(a=[0, 0], b=[1, 0])
        assert np.array_equal(project(spec, [3, 1]).point, [1.0, 0.0])
        assert np.array_equal(project(spec, [0.5, 2]).point, [0.5, 0.0])

    def test_degenerate_segment(self):
        spec = SegmentSpec(a=[1, 1], b=[1, 1])
        assert np.array_equal(project(spec, [0, 0]).point, [1.0, 1.0])

    def test_cloud_symmetric_tie(self):
        result = project(PointsSpec(coords=[[0, 0], [3, 0]]), [1.5, 0])
        assert result.multivalued
        assert len(result.candidates) == 2
        assert np.array_equal(result.candidates[0], [0.0, 0.0])

    def test_cloud_duplicates_collapse(self):
        result = project(PointsSpec(coords=[[1, 0], [1, 0], [5, 0]]), [0, 0])
        assert not result.multivalued
        assert result.margin == pytest.approx(4.0)

    def test_union_sphere_and_spiral_cloud(self, seq_2001):
        pts = seq_2001.points()
        union = UnionSpec(members=[SphereSpec(center=[0, 0], radius=1), PointsSpec(coords=pts[1:].tolist())])
        result = project(union, pts[0])
        assert not result.multivalued
        assert np.array_equal(result.point, pts[1])
        assert result.margin > 0

    def test_union_ignores_sphere_center_when_sphere_loses(self):
        union = UnionSpec(members=[SphereSpec(center=[0, 0], radius=5), PointsSpec(coords=[[1, 0]])])
        result = project(union, [0, 0])
        assert np.array_equal(result.point, [1.0, 0.0])

    def test_union_raises_when_degenerate_sphere_wins(self):
        union = UnionSpec(members=[SphereSpec(center=[0, 0], radius=1), PointsSpec(coords=[[4, 0]])])
        with pytest.raises(DegenerateProjection):
            project(union, [0, 0])

    def test_union_tie_across_members(self):
        union = UnionSpec(members=[BoxSpec(lower=[-2, -1], upper=[-1, 1]), BallSpec(center=[2, 0], radius=1)])
        result = project(union, [0, 0])
        assert result.multivalued
        assert [c.tolist() for c in result.candidates] == [[-1.0, 0.0], [1.0, 0.0]]

    def test_union_margin_uses_runner_up_member(self):
        union = UnionSpec(members=[PointsSpec(coords=[[1, 0]]), PointsSpec(coords=[[0, 3]])])
        assert project(union, [0, 0]).margin == pytest.approx(2.0)

    def test_tie_tol_must_be_positive(self):
        with pytest.raises(DomainError):
            project(BallSpec(center=[0], radius=1), [3], tie_tol=0)

    @settings(max_examples=1000, deadline=None)
    @given(spec_and_query(any_specs()))
    def test_candidates_are_members_at_the_distance(self, case):
        spec, q = case
        try:
            result = project(spec, q)
        except DegenerateProjection:
            return
        d = distance(spec, q)
        assert abs(d - result.distance) <= 1e-9
        for c in result.candidates:
            assert abs(float(np.linalg.norm(np.asarray(q) - c)) - d) <= 1e-9
            assert contains(spec, c)

    @settings(max_examples=300, deadline=None)
    @given(spec_and_query())
    def test_idempotent_on_convex(self, case):
        spec, q = case
        p = project(spec, q).point
        again = project(spec, p)
        assert again.distance <= 1e-9
        assert np.allclose(again.point, p, atol=1e-9)

    @settings(max_examples=300, deadline=None)
    @given(st.data())
    def test_nonexpansive_on_convex(self, data):
        spec = data.draw(convex_specs())
        p = data.draw(points(spec.dim))
        q = data.draw(points(spec.dim))
        pp = project(spec, p).point
        pq = project(spec, q).point
        assert np.linalg.norm(pp - pq) <= np.linalg.norm(np.subtract(p, q)) + 1e-9

    @settings(max_examples=200, deadline=None)
    @given(st.data())
    def test_ball_matches_sphere_outside(self, data):
        center = data.draw(points(2))
        radius = data.draw(st.floats(0.1, 3))
        q = np.asarray(data.draw(points(2)))
        if np.linalg.norm(q - center) <= radius:
            return
        on_ball = project(BallSpec(center=center, radius=radius), q).point
        on_sphere = project(SphereSpec(center=center, radius=radius), q).point
        assert np.array_equal(on_ball, on_sphere)


class TestNearestInCloud:
    def test_basic(self):
        assert nearest_in_cloud([[0, 0], [3, 0]], [1, 0]) == (0, 1.0, 1.0)

    def test_single_point(self):
        idx, d, margin = nearest_in_cloud([[3, 4]], [0, 0])
        assert (idx, d, margin) == (0, 5.0, math.inf)

    def test_lowest_index_wins_ties(self):
        idx, _, margin = nearest_in_cloud([[1, 0], [-1, 0]], [0, 0])
        assert idx == 0
        assert margin == 0.0

    def test_exclude_on_spiral(self, seq_2001):
        pts = seq_2001.points()[:101]
        idx, _, margin = nearest_in_cloud(pts, pts[5], exclude=5)
        assert idx == 6
        assert margin > 0

    def test_empty_after_exclusion(self):
        with pytest.raises(EmptyCloud):
            nearest_in_cloud([[1, 1]], [0, 0], exclude=0)


@settings(max_examples=500, deadline=None)
@given(
    st.floats(0.01, 10), st.floats(0.01, 10),
    st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi),
)
def test_law_of_cosines(r, s, alpha, beta):
    p = np.array([r * math.cos(alpha), r * math.sin(alpha)])
    q = np.array([s * math.cos(beta), s * math.sin(beta)])
    d_sq = law_of_cosines_sq(r, s, alpha, beta)
    assert abs(float(np.sum((p - q) ** 2)) - d_sq) <= 1e-10 * max(1.0, r * s)
    d = math.sqrt(max(d_sq, 0.0))
    assert r - d - 1e-6 <= s <= r + d + 1e-6


def test_max_circular_gap():
    assert max_circular_gap(np.array([1.0])) == pytest.approx(2 * math.pi)
    assert max_circular_gap(np.array([0.0, math.pi])) == pytest.approx(math.pi)
    assert max_circular_gap(np.array([0.0, 2 * math.pi + 0.5])) == pytest.approx(2 * math.pi - 0.5)


class TestSchemas:
    def test_box_json_uses_min_max(self):
        spec = parse_projector('{"type": "box", "min": [0, 0], "max": [1, 2]}')
        assert isinstance(spec, BoxSpec)
        assert dump_projector(spec) == {"type": "box", "min": [0.0, 0.0], "max": [1.0, 2.0]}

    def test_nested_union_roundtrip(self):
        data = {"type": "union", "members": [
            {"type": "sphere", "center": [0, 0], "radius": 1.0},
            {"type": "points", "coords": [[2, 0], [0, 2]]},
        ]}
        spec = parse_projector(data)
        assert parse_projector(dump_projector(spec)) == spec
        assert not spec.is_convex

    def test_box_bounds_validated(self):
        with pytest.raises(ValidationError):
            BoxSpec(lower=[1, 0], upper=[0, 0])

    def test_halfspace_normal_must_be_unit(self):
        with pytest.raises(ValidationError):
            HalfspaceSpec(normal=[1, 1], offset=0)

    def test_radius_positive(self):
        with pytest.raises(ValidationError):
            SphereSpec(center=[0, 0], radius=0)

    def test_union_dims_must_agree(self):
        with pytest.raises(ValidationError):
            UnionSpec(members=[BallSpec(center=[0, 0], radius=1), BallSpec(center=[0], radius=1)])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValidationError):
            parse_projector({"type": "ball", "center": [float("inf"), 0], "radius": 1})

    def test_unknown_field_rejected(self):
        with pytest.raises(ValidationError):
            parse_projector({"type": "ball", "center": [0, 0], "radius": 1, "colour": "red"})

    def test_convexity_flags(self):
        assert PointsSpec(coords=[[0, 0]]).is_convex
        assert not PointsSpec(coords=[[0, 0], [1, 1]]).is_convex
        assert not SphereSpec(center=[0], radius=1).is_convex
        assert BallSpec(center=[0], radius=1).is_convex
