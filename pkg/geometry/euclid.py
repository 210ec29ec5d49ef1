"""
Euclidean primitives and set-valued projection onto closed sets.

Every projection is computed in closed form per primitive. Unions gather the
projections of all members and keep every minimizer within ``tie_tol``, so a
multivalued result is reported instead of a silently chosen point.
"""
import logging
import math
from dataclasses import dataclass
from functools import singledispatch
from typing import List, Optional, Sequence, Tuple

import numpy as np

from schemas.projector_schemas import (
    BallSpec,
    BoxSpec,
    HalfspaceSpec,
    PointsSpec,
    SegmentSpec,
    SetSpec,
    SphereSpec,
    UnionSpec,
)
from utils.config import get_settings
from utils.errors import DegenerateProjection, DimensionMismatch, DomainError, EmptyCloud

logger = logging.getLogger(__name__)

CENTER_TOL = 1e-12
MEMBERSHIP_TOL = 1e-9
TWO_PI = 2.0 * math.pi


@dataclass
class ProjectionResult:
    candidates: List[np.ndarray]
    distance: float
    margin: float = math.inf  # gap to the best non-minimizing distance

    @property
    def multivalued(self) -> bool:
        return len(self.candidates) > 1

    @property
    def point(self) -> np.ndarray:
        return self.candidates[0]


@dataclass
class _Partial:
    candidates: List[np.ndarray]
    distance: float
    runner_up: float = math.inf


def as_point(coords: Sequence[float]) -> np.ndarray:
    """Coerce coordinates to a finite 1-D float array."""
    q = np.asarray(coords, dtype=float)
    if q.ndim != 1 or q.size == 0:
        raise DomainError(f"a point needs a nonempty flat coordinate list, got shape {q.shape}")
    if not np.all(np.isfinite(q)):
        raise DomainError("point coordinates must be finite")
    return q


def _check_dim(spec: SetSpec, q: np.ndarray) -> None:
    if q.shape[0] != spec.dim:
        raise DimensionMismatch(f"query has dimension {q.shape[0]}, set has dimension {spec.dim}")


def law_of_cosines_sq(r: float, s: float, alpha: float, beta: float) -> float:
    """Squared distance between two points given in polar form."""
    return r * r + s * s - 2.0 * r * s * math.cos(alpha - beta)


def max_circular_gap(angles: np.ndarray) -> float:
    """Largest gap between sorted angles taken mod 2*pi, wrap-around included."""
    if len(angles) == 0:
        return TWO_PI
    theta = np.sort(np.mod(np.asarray(angles, dtype=float), TWO_PI))
    wrap = TWO_PI - (theta[-1] - theta[0])
    if len(theta) == 1:
        return wrap
    return float(max(np.max(np.diff(theta)), wrap))


# ---------------------------------------------------------------------------
# Distance
# ---------------------------------------------------------------------------
def distance(spec: SetSpec, q: Sequence[float]) -> float:
    q = as_point(q)
    _check_dim(spec, q)
    return _distance(spec, q)


@singledispatch
def _distance(spec: SetSpec, q: np.ndarray) -> float:
    raise TypeError(f"no distance for {type(spec).__name__}")


@_distance.register
def _(spec: SphereSpec, q: np.ndarray) -> float:
    return abs(float(np.linalg.norm(q - np.asarray(spec.center))) - spec.radius)


@_distance.register
def _(spec: BallSpec, q: np.ndarray) -> float:
    return max(float(np.linalg.norm(q - np.asarray(spec.center))) - spec.radius, 0.0)


@_distance.register
def _(spec: BoxSpec, q: np.ndarray) -> float:
    return float(np.linalg.norm(q - np.clip(q, spec.lower, spec.upper)))


@_distance.register
def _(spec: HalfspaceSpec, q: np.ndarray) -> float:
    return max(float(np.dot(spec.normal, q)) - spec.offset, 0.0)


@_distance.register
def _(spec: SegmentSpec, q: np.ndarray) -> float:
    return float(np.linalg.norm(q - _segment_point(spec, q)))


@_distance.register
def _(spec: PointsSpec, q: np.ndarray) -> float:
    return float(np.min(np.linalg.norm(spec.array() - q, axis=1)))


@_distance.register
def _(spec: UnionSpec, q: np.ndarray) -> float:
    return min(_distance(m, q) for m in spec.members)


def contains(spec: SetSpec, q: Sequence[float], tol: float = MEMBERSHIP_TOL) -> bool:
    return distance(spec, q) <= tol


# ---------------------------------------------------------------------------
# Projection
# ---------------------------------------------------------------------------
def project(spec: SetSpec, q: Sequence[float], tie_tol: Optional[float] = None) -> ProjectionResult:
    """All nearest points of ``spec`` to ``q``, within ``tie_tol`` of the minimum."""
    tie_tol = get_settings().tie_tol if tie_tol is None else tie_tol
    if tie_tol <= 0:
        raise DomainError("tie_tol must be positive")
    q = as_point(q)
    _check_dim(spec, q)
    part = _project(spec, q, tie_tol)
    return ProjectionResult(
        candidates=part.candidates,
        distance=part.distance,
        margin=part.runner_up - part.distance,
    )


def _radial(center: np.ndarray, radius: float, q: np.ndarray) -> Tuple[np.ndarray, float]:
    # Shared by sphere and ball so both give bitwise-identical points outside the ball.
    v = q - center
    r = float(np.linalg.norm(v))
    return center + (radius / r) * v, r


def _segment_point(spec: SegmentSpec, q: np.ndarray) -> np.ndarray:
    a = np.asarray(spec.a, dtype=float)
    ab = np.asarray(spec.b, dtype=float) - a
    denom = float(np.dot(ab, ab))
    if denom == 0.0:
        return a
    t = min(max(float(np.dot(q - a, ab)) / denom, 0.0), 1.0)
    return a + t * ab


@singledispatch
def _project(spec: SetSpec, q: np.ndarray, tie_tol: float) -> _Partial:
    raise TypeError(f"no projector for {type(spec).__name__}")


@_project.register
def _(spec: SphereSpec, q: np.ndarray, tie_tol: float) -> _Partial:
    center = np.asarray(spec.center, dtype=float)
    if float(np.linalg.norm(q - center)) <= CENTER_TOL:
        raise DegenerateProjection("query coincides with the sphere center; every sphere point is nearest")
    p, r = _radial(center, spec.radius, q)
    return _Partial([p], abs(r - spec.radius))


@_project.register
def _(spec: BallSpec, q: np.ndarray, tie_tol: float) -> _Partial:
    center = np.asarray(spec.center, dtype=float)
    if float(np.linalg.norm(q - center)) <= spec.radius:
        return _Partial([q.copy()], 0.0)
    p, r = _radial(center, spec.radius, q)
    return _Partial([p], r - spec.radius)


@_project.register
def _(spec: BoxSpec, q: np.ndarray, tie_tol: float) -> _Partial:
    p = np.clip(q, spec.lower, spec.upper)
    return _Partial([p], float(np.linalg.norm(q - p)))


@_project.register
def _(spec: HalfspaceSpec, q: np.ndarray, tie_tol: float) -> _Partial:
    normal = np.asarray(spec.normal, dtype=float)
    excess = float(np.dot(normal, q)) - spec.offset
    if excess <= 0.0:
        return _Partial([q.copy()], 0.0)
    return _Partial([q - excess * normal], excess)


@_project.register
def _(spec: SegmentSpec, q: np.ndarray, tie_tol: float) -> _Partial:
    p = _segment_point(spec, q)
    return _Partial([p], float(np.linalg.norm(q - p)))


@_project.register
def _(spec: PointsSpec, q: np.ndarray, tie_tol: float) -> _Partial:
    cloud = spec.array()
    dists = np.linalg.norm(cloud - q, axis=1)
    best = float(dists.min())
    tied = np.flatnonzero(dists <= best + tie_tol)
    candidates: List[np.ndarray] = []
    for idx in tied[np.argsort(dists[tied], kind="stable")]:
        _append_unique(candidates, cloud[idx], tie_tol)
    others = dists[dists > best + tie_tol]
    runner_up = float(others.min()) if others.size else math.inf
    return _Partial(candidates, best, runner_up)


@_project.register
def _(spec: UnionSpec, q: np.ndarray, tie_tol: float) -> _Partial:
    parts: List[Tuple[int, _Partial]] = []
    degenerate: List[float] = []
    for i, member in enumerate(spec.members):
        try:
            parts.append((i, _project(member, q, tie_tol)))
        except DegenerateProjection:
            # Only fatal if the sphere is among the minimizers.
            logger.debug("union member %d queried at its sphere center", i)
            degenerate.append(_distance(member, q))
    levels = [d for _, p in parts for d in (p.distance, p.runner_up)] + degenerate
    best = min(levels)
    if any(d <= best + tie_tol for d in degenerate):
        raise DegenerateProjection("union minimizer includes a sphere queried at its center")

    winners = sorted((p for _, p in parts if p.distance <= best + tie_tol), key=lambda p: p.distance)
    candidates: List[np.ndarray] = []
    for p in winners:
        for c in p.candidates:
            _append_unique(candidates, c, tie_tol)
    above = [d for d in levels if d > best + tie_tol]
    return _Partial(candidates, best, min(above) if above else math.inf)


def _append_unique(candidates: List[np.ndarray], point: np.ndarray, tie_tol: float) -> None:
    for c in candidates:
        if float(np.linalg.norm(c - point)) < tie_tol:
            return
    candidates.append(point)


# ---------------------------------------------------------------------------
# Brute-force nearest neighbour
# ---------------------------------------------------------------------------
def nearest_in_cloud(points, q: Sequence[float], exclude: Optional[int] = None) -> Tuple[int, float, float]:
    """Linear scan for the nearest point; lowest index wins ties.

    Returns (index, distance, margin) where margin is the gap to the runner-up
    (+inf when only one point remains).
    """
    cloud = np.asarray(points, dtype=float)
    if cloud.ndim != 2:
        raise DomainError("points must be a list of coordinate vectors")
    q = as_point(q)
    if cloud.shape[0] and cloud.shape[1] != q.shape[0]:
        raise DimensionMismatch(f"query has dimension {q.shape[0]}, cloud has dimension {cloud.shape[1]}")
    dists = np.linalg.norm(cloud - q, axis=1)
    if exclude is not None and 0 <= exclude < dists.size:
        dists[exclude] = math.inf
    if not np.any(np.isfinite(dists)):
        raise EmptyCloud("no points left to search after exclusion")
    idx = int(np.argmin(dists))
    best = float(dists[idx])
    dists[idx] = math.inf
    return idx, best, float(dists.min()) - best
