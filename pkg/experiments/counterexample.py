"""
Compact sets A = {x_2n} U S and B = {x_2n+1} U S on which alternating
projections never converge, truncated to a finite spiral prefix.
"""
import logging
import math
from typing import Optional, Sequence

import numpy as np

from geometry.euclid import as_point
from schemas.experiment_schemas import CounterexampleSets, StartOutcome, Variant
from schemas.map_schemas import MapConfig, MapTrace
from schemas.projector_schemas import BallSpec, PointsSpec, SphereSpec, UnionSpec
from schemas.sequence_schemas import SequenceReport
from solvers import map_driver
from spiral import sequence
from spiral.curve import TWO_PI
from utils.errors import CorollaryViolated, DomainError, TruncationEdge

logger = logging.getLogger(__name__)

STEP_TOL = 1e-10
RING_TOL = 1e-12
DEFAULT_STOP_STEP = 1e-5


def _ring(variant: Variant):
    if variant == "sphere":
        return SphereSpec(center=[0.0, 0.0], radius=1.0)
    if variant == "disk":
        return BallSpec(center=[0.0, 0.0], radius=1.0)
    raise DomainError(f"unknown variant {variant!r}")


def build(horizon: int, variant: Variant = "sphere", report: Optional[SequenceReport] = None) -> CounterexampleSets:
    """Split x_0..x_{horizon-1} by index parity and add the unit circle (or disk) to both sides."""
    if horizon < 2:
        raise DomainError("horizon must be at least 2")
    if report is None:
        report = sequence.generate(horizon)
    if len(report) < horizon:
        raise DomainError(f"sequence has {len(report)} records, horizon {horizon} requested")
    pts = [list(r.x) for r in report.records[:horizon]]
    set_a = UnionSpec(members=[PointsSpec(coords=pts[0::2]), _ring(variant)])
    set_b = UnionSpec(members=[PointsSpec(coords=pts[1::2]), _ring(variant)])
    logger.info("built %s counterexample with %d spiral points", variant, horizon)
    return CounterexampleSets(set_a=set_a, set_b=set_b, horizon=horizon, variant=variant, sequence=report)


def _window_stop_step(sets: CounterexampleSets, n_pairs: int) -> float:
    # Below every step inside the run window, so the run never halts early.
    smallest = sets.sequence.records[min(2 * n_pairs, sets.horizon - 1)].eps
    return min(DEFAULT_STOP_STEP, 0.1 * smallest)


def to_map_config(sets: CounterexampleSets, n_pairs: int, start: Optional[Sequence[float]] = None,
                  stop_step: Optional[float] = None) -> MapConfig:
    """MapConfig over the built sets, starting at x_0 unless another start is given."""
    if n_pairs < 1:
        raise DomainError("n_pairs must be at least 1")
    if stop_step is None:
        stop_step = _window_stop_step(sets, n_pairs)
    return MapConfig(
        set_a=sets.set_a,
        set_b=sets.set_b,
        start=list(start) if start is not None else sets.point(0),
        max_iter=n_pairs,
        stop_step=stop_step,
        diagnostic_tail=min(100, max(2, n_pairs)),
    )


def run_corollary(sets: CounterexampleSets, n_pairs: int) -> MapTrace:
    """Run from b_{-1} = x_0 and require a_n = x_{2n}, b_n = x_{2n+1} index-exactly."""
    if 2 * n_pairs + 1 > sets.horizon:
        raise TruncationEdge(
            f"{n_pairs} pairs need 2*n_pairs + 1 <= horizon, horizon is {sets.horizon}"
        )
    trace = map_driver.run(to_map_config(sets, n_pairs))
    if len(trace) != n_pairs:
        raise CorollaryViolated(len(trace), f"run stopped after {len(trace)} of {n_pairs} pairs")

    pts = sets.sequence.points()[: sets.horizon]
    eps_values = sets.sequence.eps_values()
    for n in range(n_pairs):
        if not np.array_equal(trace.a[n], pts[2 * n]):
            raise CorollaryViolated(n, f"a_{n}={trace.a[n]} differs from x_{2 * n}")
        if not np.array_equal(trace.b[n], pts[2 * n + 1]):
            raise CorollaryViolated(n, f"b_{n}={trace.b[n]} differs from x_{2 * n + 1}")
        if abs(trace.step_ab[n] - eps_values[2 * n]) > STEP_TOL:
            raise CorollaryViolated(n, f"||b_n - a_n|| differs from eps_{2 * n}")
        if n > 0 and abs(trace.step_ba[n - 1] - eps_values[2 * n - 1]) > STEP_TOL:
            raise CorollaryViolated(n, f"||a_n - b_(n-1)|| differs from eps_{2 * n - 1}")
    logger.info("corollary reproduced over %d pairs (%s variant)", n_pairs, sets.variant)
    return trace


def safe_start_radius(sets: CounterexampleSets) -> float:
    """Starts beyond this norm project onto the cloud part of A, not onto the ring.

    The truncated prefix covers the angles up to alpha_last, and any start
    further out than 1 + exp(2pi - alpha_last) is closer to some retained spiral
    point than to the unit circle.
    """
    alpha_last = sets.sequence.records[sets.horizon - 1].alpha
    return 1.0 + math.exp(TWO_PI - alpha_last)


def classify_start(sets: CounterexampleSets, start: Sequence[float], n_pairs: int = 20) -> StartOutcome:
    """Run from an arbitrary start and report whether it stays put or joins the spiral tail."""
    start = as_point(start)
    config = to_map_config(sets, n_pairs, start=start.tolist(), stop_step=0.0)
    trace = map_driver.run(config)
    a = np.asarray(trace.a)
    b = np.asarray(trace.b)
    a0 = a[0]
    in_ring = abs(float(np.linalg.norm(a0)) - 1.0) <= RING_TOL

    if in_ring and np.all(np.abs(a - a0) <= RING_TOL) and np.all(np.abs(b - a0) <= RING_TOL):
        return StartOutcome(start=start.tolist(), kind="constant", first_in_ring=True, pairs_checked=len(trace))

    pts = sets.sequence.points()[: sets.horizon]
    hits = np.flatnonzero(np.all(pts == a0, axis=1))
    if hits.size and hits[0] % 2 == 0:
        first = int(hits[0])
        offset = first // 2
        # Pairs whose successor still lies inside the truncated prefix.
        checkable = min(len(trace), (sets.horizon - 2 - first) // 2)
        joined = checkable >= 1 and all(
            np.array_equal(a[n], pts[first + 2 * n]) and np.array_equal(b[n], pts[first + 2 * n + 1])
            for n in range(checkable)
        )
        if joined:
            return StartOutcome(start=start.tolist(), kind="joins_tail", first_in_ring=in_ring,
                                tail_offset=offset, pairs_checked=checkable)

    logger.info("start %s neither constant nor joining the tail", start.tolist())
    return StartOutcome(start=start.tolist(), kind="other", first_in_ring=in_ring, pairs_checked=len(trace))
