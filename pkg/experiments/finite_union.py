"""
Empirical harness for alternating projections between finite unions of
convex sets: when the iterates stay bounded and both gaps vanish, the two
sequences must converge to one common point of A and B.
"""
import logging
from typing import Iterable, List, Optional

import numpy as np
from joblib import Parallel, delayed

from geometry.euclid import distance
from schemas.experiment_schemas import BatchSummary, ConvergenceVerdict, UnionScenario
from schemas.map_schemas import MapConfig
from schemas.projector_schemas import BallSpec, BoxSpec, HalfspaceSpec, UnionSpec
from solvers import map_driver
from utils.config import get_settings
from utils.errors import DomainError

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-8
STOP_FACTOR = 1e-2  # runs halt once both steps drop below tol * STOP_FACTOR
TAIL = 5
SETTLED_FACTOR = 0.1  # the Cauchy tail starts after the last step above tol * SETTLED_FACTOR
BOUND_FACTOR = 10.0
FEJER_TOL = 1e-9
START_RADIUS = 10.0
MEMBER_KINDS = ("box", "ball", "halfspace")


def _random_member(rng: np.random.Generator, c: np.ndarray):
    """A box, ball or halfspace holding ``c`` strictly inside."""
    dim = c.shape[0]
    kind = MEMBER_KINDS[int(rng.integers(len(MEMBER_KINDS)))]
    if kind == "box":
        half = rng.uniform(0.1, 1.0, dim)
        center = c + rng.uniform(-0.9, 0.9, dim) * half
        return BoxSpec(lower=(center - half).tolist(), upper=(center + half).tolist())
    if kind == "ball":
        radius = float(rng.uniform(0.2, 1.5))
        direction = rng.normal(size=dim)
        direction /= np.linalg.norm(direction)
        center = c + float(rng.uniform(0.0, 0.9)) * radius * direction
        return BallSpec(center=center.tolist(), radius=radius)
    normal = rng.normal(size=dim)
    normal /= np.linalg.norm(normal)
    return HalfspaceSpec(normal=normal.tolist(), offset=float(normal @ c) + float(rng.uniform(0.05, 1.0)))


def generate_scenario(seed: int, dim: int = 2, members_per_side: int = 3,
                      max_iter: int = 5000) -> UnionScenario:
    """Random scenario with a planted common point c* in [-1, 1]^dim; identical for a fixed seed."""
    if not 2 <= dim <= 4:
        raise DomainError(f"dim must lie in 2..4, got {dim}")
    if not 1 <= members_per_side <= 4:
        raise DomainError(f"members_per_side must lie in 1..4, got {members_per_side}")
    rng = np.random.default_rng(seed)
    c = rng.uniform(-1.0, 1.0, dim)
    a_members = [_random_member(rng, c) for _ in range(members_per_side)]
    b_members = [_random_member(rng, c) for _ in range(members_per_side)]
    direction = rng.normal(size=dim)
    direction /= np.linalg.norm(direction)
    start = c + float(rng.uniform(0.0, START_RADIUS)) * direction
    return UnionScenario(
        a_members=a_members,
        b_members=b_members,
        start=start.tolist(),
        seed=seed,
        max_iter=max_iter,
        planted=c.tolist(),
    )


def adversarial_scenario(seed: int = -1) -> UnionScenario:
    """Two union branches that trap the iterates at gap 1 even though A and B intersect."""
    return UnionScenario(
        a_members=[BoxSpec(lower=[0.0, 0.0], upper=[1.0, 1.0]), BoxSpec(lower=[5.0, 0.0], upper=[6.0, 1.0])],
        b_members=[BoxSpec(lower=[2.0, 0.0], upper=[3.0, 1.0]), BoxSpec(lower=[5.0, 0.0], upper=[6.0, 1.0])],
        start=[1.5, 0.5],
        seed=seed,
        max_iter=200,
        planted=[5.5, 0.5],
    )


def to_map_config(scenario: UnionScenario, tol: float = DEFAULT_TOL) -> MapConfig:
    return MapConfig(
        set_a=UnionSpec(members=scenario.a_members),
        set_b=UnionSpec(members=scenario.b_members),
        start=scenario.start,
        max_iter=scenario.max_iter,
        stop_step=tol * STOP_FACTOR,
    )


def settled_index(step_ab: List[float], step_ba: List[float], threshold: float) -> int:
    """First pair index of the tail used for the Cauchy check.

    The tail starts after the last step above ``threshold`` and is never longer
    than TAIL pairs; it always keeps the final pair.
    """
    n = len(step_ab)
    # step_ba[i] leads from b_i to a_{i+1}; the final pair has no outgoing step.
    outgoing = np.append(np.asarray(step_ba, dtype=float), 0.0)
    big = np.flatnonzero((np.asarray(step_ab, dtype=float) > threshold) | (outgoing > threshold))
    first = int(big[-1]) + 1 if big.size else 0
    return min(max(first, n - TAIL), n - 1)


def _proof_radius(scenario: UnionScenario, limit: np.ndarray, tol: float) -> float:
    # Distance from the limit to the nearest member that does not contain it.
    far = [d for d in (distance(m, limit) for m in scenario.a_members + scenario.b_members) if d > tol]
    return min([1.0] + far)


def check_theorem(scenario: UnionScenario, tol: float = DEFAULT_TOL) -> ConvergenceVerdict:
    """Run the scenario, gate on the empirical hypotheses, then test the conclusion."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    config = to_map_config(scenario, tol)
    trace = map_driver.run(config)
    a = np.asarray(trace.a)
    b = np.asarray(trace.b)

    scale = max(1.0, float(np.linalg.norm(scenario.start)))
    peak = float(max(np.linalg.norm(a, axis=1).max(), np.linalg.norm(b, axis=1).max()))
    bounded = bool(np.isfinite(peak) and peak <= BOUND_FACTOR * scale)
    final_gap = max([trace.step_ab[-1]] + trace.step_ba[-1:])
    gaps_vanished = final_gap < config.stop_step

    limit = b[-1]
    first = settled_index(trace.step_ab, trace.step_ba, tol * SETTLED_FACTOR)
    tail_pts = np.vstack([a[first:], b[first:]])
    spread = float(np.linalg.norm(tail_pts - limit, axis=1).max())
    converged = spread <= tol
    in_a = min(distance(m, limit) for m in scenario.a_members) <= tol
    in_b = min(distance(m, limit) for m in scenario.b_members) <= tol
    limit_in_intersection = in_a and in_b

    increase: Optional[float] = None
    if bounded and gaps_vanished:
        radius = _proof_radius(scenario, limit, tol)
        near = np.flatnonzero(np.linalg.norm(a - limit, axis=1) < 0.5 * radius)
        if near.size:
            increase = map_driver.fejer_tail_increase(trace, limit, start=int(near[0]))

    if not (bounded and gaps_vanished):
        status = "hypotheses_not_met"
    elif converged and limit_in_intersection and (increase is None or increase <= FEJER_TOL):
        status = "pass"
    else:
        status = "fail"
        logger.warning("seed %d: hypotheses hold but conclusion failed (spread=%g, in A=%s, in B=%s)",
                       scenario.seed, spread, in_a, in_b)

    return ConvergenceVerdict(
        seed=scenario.seed,
        dim=scenario.dim,
        status=status,
        converged=converged,
        limit=limit.tolist() if converged else None,
        limit_in_intersection=limit_in_intersection,
        gaps_vanished=gaps_vanished,
        bounded=bounded,
        iterations_used=len(trace),
        final_gap=final_gap,
        tail_spread=spread,
        max_tail_increase=increase,
    )


def _run_seed(seed: int, dim: int, members_per_side: int, tol: float) -> ConvergenceVerdict:
    return check_theorem(generate_scenario(seed, dim, members_per_side), tol)


def run_batch(seeds: Iterable[int], dim: int = 2, members_per_side: int = 3,
              tol: float = DEFAULT_TOL, n_jobs: Optional[int] = None) -> List[ConvergenceVerdict]:
    """Check one scenario per seed; results come back in seed order whatever n_jobs is."""
    n_jobs = get_settings().n_jobs if n_jobs is None else n_jobs
    seeds = list(seeds)
    verdicts = Parallel(n_jobs=n_jobs)(
        delayed(_run_seed)(seed, dim, members_per_side, tol) for seed in seeds
    )
    summary = summarize(verdicts)
    logger.info("batch of %d scenarios: %d pass, %d hypotheses not met, %d fail",
                summary.total, summary.passed, summary.hypotheses_not_met, summary.failed)
    return list(verdicts)


def summarize(verdicts: List[ConvergenceVerdict]) -> BatchSummary:
    return BatchSummary(
        total=len(verdicts),
        passed=sum(v.status == "pass" for v in verdicts),
        hypotheses_not_met=sum(v.status == "hypotheses_not_met" for v in verdicts),
        failed=sum(v.status == "fail" for v in verdicts),
    )
