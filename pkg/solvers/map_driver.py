"""
Method of alternating projections over arbitrary ProjectorSpec pairs.

a_n = P_A(b_{n-1}), b_n = P_B(a_n), starting from b_{-1} = start. Set-valued
steps are resolved by the configured tie policy and recorded in the trace.
"""
import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
from scipy.spatial.distance import pdist

from geometry.euclid import as_point, max_circular_gap, project
from schemas.map_schemas import ClusterDiagnostics, MapConfig, MapTrace, MultivaluedEvent, Verdict
from schemas.projector_schemas import SetSpec
from utils.config import get_settings
from utils.errors import AmbiguousProjection, DegenerateProjection, DomainError
from utils.serialization import dumps

logger = logging.getLogger(__name__)

CONVERGED_SPREAD_FACTOR = 10.0


def _step(spec: SetSpec, q: np.ndarray, iteration: int, which: str, config: MapConfig,
          events: List[MultivaluedEvent], tie_tol: float) -> np.ndarray:
    try:
        result = project(spec, q, tie_tol)
    except DegenerateProjection as exc:
        logger.error("degenerate projection onto %s at iteration %d", which, iteration)
        raise DegenerateProjection(f"projection onto set {which}: {exc}", iteration=iteration) from exc
    if result.multivalued:
        if config.tie_policy == "error":
            raise AmbiguousProjection(iteration, which, len(result.candidates))
        logger.info("iteration %d: P_%s has %d candidates, taking the first",
                    iteration, which, len(result.candidates))
        events.append(MultivaluedEvent(iteration=iteration, which=which,
                                       n_candidates=len(result.candidates)))
    return result.point


def tail_spread(a: np.ndarray, b: np.ndarray, tail: int) -> float:
    """Largest pairwise distance among the last ``tail`` a- and b-iterates together."""
    pts = np.vstack([a[-tail:], b[-tail:]])
    if len(pts) < 2:
        return 0.0
    return float(pdist(pts).max())


def _classify(config: MapConfig, a: np.ndarray, b: np.ndarray, step_ab: List[float],
              step_ba: List[float], halted: bool) -> Verdict:
    used = len(a)
    spread = tail_spread(a, b, config.diagnostic_tail)
    stop = config.stop_step
    if halted and spread <= CONVERGED_SPREAD_FACTOR * stop:
        return Verdict(kind="converged_to_point", iterations_used=used,
                       limit=b[-1].tolist(), tail_spread=spread)

    last_steps = [step_ab[-1]] + step_ba[-1:]
    # A halted run whose tail is wider than the converged band is also a continuum candidate.
    wide = halted or spread > config.spread_factor * stop
    if max(last_steps) < stop * config.continuum_factor and wide:
        tail_a = a[-config.diagnostic_tail:]
        gap = max_circular_gap(np.arctan2(tail_a[:, 1], tail_a[:, 0])) if a.shape[1] == 2 else None
        return Verdict(
            kind="continuum_suspected",
            iterations_used=used,
            ring_radius_estimate=float(np.linalg.norm(tail_a, axis=1).mean()),
            angular_spread=None if gap is None else 2.0 * math.pi - gap,
            tail_spread=spread,
            heuristic=True,
        )
    return Verdict(kind="budget_exhausted", iterations_used=used, tail_spread=spread)


def run(config: MapConfig, tie_tol: Optional[float] = None) -> MapTrace:
    """Alternate projections until both consecutive steps fall below stop_step or max_iter runs out."""
    tie_tol = get_settings().tie_tol if tie_tol is None else tie_tol
    b_prev = as_point(config.start)
    a_list: List[np.ndarray] = []
    b_list: List[np.ndarray] = []
    step_ab: List[float] = []
    step_ba: List[float] = []
    events: List[MultivaluedEvent] = []
    halted = False

    for n in range(config.max_iter):
        a_n = _step(config.set_a, b_prev, n, "A", config, events, tie_tol)
        if n > 0:
            step_ba.append(float(np.linalg.norm(a_n - b_prev)))
        b_n = _step(config.set_b, a_n, n, "B", config, events, tie_tol)
        step_ab.append(float(np.linalg.norm(b_n - a_n)))
        a_list.append(a_n)
        b_list.append(b_n)
        b_prev = b_n
        if step_ab[-1] < config.stop_step and (n == 0 or step_ba[-1] < config.stop_step):
            halted = True
            logger.debug("steps below %g after %d iterations", config.stop_step, n + 1)
            break

    a = np.array(a_list)
    b = np.array(b_list)
    verdict = _classify(config, a, b, step_ab, step_ba, halted)
    if verdict.heuristic:
        logger.info("verdict %s (heuristic) after %d iterations", verdict.kind, verdict.iterations_used)
    else:
        logger.info("verdict %s after %d iterations", verdict.kind, verdict.iterations_used)
    return MapTrace(
        a=a.tolist(),
        b=b.tolist(),
        step_ab=step_ab,
        step_ba=step_ba,
        multivalued_events=events,
        verdict=verdict,
    )


def cluster_diagnostics(trace: MapTrace, tail: int) -> ClusterDiagnostics:
    """Radius statistics and the largest angular gap over the last ``tail`` a-iterates (2-D only)."""
    if tail < 2:
        raise DomainError("tail must be at least 2")
    if tail > len(trace):
        raise DomainError(f"tail {tail} exceeds trace length {len(trace)}")
    pts = np.asarray(trace.a[-tail:], dtype=float)
    if pts.shape[1] != 2:
        raise DomainError("cluster diagnostics are defined for planar traces only")
    radii = np.linalg.norm(pts, axis=1)
    return ClusterDiagnostics(
        radius_mean=float(radii.mean()),
        radius_dev=float(radii.std()),
        angular_gap_max=max_circular_gap(np.arctan2(pts[:, 1], pts[:, 0])),
    )


def trace_to_dict(trace: MapTrace) -> dict:
    return {
        "a": trace.a,
        "b": trace.b,
        "steps": {"ab": trace.step_ab, "ba": trace.step_ba},
        "multivalued_events": [e.model_dump() for e in trace.multivalued_events],
        "verdict": trace.verdict.model_dump(),
    }


def export_trace_json(trace: MapTrace, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(dumps(trace_to_dict(trace), indent=2) + "\n", encoding="utf-8")
    logger.info("wrote trace with %d iterations to %s", len(trace), path)
    return path


def fejer_tail_increase(trace: MapTrace, c: Sequence[float], start: int = 0) -> float:
    """Largest increase of the distance to ``c`` along a_start, b_start, a_start+1, ...

    Nonpositive when every step is a projection onto a convex set containing ``c``.
    """
    a = np.asarray(trace.a[start:], dtype=float)
    b = np.asarray(trace.b[start:], dtype=float)
    if len(a) == 0:
        return 0.0
    chain = np.empty((2 * len(a), a.shape[1]))
    chain[0::2] = a
    chain[1::2] = b
    dists = np.linalg.norm(chain - np.asarray(c, dtype=float), axis=1)
    if len(dists) < 2:
        return 0.0
    return float(np.max(np.diff(dists)))
