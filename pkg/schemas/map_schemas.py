"""
Schemas for alternating-projection runs: configuration, trace and verdict.
"""
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.projector_schemas import Coords, ProjectorSpec
from utils.config import get_settings

TiePolicy = Literal["lowest_index", "error"]
VerdictKind = Literal["converged_to_point", "continuum_suspected", "budget_exhausted"]


class MapConfig(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid", allow_inf_nan=False)

    set_a: ProjectorSpec = Field(alias="setA")
    set_b: ProjectorSpec = Field(alias="setB")
    start: Coords
    max_iter: int = Field(default=1000, ge=1)
    stop_step: float = Field(default_factory=lambda: get_settings().stop_step, ge=0)
    tie_policy: TiePolicy = "lowest_index"
    # Diagnostic thresholds for the continuum heuristic.
    continuum_factor: float = Field(default=1e3, gt=0)
    spread_factor: float = Field(default=100.0, gt=0)
    diagnostic_tail: int = Field(default=100, ge=2)

    @model_validator(mode="after")
    def _check_dims(self):
        dims = {self.set_a.dim, self.set_b.dim, len(self.start)}
        if len(dims) != 1:
            raise ValueError(
                f"setA, setB and start disagree on dimension "
                f"({self.set_a.dim}, {self.set_b.dim}, {len(self.start)})"
            )
        return self


class MultivaluedEvent(BaseModel):
    iteration: int
    which: Literal["A", "B"]
    n_candidates: int


class Verdict(BaseModel):
    kind: VerdictKind
    iterations_used: int
    limit: Optional[List[float]] = None
    ring_radius_estimate: Optional[float] = None
    angular_spread: Optional[float] = None
    tail_spread: float = 0.0
    heuristic: bool = False  # True when the classification is a diagnostic, not a proof


class MapTrace(BaseModel):
    a: List[List[float]]
    b: List[List[float]]
    step_ab: List[float]  # ||b_n - a_n||
    step_ba: List[float]  # ||a_{n+1} - b_n||
    multivalued_events: List[MultivaluedEvent] = []
    verdict: Verdict

    @model_validator(mode="after")
    def _check_lengths(self):
        n = len(self.a)
        if len(self.b) != n or len(self.step_ab) != n or len(self.step_ba) != max(n - 1, 0):
            raise ValueError("trace arrays have inconsistent lengths")
        if any(s < 0 for s in self.step_ab) or any(s < 0 for s in self.step_ba):
            raise ValueError("step norms must be nonnegative")
        return self

    def __len__(self) -> int:
        return len(self.a)


class ClusterDiagnostics(BaseModel):
    radius_mean: float
    radius_dev: float
    angular_gap_max: float
