"""
Schemas for the spiral counterexample and the finite-union experiments.
"""
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from schemas.projector_schemas import Coords, ConvexSpec, UnionSpec
from schemas.sequence_schemas import SequenceReport

Variant = Literal["sphere", "disk"]


class CounterexampleSets(BaseModel):
    set_a: UnionSpec
    set_b: UnionSpec
    horizon: int = Field(ge=2)
    variant: Variant
    sequence: SequenceReport

    def point(self, index: int) -> List[float]:
        return list(self.sequence.records[index].x)


class StartOutcome(BaseModel):
    start: List[float]
    kind: Literal["constant", "joins_tail", "other"]
    first_in_ring: bool
    tail_offset: Optional[int] = None  # k with a_n = x_{2(n+k)}
    pairs_checked: int = 0


class UnionScenario(BaseModel):
    model_config = ConfigDict(allow_inf_nan=False)

    a_members: List[ConvexSpec] = Field(min_length=1)
    b_members: List[ConvexSpec] = Field(min_length=1)
    start: Coords
    seed: int
    max_iter: int = Field(default=5000, ge=1)
    planted: Optional[List[float]] = None  # common point c* when generated

    @model_validator(mode="after")
    def _check_members(self):
        members = self.a_members + self.b_members
        dims = {m.dim for m in members} | {len(self.start)}
        if len(dims) != 1:
            raise ValueError("scenario members and start disagree on dimension")
        if not all(m.is_convex for m in members):
            raise ValueError("scenario members must be convex (single-point clouds only)")
        return self

    @property
    def dim(self) -> int:
        return len(self.start)


class ConvergenceVerdict(BaseModel):
    seed: int
    dim: int
    status: Literal["pass", "hypotheses_not_met", "fail"]
    converged: bool
    limit: Optional[List[float]] = None
    limit_in_intersection: bool
    gaps_vanished: bool
    bounded: bool
    iterations_used: int
    final_gap: float
    tail_spread: float
    max_tail_increase: Optional[float] = None

    @model_validator(mode="after")
    def _check_limit(self):
        if self.converged and self.limit is None:
            raise ValueError("a converged verdict must carry its limit")
        return self


class BatchSummary(BaseModel):
    total: int
    passed: int
    hypotheses_not_met: int
    failed: int
