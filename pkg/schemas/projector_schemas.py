"""
Pydantic schemas for closed sets that support set-valued projection.
The JSON form is the wire format used by configs and exports.
"""
import math
from typing import Annotated, Any, List, Literal, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, TypeAdapter, model_validator

Coords = Annotated[List[float], Field(min_length=1)]

UNIT_NORM_TOL = 1e-12


class SetSpec(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid", allow_inf_nan=False)

    @property
    def dim(self) -> int:
        raise NotImplementedError

    @property
    def is_convex(self) -> bool:
        return True


class SphereSpec(SetSpec):
    type: Literal["sphere"] = "sphere"
    center: Coords
    radius: float = Field(gt=0)

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def is_convex(self) -> bool:
        return False


class BallSpec(SetSpec):
    type: Literal["ball"] = "ball"
    center: Coords
    radius: float = Field(gt=0)

    @property
    def dim(self) -> int:
        return len(self.center)


class BoxSpec(SetSpec):
    type: Literal["box"] = "box"
    lower: Coords = Field(alias="min")
    upper: Coords = Field(alias="max")

    @model_validator(mode="after")
    def _check_bounds(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("box min and max must have the same dimension")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("box min must not exceed max componentwise")
        return self

    @property
    def dim(self) -> int:
        return len(self.lower)


class HalfspaceSpec(SetSpec):
    """The set {x : <normal, x> <= offset}."""

    type: Literal["halfspace"] = "halfspace"
    normal: Coords
    offset: float

    @model_validator(mode="after")
    def _check_normal(self):
        norm = math.sqrt(math.fsum(v * v for v in self.normal))
        if abs(norm - 1.0) > UNIT_NORM_TOL:
            raise ValueError(f"halfspace normal must have norm 1, got {norm!r}")
        return self

    @property
    def dim(self) -> int:
        return len(self.normal)


class SegmentSpec(SetSpec):
    type: Literal["segment"] = "segment"
    a: Coords
    b: Coords

    @model_validator(mode="after")
    def _check_dims(self):
        if len(self.a) != len(self.b):
            raise ValueError("segment endpoints must have the same dimension")
        return self

    @property
    def dim(self) -> int:
        return len(self.a)


class PointsSpec(SetSpec):
    type: Literal["points"] = "points"
    coords: Annotated[List[Coords], Field(min_length=1)]

    _array: Any = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _check_dims(self):
        dims = {len(p) for p in self.coords}
        if len(dims) != 1:
            raise ValueError("all cloud points must have the same dimension")
        return self

    def model_post_init(self, __context: Any) -> None:
        self._array = np.asarray(self.coords, dtype=float)

    def array(self) -> np.ndarray:
        return self._array

    def __eq__(self, other: Any) -> bool:
        # The cached array is derived from coords; compare the field only.
        if not isinstance(other, PointsSpec):
            return NotImplemented
        return self.coords == other.coords

    __hash__ = None

    @property
    def dim(self) -> int:
        return len(self.coords[0])

    @property
    def is_convex(self) -> bool:
        return len(self.coords) == 1


class UnionSpec(SetSpec):
    type: Literal["union"] = "union"
    members: Annotated[List["ProjectorSpec"], Field(min_length=1)]

    @model_validator(mode="after")
    def _check_dims(self):
        dims = {m.dim for m in self.members}
        if len(dims) != 1:
            raise ValueError(f"union members disagree on dimension: {sorted(dims)}")
        return self

    @property
    def dim(self) -> int:
        return self.members[0].dim

    @property
    def is_convex(self) -> bool:
        return False


ProjectorSpec = Annotated[
    Union[SphereSpec, BallSpec, BoxSpec, HalfspaceSpec, SegmentSpec, PointsSpec, UnionSpec],
    Field(discriminator="type"),
]

# Convex members accepted by the finite-union harness (single-point clouds only).
ConvexSpec = Annotated[
    Union[BallSpec, BoxSpec, HalfspaceSpec, SegmentSpec, PointsSpec],
    Field(discriminator="type"),
]

UnionSpec.model_rebuild()

projector_adapter = TypeAdapter(ProjectorSpec)


def parse_projector(data: Any) -> SetSpec:
    """Validate a dict (or JSON text) into the matching spec class."""
    if isinstance(data, (str, bytes)):
        return projector_adapter.validate_json(data)
    return projector_adapter.validate_python(data)


def dump_projector(spec: SetSpec) -> dict:
    return spec.model_dump(by_alias=True)
