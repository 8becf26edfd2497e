"""
Pydantic models for reports, run configuration and parameters
"""

import math
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class DeviationReport(BaseModel):
    """Outcome of one named identity check"""

    model_config = ConfigDict(populate_by_name=True, frozen=True)

    check_name: str = Field(..., alias="check")
    group_dim: int = Field(..., alias="dim", ge=1)
    samples: int = Field(..., ge=0)
    max_deviation: float = Field(..., ge=0.0)
    mean_deviation: float = Field(..., ge=0.0)
    tolerance: float = Field(..., gt=0.0)
    passed: bool = Field(..., alias="pass")
    witness: dict[str, Any] | None = None

    @model_validator(mode="after")
    def verdict_matches_deviation(self) -> "DeviationReport":
        """Ensure pass <=> max_deviation <= tolerance, and failures carry a witness"""
        if self.passed != (self.max_deviation <= self.tolerance):
            raise ValueError("pass must equal max_deviation <= tolerance")
        if not self.passed and self.witness is None:
            raise ValueError("failed report requires a witness")
        return self

    def to_json_dict(self) -> dict[str, Any]:
        """Serialize with the published field names"""
        return self.model_dump(by_alias=True, mode="json")


class ResidualSummary(BaseModel):
    """Norms of a harmonicity residual field"""

    sup_norm: float = Field(..., ge=0.0)
    l2_norm: float = Field(..., ge=0.0)
    h: float = Field(..., gt=0.0)
    nodes: int = Field(..., ge=0)
    fallback_count: int = Field(default=0, ge=0)
    stencil: Literal["compact", "centered"] = "compact"


class FactorizationReport(BaseModel):
    """Residual of a map against the recombined residuals of its Iwasawa factors"""

    g_residual: float
    k_residual: float
    a_residual: float
    n_residual: float
    combined: float
    cross_term: float
    h: float
    nodes: int
    fallback_count: int = 0


class GeodesicParams(BaseModel):
    """Rates of the closed-form geodesic: rotation a, dilation c, shear k"""

    model_config = ConfigDict(frozen=True)

    a: float = 0.0
    c: float = 0.0
    k: float = 0.0

    @field_validator("a", "c", "k")
    @classmethod
    def finite(cls, v: float) -> float:
        """Reject NaN and infinite rates"""
        if not math.isfinite(v):
            raise ValueError("geodesic rates must be finite")
        return v


class GeodesicComparison(BaseModel):
    """Numerical geodesics compared with the closed form"""

    params: GeodesicParams
    dt: float
    steps: int
    subgroup_distance: dict[str, float]
    full_distance: float
    speed_drift: float
    det_drift: float
    shear_velocity_gap: float | None = None


class FlowConfig(BaseModel):
    """Parameters of the Dirichlet-energy heat flow"""

    dt: float = Field(..., gt=0.0)
    max_iters: int = Field(default=10_000, ge=0)
    target_residual: float = Field(default=1e-6, gt=0.0)
    record_every: int = Field(default=10, ge=1)
    divergence_window: int = Field(default=10, ge=2)


class EnergyRecord(BaseModel):
    """One recorded point of the flow"""

    iteration: int
    energy: float
    residual: float


class EnergyTrace(BaseModel):
    """Energy and residual history of a flow run"""

    records: list[EnergyRecord] = Field(default_factory=list)

    @field_validator("records")
    @classmethod
    def strictly_increasing(cls, v: list[EnergyRecord]) -> list[EnergyRecord]:
        """Iterations must be strictly increasing"""
        for prev, cur in zip(v, v[1:], strict=False):
            if cur.iteration <= prev.iteration:
                raise ValueError("trace iterations must be strictly increasing")
        return v

    def append(self, iteration: int, energy: float, residual: float) -> None:
        """Record a point, keeping iterations strictly increasing"""
        if self.records and iteration <= self.records[-1].iteration:
            raise ValueError("trace iterations must be strictly increasing")
        self.records.append(EnergyRecord(iteration=iteration, energy=energy, residual=residual))


class RunConfig(BaseModel):
    """Validated parameters of one CLI invocation"""

    subcommand: Literal[
        "factorize", "audit", "family", "residual", "theorem-check", "geodesic", "solve", "roots"
    ]
    dim: int = Field(default=2, ge=2)
    space_dim: int = Field(default=2, ge=1)
    h: float = Field(default=0.02, gt=0.0)
    half_width: float = Field(default=1.0, gt=0.0)
    eps: float | None = Field(default=None, gt=0.0)
    r0: float | None = Field(default=None, gt=0.0)
    family: Literal["explicit", "component"] = "explicit"
    a: float = 0.0
    c: float = 0.0
    k: float = 0.0
    seed: int = 1
    samples: int = Field(default=1000, ge=1)
    output_dir: Path = Path("out")

    @field_validator("h", "half_width", "a", "c", "k")
    @classmethod
    def finite(cls, v: float) -> float:
        """Reject NaN and infinite values"""
        if not math.isfinite(v):
            raise ValueError("numeric parameters must be finite")
        return v


class RunSummary(BaseModel):
    """Record of what a CLI run consumed and produced"""

    subcommand: str
    version: str
    arguments: dict[str, Any]
    tolerances: dict[str, float]
    files: list[str] = Field(default_factory=list)
    golden: str | None = None
    golden_match: bool | None = None
