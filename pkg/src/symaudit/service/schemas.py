"""Pydantic request/response models for the audit service.

Every endpoint takes one of these request bodies; spec strings follow the
parser grammars (group ``free:2 | zd:3 | heis3 | zmod:8^2 | dihedral:6``,
symbol ``fejer:word | fejer:cube | br:delta=x | radial:<measure> | heat |
poisson``, measure ``dirac:y | atoms:[(y,w),...] | grid:k``, ring
``su2:n | groupdual:<group>``, body ``cube:d= | ball:d= | lq:q=,d=``).
Stochastic endpoints require an explicit seed.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class AuditSymbolRequest(BaseModel):
    group: Optional[str] = None  # required for fejer symbols
    symbol: str
    condition: Literal["A1", "A2", "difference"]
    alpha: float = 1.0
    eta: int = 1
    ball_radius: int = 4  # audit domain: word ball of this radius
    k_max: int = 16  # audit domain for integer-radial symbols
    n_lo: int = 0
    n_hi: int = 6
    t_min: Optional[float] = None
    t_max: Optional[float] = None
    beta_request: Optional[float] = None
    cap: Optional[int] = None


class CheckPdRequest(BaseModel):
    group: str
    symbol: str
    ball_radius: int = 3
    n: Optional[int] = None  # discrete index (fejer)
    t: Optional[float] = None  # continuous index (radial/heat/poisson)
    tol: float = 1e-10
    cap: Optional[int] = None


class CheckCndRequest(BaseModel):
    group: str
    ball_radius: int = 3
    tol: float = 1e-10


class SchoenbergRequest(BaseModel):
    group: str
    ball_radius: int = 3
    t_grid: list[float] = Field(default_factory=lambda: [2.0**k / 8.0 for k in range(9)])
    tol: float = 1e-10


class BuildLengthRequest(BaseModel):
    group: str
    mode: Literal["lacunary", "selected"] = "lacunary"
    j_max: int = 4  # lacunary levels s_j = 2^j, j <= j_max
    horizon: int = 200  # selected mode
    verify_window: int = 4
    count: Optional[int] = None
    relaxed: bool = True
    domain_radius: int = 8
    cap: Optional[int] = None


class DirichletRequest(BaseModel):
    group: Literal["zd:1", "heis3"] = "zd:1"
    n_lo: int = 0
    n_hi: int = 10
    domain_radius: int = 16
    cap: Optional[int] = None


class FejerExperimentRequest(BaseModel):
    n: int = 64
    d: int = 1
    p: float = 2.0
    trials: int = 100
    seed: int  # stochastic: explicit seed required


class FusionFejerRequest(BaseModel):
    ring: str
    folner_upto: int = 16
    pi_max: Optional[int] = None  # su2 labels; defaults to the resolvable range
    check_chain: bool = True


class ValidateRingRequest(BaseModel):
    ring: str
    labels_upto: Optional[int] = None


class BochnerRieszRequest(BaseModel):
    alpha: float = 1.0
    beta: float = 2.0
    s_points: int = 64


class SquareConstantRequest(BaseModel):
    alphas: list[float] = Field(default_factory=lambda: [0.0, 0.5, 1.0, 2.0])
    ks: list[int] = Field(default_factory=lambda: [1, 8, 32])
    tolerance: float = 1e-8


class ConvexBodyAuditRequest(BaseModel):
    body: str
    budget: int = 100_000
    seed: int  # stochastic paths need the seed even for exact bodies
    magnitudes: list[float] = Field(default_factory=lambda: [0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0])


class DimensionSweepRequest(BaseModel):
    family: Literal["cube", "ball", "lq"] = "lq"
    q: Optional[int] = 4
    dims: list[int] = Field(default_factory=lambda: [2, 4, 8])
    v_max: int = 1
    budget: int = 100_000
    seed: int
    format: Literal["json", "csv"] = "json"


class AcceptanceRequest(BaseModel):
    check_determinism: bool = True


class ReportEnvelope(BaseModel):
    """Response shape shared by all JSON endpoints."""

    schema_version: str
    tool_version: str
    subcommand: str
    config: dict
    payload: dict
    wall_time_s: Optional[float] = None
