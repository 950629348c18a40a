from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field


class Spacing(str, Enum):
    linear = "linear"
    log = "log"


class MainTermKind(str, Enum):
    auto = "auto"
    p = "p"
    q = "q"


class CountResult(BaseModel):
    model_config = ConfigDict(
        json_schema_extra={"example": {"count": 5, "boundary_hits": 4, "certified": True}}
    )

    count: int = Field(ge=0)
    boundary_hits: int = Field(default=0, ge=0)
    certified: bool = True


class DiscrepancyRecord(BaseModel):
    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "t": "125/2",
                "count": 7841,
                "main_term": 7840.52,
                "delta": 0.48,
                "certified": True,
            }
        }
    )

    t: str
    count: int
    main_term: float
    delta: float
    certified: bool = True

    @property
    def t_float(self) -> float:
        from .scalar import parse_scalar

        return float(parse_scalar(self.t))


class FitSummary(BaseModel):
    slope: float
    intercept: float
    ci_low: float
    ci_high: float
    n: int


class FourierResult(BaseModel):
    re: float
    im: float
    method: str
    error_bound: float


class SweepRequest(BaseModel):
    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "polytope": "cross d=2 a=[1, 1/2*sqrt(2)]",
                "t_start": "1",
                "t_stop": "100",
                "t_count": 50,
                "t_spacing": "log",
                "main_term": "auto",
            }
        }
    )

    polytope: str
    t_start: str
    t_stop: str
    t_count: int = Field(ge=1)
    t_spacing: Spacing = Spacing.linear
    n: Optional[int] = Field(default=None, gt=1)
    main_term: MainTermKind = MainTermKind.auto
    precision_bits: Optional[int] = Field(default=None, ge=2)
    seed: int = 0


class SweepResponse(BaseModel):
    run_id: str
    polytope: str
    records: List[DiscrepancyRecord]
    fit: Optional[FitSummary] = None
    persisted: bool = False


class CoefficientReport(BaseModel):
    k: int
    symbolic: Dict[str, str]
    decimal: str
    width: str


class PolynomialReport(BaseModel):
    d: int
    kind: str
    axes: List[str]
    coefficients: List[CoefficientReport]


class EhrhartReport(BaseModel):
    axes: List[int]
    coefficients: List[str]
    formula: Optional[str] = None
    interpolated: Optional[str] = None
    match: Optional[bool] = None


class CriterionResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""
