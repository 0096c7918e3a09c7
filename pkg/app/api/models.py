from pydantic import BaseModel, Field
from typing import Any, Dict, List, Optional
from typing_extensions import Literal

from app.labeling import ElIntervalReport

SUITES = ["grading", "length", "el", "topology", "qseries"]
Suite = Literal["grading", "length", "el", "topology", "qseries", "all"]


class ElementsResponse(BaseModel):
    n: int = Field(..., description="Matrix size", examples=[4])
    arcs: Optional[int] = Field(None, description="Arc count filter, if any", examples=[2])
    count: int = Field(..., description="Number of elements returned", examples=[3])
    elements: List[List[int]] = Field(..., description="Elements in one-line notation, canonical order")


class CoverEdge(BaseModel):
    child: int = Field(..., description="Index of the lower element")
    parent: int = Field(..., description="Index of the covering element")
    label: Optional[List[int]] = Field(None, description="EL label (a, b)", examples=[[8, 5]])
    movetype: Optional[str] = Field(None, description="Move type: c, rs or rr", examples=["rr"])
    highlight: Optional[bool] = Field(None, description="Edge lies on the increasing 0̂ → 1̂ chain")


class HasseResponse(BaseModel):
    n: int
    elements: List[List[int]]
    covers: List[CoverEdge]


class CompareResponse(BaseModel):
    n: int
    x: str = Field(..., examples=["2,1,0,0"])
    y: str = Field(..., examples=["3,4,1,2"])
    relation: Literal["<", ">", "=", "incomparable"]


class IntervalResponse(BaseModel):
    n: int
    bottom: str
    top: str
    length: int
    size: int
    members: List[str]
    el: Optional[ElIntervalReport] = None


class MobiusResponse(BaseModel):
    n: int
    bottom: str
    top: str
    mobius: int


class PolyRow(BaseModel):
    n: int
    k: str = Field(..., description="Arc count, or '*' for the sum over all k", examples=["2"])
    coefficients: str = Field(..., description="Coefficients from q^0 upward", examples=["1,1,1"])
    polynomial: str = Field(..., examples=["1+q+q^2"])


class PolysResponse(BaseModel):
    n: int
    rows: List[PolyRow]
    checks: Dict[str, bool] = Field(default_factory=dict)


class ZetaResponse(BaseModel):
    n: int
    q: int
    formula: Dict[int, int] = Field(..., description="Rank → count from the closed formula")
    total: int
    counts: Optional[Dict[int, int]] = Field(None, description="Rank → count from exhaustive enumeration")
    agrees: Optional[bool] = None


class VerifyRequest(BaseModel):
    n: int = Field(..., ge=1, description="Size of PF_n", examples=[4])
    suite: Suite = Field("all", description="Suite to run", examples=["all"])
    force: bool = Field(False, description="Override the size guard")


class SuiteReport(BaseModel):
    suite: str
    n: int
    passed: bool
    failures: List[str] = Field(default_factory=list)
    details: Dict[str, Any] = Field(default_factory=dict)


class HealthCheckResponse(BaseModel):
    status: str
    details: Optional[Dict[str, str]] = None

    model_config = {
        "json_schema_extra": {
            "example": {
                "status": "healthy",
                "details": {
                    "configuration": "Loaded successfully",
                    "cached_posets": "4, 5"
                }
            }
        }
    }


class ConfigResponse(BaseModel):
    version: str = Field(..., description="API version from configuration", examples=["1.0.0"])
    max_poset_n: int
    max_enum_n: int
    el_verify_max_n: int
    face_count_max_n: int
    rank_selected_max_n: int
    census_max_n: Dict[str, int]
    suites: List[str]
