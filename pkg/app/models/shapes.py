"""
Pydantic models for shapes, distributions and reports
"""

from pydantic import BaseModel, Field
from typing import Dict, List, Optional, Any
from enum import Enum

from app.core.enumeration import RankDistribution
from app.core.f2core import MixedShape, TripleShape
from app.services.counting_service import format_pow2


class Method(str, Enum):
    """How a distribution is requested"""
    AUTO = "auto"
    CLOSED = "closed"
    RECURRENCE = "recurrence"
    BRUTE = "brute"


class OutputFormat(str, Enum):
    JSON = "json"
    TSV = "tsv"


class Suite(str, Enum):
    """Verification suites"""
    GOLDEN = "golden"
    ORACLE = "oracle"
    IDENTITIES = "identities"
    RECURRENCE = "recurrence"
    EXPSUM = "expsum"
    PROFILES = "profiles"


class TripleShapeModel(BaseModel):
    """Stack of persymmetric blocks with s, s+m and s+m+l rows"""
    s: int = Field(..., ge=1, description="Rows of the first block", example=2)
    m: int = Field(0, ge=0, description="Extra rows of the second block", example=0)
    l: int = Field(0, ge=0, description="Extra rows of the third block", example=0)
    k: int = Field(..., ge=1, description="Common width", example=6)
    method: Method = Field(Method.AUTO, description="closed, recurrence, brute, or auto for the fallback ladder")

    def to_shape(self) -> TripleShape:
        return TripleShape(self.s, self.m, self.l, self.k)


class MixedShapeModel(BaseModel):
    """n unstructured rows over persymmetric blocks of 1+m and 1+m+l rows"""
    n: int = Field(..., ge=0, description="Unstructured rows", example=2)
    m: int = Field(0, ge=0, example=1)
    l: int = Field(0, ge=0, example=3)
    k: int = Field(..., ge=1, description="Common width", example=5)
    method: Method = Field(Method.AUTO, description="auto combines the double stack; brute enumerates everything")

    def to_shape(self) -> MixedShape:
        return MixedShape(self.n, self.m, self.l, self.k)


class CountRequest(BaseModel):
    """Solution count of the q-fold system; give s for the triple system or n for the mixed one"""
    q: int = Field(..., ge=1, description="Number of summands", example=3)
    k: int = Field(..., ge=1, example=5)
    s: Optional[int] = Field(None, ge=1, example=3)
    m: int = Field(0, ge=0, example=0)
    l: int = Field(0, ge=0, example=0)
    n: Optional[int] = Field(None, ge=0, description="Unstructured rows (mixed system)")
    method: Method = Method.AUTO
    corrected: bool = Field(False, description="Mixed system: use the exponent matching the degree caps")
    allow_extrapolated: bool = Field(False, description="Allow the l > 0 solution count")


class VerifyRequest(BaseModel):
    max_bits: Optional[int] = Field(None, ge=1, le=40, description="Enumeration budget for this run", example=12)
    workers: Optional[int] = Field(None, ge=1, le=64)


class OutputRecord(BaseModel):
    """A distribution with exact counts as decimal strings"""
    shape: Dict[str, int]
    method: str
    counts: List[str]
    provenance: List[str] = []

    @classmethod
    def from_distribution(cls, dist: RankDistribution) -> "OutputRecord":
        return cls(
            shape=dist.shape.as_dict(),
            method=dist.method,
            counts=[str(count) for count in dist.counts],
            provenance=list(dist.provenance),
        )


class CountRecord(BaseModel):
    """A solution count, decimal and factored as c·2^e with c odd"""
    params: Dict[str, Any]
    method: str
    value: str
    factored: str

    @classmethod
    def build(cls, params: Dict[str, Any], method: str, value: int) -> "CountRecord":
        return cls(params=params, method=method, value=str(value), factored=format_pow2(value))


class VerifyReport(BaseModel):
    suite: str
    passed: bool
    checked: int
    failures: List[Dict[str, Any]]
    skipped: int
    errata: List[str]
    elapsed: float
