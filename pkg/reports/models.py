from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field, model_validator


# NS Models
class NSWitness(BaseModel):
    z: int
    z_prime: int
    i: int
    h_z: int
    h_z_prime: int

    def violates(self, h) -> bool:
        """Re-evaluate from scratch: floors of z agree at 2^i, floors of h differ at 2^(i-1)."""
        same_z = self.z >> self.i == self.z_prime >> self.i
        same_h = h(self.z) >> (self.i - 1) == h(self.z_prime) >> (self.i - 1)
        return same_z and not same_h


class NSReport(BaseModel):
    function: str
    bound: int
    i_range: Tuple[int, int]
    holds_on_bound: bool
    witness: Optional[NSWitness] = None
    axis: Optional[int] = None
    fixed: Optional[List[int]] = None

    @model_validator(mode="after")
    def _witness_when_failing(self):
        if not self.holds_on_bound and self.witness is None:
            raise ValueError("a failing NS report must carry a witness")
        return self

    @property
    def label(self) -> str:
        if self.holds_on_bound:
            return f"holds up to {self.bound}"
        w = self.witness
        return f"fails at (z={w.z}, z'={w.z_prime}, i={w.i})"


# Verification Models
class Verdict(str, Enum):
    CONSISTENT = "consistent-with-theorem"
    COUNTEREXAMPLE = "counterexample-found"
    INCONCLUSIVE = "inconclusive"


class Mismatch(BaseModel):
    position: List[int]  # written coordinate order
    grundy: int
    nim_sum: int
    oracle_verified: Optional[bool] = None
    encoded_grundy: Optional[int] = None  # isomorphism checks: value on the chocolate side


class TableClassification(BaseModel):
    table: List[int]
    ns_holds: bool
    sweep_clean: bool

    @property
    def agrees(self) -> bool:
        return self.ns_holds == self.sweep_clean


class VerificationReport(BaseModel):
    kind: str
    game: str
    function: Optional[str] = None
    s: Optional[int] = None
    bounds: List[int] = Field(default_factory=list)
    y_cap: Optional[int] = None
    positions_checked: int = 0
    mismatches: List[Mismatch] = Field(default_factory=list)
    mismatch_total: int = 0
    ns_summary: List[NSReport] = Field(default_factory=list)
    ns_holds: Optional[bool] = None
    classifications: List[TableClassification] = Field(default_factory=list)
    verdict: Verdict
    seed: Optional[int] = None
    notes: List[str] = Field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return self.verdict == Verdict.CONSISTENT


# Grundy table Models
class GrundyEntry(BaseModel):
    position: List[int]
    grundy: int


class GrundyTablePayload(BaseModel):
    game: str
    columns: List[str]
    entries: List[GrundyEntry]


# Envelope
class ReportEnvelope(BaseModel):
    schema_version: str
    tool_version: str
    command: List[str]
    timestamp: str
    payload_type: Literal["verification", "ns", "grundy-table"]
    payload: Union[VerificationReport, NSReport, GrundyTablePayload]
    extra: Dict[str, Any] = Field(default_factory=dict)
