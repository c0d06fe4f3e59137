"""Structured verdict records shared by the engine, the CLI and the API."""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class Conclusion(str, Enum):
    NO_ANOSOV = "NO_ANOSOV"
    NO_TRANSITIVE_ANOSOV = "NO_TRANSITIVE_ANOSOV"
    PARITY_CONSTRAINT = "PARITY_CONSTRAINT"
    INCONCLUSIVE = "INCONCLUSIVE"


class Completeness(str, Enum):
    CERTIFIED = "CERTIFIED"
    BOUNDED_ONLY = "BOUNDED_ONLY"


class EvidenceStatus(str, Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    COMPUTED = "computed"
    ASSUMED = "assumed"


class EvidenceItem(BaseModel):
    """One step of the reasoning behind a verdict."""

    constraint: str = Field(..., description="What was checked")
    status: EvidenceStatus = Field(..., description="Outcome of the check")
    citation: str = Field(..., description="Rule or argument the step belongs to")
    data: Dict[str, Any] = Field(default_factory=dict, description="Computed values")


class VerdictRecord(BaseModel):
    conclusion: Conclusion
    rule: str = Field(..., description="Identifier of the rule that fired")
    scope: Optional[str] = Field(None, description="Class of maps the conclusion is restricted to")
    evidence: List[EvidenceItem] = Field(default_factory=list)
    completeness: Optional[Completeness] = None


class ObstructionReport(BaseModel):
    kind: str
    dimension: int
    betti_profile: List[int]
    chi: int
    assumptions: List[str] = Field(default_factory=list)
    verdicts: List[VerdictRecord] = Field(..., min_length=1)

    def conclusions(self) -> List[Conclusion]:
        return [v.conclusion for v in self.verdicts]

    @property
    def bounded_only(self) -> bool:
        """Inconclusive with a search that could not be certified complete."""
        return any(
            v.conclusion == Conclusion.INCONCLUSIVE and v.completeness == Completeness.BOUNDED_ONLY
            for v in self.verdicts
        )
