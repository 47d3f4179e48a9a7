"""Data models for scan reports, the order atlas and CLI output."""

from typing import List, Optional, Dict, Any
from pydantic import BaseModel, Field


class VerificationReport(BaseModel):
    """Outcome of a bounded check of one algebraic statement."""

    name: str = Field(..., description="Name of the check that was run")
    status: str = Field("verified", description="'verified' or 'failed'")
    checked: int = Field(0, description="Number of individual cases examined")
    failures: List[str] = Field(default_factory=list, description="One message per failing case")
    details: Dict[str, Any] = Field(default_factory=dict, description="Check-specific summary data")

    @property
    def passed(self) -> bool:
        return self.status == "verified" and not self.failures

    def record(self, ok: bool, message: str) -> None:
        """Count one case and remember it if it failed."""
        self.checked += 1
        if not ok:
            self.failures.append(message)
            self.status = "failed"


class ScanRow(BaseModel):
    """One (simple type, field) row of the characteristic-dominance scan."""

    group: str = Field(..., description="Simple type symbol, e.g. 'A1'")
    q: int = Field(..., description="Field size")
    order: str = Field(..., description="Group order as a decimal string")
    p_contribution: str = Field(..., description="q^N as a decimal string")
    largest: str = Field(..., description="Largest prime power divisor, as 'p^e'")
    second: Optional[str] = Field(None, description="Second largest prime power divisor, as 'p^e'")
    p_is_largest: bool = Field(..., description="Whether q^N is the largest prime power divisor")
    p_is_second: bool = Field(False, description="Whether q^N is the second largest prime power divisor")
    counterexample: bool = Field(..., description="Membership in the known counterexample set")
    dominance_guaranteed: bool = Field(False, description="Whether the contribution bound alone forces dominance")


class AtlasEntry(BaseModel):
    """A (group, field size) pair stored under one order in the atlas."""

    group: str = Field(..., description="Canonical group string")
    q: str = Field(..., description="Field size as a decimal string")


class AtlasBounds(BaseModel):
    """Bounds an atlas was built with."""

    max_rank: int = Field(..., description="Largest total rank included")
    q_values: List[int] = Field(default_factory=list, description="Field sizes included")


class AtlasFile(BaseModel):
    """Persisted map from group order to every (group, q) with that order."""

    bounds: AtlasBounds = Field(..., description="Bounds used to build the atlas")
    entries: Dict[str, List[AtlasEntry]] = Field(
        default_factory=dict, description="Decimal order string to matching pairs"
    )

    def covers(self, max_rank: int, q_values: List[int]) -> bool:
        """Whether a query with these bounds can be answered from this atlas."""
        return max_rank <= self.bounds.max_rank and set(q_values) <= set(self.bounds.q_values)


class TripleRow(BaseModel):
    """One exported row of the transitive triple catalog."""

    ambient: str = Field(..., description="Compact group acted on, e.g. 'SO7'")
    sub1: str = Field(..., description="First subgroup")
    sub2: str = Field(..., description="Second, transitively acting subgroup")
    intersection: str = Field(..., description="Intersection of the two subgroups")
    left: str = Field(..., description="Split form of ambient times intersection")
    right: str = Field(..., description="Split form of sub1 times sub2")
    word: str = Field(..., description="Reduced generator word of the coincidence class")


class CatalogDocument(BaseModel):
    """Static JSON document describing the triple catalog."""

    n_max: int = Field(..., description="Largest family parameter included")
    rows: List[TripleRow] = Field(default_factory=list, description="Catalog rows")


class CommandResult(BaseModel):
    """Stable JSON envelope printed by the CLI with --json."""

    command: str = Field(..., description="Subcommand that produced the result")
    inputs: Dict[str, Any] = Field(default_factory=dict, description="Parsed command inputs")
    results: List[Any] = Field(default_factory=list, description="Command results")
    elapsed_ms: float = Field(0.0, description="Wall time in milliseconds")
