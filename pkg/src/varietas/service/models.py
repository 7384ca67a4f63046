"""Request/response schemas for the workbench service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class SolveRequest(BaseModel):
    variety: str = Field(description="free | fb | const | inf")
    presentation: str = Field(description="presentation file contents")
    query: str = Field(description="'<term> = <term>'")
    machine: Optional[str] = Field(default=None, description="machine file contents")
    case: str = "auto"
    stage_bound: Optional[int] = None
    time_window: Optional[int] = None
    space_window: Optional[int] = None
    base_table: Optional[str] = Field(
        default=None, description="base-table file contents, or 'derive'")
    x_listing: Optional[str] = Field(
        default=None, description="'builtin:<name>' or whitespace-separated values")
    trace: bool = False


class SolveResponse(BaseModel):
    verdict: str                      # EQUAL | UNEQUAL | UNKNOWN
    reason: str = ""
    case: str = ""
    table_mode: str = ""
    stage_used: Optional[int] = None
    trace: list[str] = []


class SimulateRequest(BaseModel):
    machine: str
    tape: str
    steps: int = 50


class SimulateResponse(BaseModel):
    lines: list[str]
    halted_at: Optional[int] = None
    steps_run: int = 0


class TapePresentationRequest(BaseModel):
    machine: str
    tape: str


class TapePresentationResponse(BaseModel):
    presentation: str


class NormalizeRequest(BaseModel):
    variety: str = "fb"               # fb | const
    term: str
    machine: Optional[str] = None
    generators: list[str] = []


class NormalizeResponse(BaseModel):
    normal_form: str
    shape: str
    time: int
    space: int
    seed: str = ""


class CheckLawsRequest(BaseModel):
    machine: str
    tape: str
    time_window: int = 20
    space_window: int = 20


class CheckLawsResponse(BaseModel):
    checked: int
    skipped_outside_window: int
    violations: list[str]
    zero_one_separated: bool
    presentation_holds: bool


class DemoRequest(BaseModel):
    scenario: str                     # halting | looping
    time_window: int = 20
    space_window: int = 20


class DemoResponse(BaseModel):
    lines: list[str]
    verdict: str = ""


class ErrorBody(BaseModel):
    error: str                        # parse | machine | io | internal
    message: str
