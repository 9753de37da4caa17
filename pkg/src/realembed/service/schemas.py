"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class AlgebraRequest(BaseModel):
    max_fold: int = Field(default=5, ge=1, le=8)
    seed: int | None = None
    inject_fault: str | None = None


class CheckResultModel(BaseModel):
    name: str
    passed: bool
    max_residual: float
    tol: float


class AlgebraResponse(BaseModel):
    passed: bool
    failed_checks: list[str]
    max_fold: int
    checks: list[CheckResultModel]


class VerifyRequest(BaseModel):
    document: dict
    tol: float = Field(default=1e-9, gt=0.0)


class VerifyResponse(BaseModel):
    kind: str
    passed: bool
    report: dict
    certificate: dict | None = None


class EmbedRequest(BaseModel):
    document: dict
    tol: float = Field(default=1e-9, gt=0.0)


class EmbedResponse(BaseModel):
    type: str
    qt: dict
    real: dict
    certificate: dict | None = None
    tol: float


class WitnessRequest(BaseModel):
    tol: float = Field(default=1e-9, gt=0.0)


class WitnessResponse(BaseModel):
    passed: bool
    witness: dict
    caves_sweep: list[dict]
