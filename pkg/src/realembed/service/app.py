"""HTTP service wrapping the embedding library.

Input problems map to HTTP 422; verification failures are ordinary 200
responses with ``passed: false`` so clients can distinguish the two.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import runner
from ..serialize import ParseError
from .schemas import (AlgebraRequest, AlgebraResponse, EmbedRequest,
                      EmbedResponse, VerifyRequest, VerifyResponse,
                      WitnessRequest, WitnessResponse)

app = FastAPI(
    title="realembed",
    description="Embeds complex quantum models into real quantum theory "
                "and verifies that all observable statistics are preserved.",
    version="0.1.0",
)


@app.get("/health")
def health() -> dict:
    return {"status": "ok"}


@app.post("/algebra/check", response_model=AlgebraResponse)
def algebra_check(req: AlgebraRequest):
    try:
        return runner.run_algebra(req.max_fold, req.seed, req.inject_fault)
    except ParseError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest):
    try:
        return runner.run_verify(req.document, req.tol)
    except ParseError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/embed", response_model=EmbedResponse)
def embed(req: EmbedRequest):
    try:
        return runner.run_embed(req.document, req.tol)
    except ParseError as exc:
        raise HTTPException(status_code=422, detail=str(exc))


@app.post("/witness", response_model=WitnessResponse)
def witness_endpoint(req: WitnessRequest):
    return runner.run_witness(req.tol)
