"""Command orchestration shared by the HTTP service and the CLI.

Each runner takes plain JSON-ready inputs and returns JSON-ready outputs;
input problems raise :class:`serialize.ParseError`, verification failures
are reported in the result (``passed: false``), never raised.
"""

from __future__ import annotations

from . import networks, protocols, suite, witness
from .linalg import ShapeError
from .networks import NetworkScenario
from .protocols import Protocol
from .serialize import ParseError, decode_document, encode_document

DEFAULT_TOL = 1e-9


def run_algebra(max_fold: int = 5, seed: int | None = None,
                inject_fault: str | None = None) -> dict:
    if max_fold < 1:
        raise ParseError(f"max_fold must be >= 1, got {max_fold}")
    results = suite.run_suite(max_fold, seed, inject_fault)
    failed = [r.name for r in results if not r.passed]
    return {"passed": not failed,
            "failed_checks": failed,
            "max_fold": max_fold,
            "checks": [r.to_dict() for r in results]}


def _decode(doc: dict):
    try:
        return decode_document(doc)
    except (ShapeError, KeyError, TypeError) as exc:
        raise ParseError(f"malformed document: {exc}")


def run_verify(doc: dict, tol: float = DEFAULT_TOL) -> dict:
    """Verify statistics preservation for a scenario or protocol document.

    A complex document is embedded on the fly; an embedded bundle is checked
    as stored.
    """
    obj = _decode(doc)
    try:
        if isinstance(obj, NetworkScenario):
            if obj.field != "C":
                raise ParseError("verify a real scenario through an "
                                 "embedded-scenario bundle")
            real, cert = networks.embed_network(obj, tol)
            rep = networks.verify_equivalence(obj, real, tol)
            return {"kind": "scenario", "passed": rep.passed,
                    "report": rep.to_dict(),
                    "certificate": cert.to_dict()}
        if isinstance(obj, Protocol):
            if obj.field != "C":
                raise ParseError("verify a real protocol through an "
                                 "embedded-protocol bundle")
            real = protocols.embed_protocol(obj, tol)
            rep = protocols.verify_protocol_equivalence(obj, real, tol)
            return {"kind": "protocol", "passed": rep.passed,
                    "report": rep.to_dict()}
        if "certificate" in obj or isinstance(obj.get("qt"), NetworkScenario):
            rep = networks.verify_equivalence(obj["qt"], obj["real"], tol)
            return {"kind": "embedded-scenario", "passed": rep.passed,
                    "report": rep.to_dict()}
        rep = protocols.verify_protocol_equivalence(obj["qt"], obj["real"],
                                                    tol)
        return {"kind": "embedded-protocol", "passed": rep.passed,
                "report": rep.to_dict()}
    except ShapeError as exc:
        raise ParseError(f"invalid model: {exc}")


def run_embed(doc: dict, tol: float = DEFAULT_TOL) -> dict:
    obj = _decode(doc)
    try:
        if isinstance(obj, NetworkScenario):
            if obj.field != "C":
                raise ParseError("document is already a real scenario")
            real, cert = networks.embed_network(obj, tol)
            return {"type": "embedded-scenario",
                    "qt": encode_document(obj),
                    "real": encode_document(real),
                    "certificate": cert.to_dict(),
                    "tol": tol}
        if isinstance(obj, Protocol):
            if obj.field != "C":
                raise ParseError("document is already a real protocol")
            real = protocols.embed_protocol(obj, tol)
            return {"type": "embedded-protocol",
                    "qt": encode_document(obj),
                    "real": encode_document(real),
                    "tol": tol}
    except ShapeError as exc:
        raise ParseError(f"invalid model: {exc}")
    raise ParseError("expected a complex scenario or protocol document")


CAVES_SWEEP = (0.0, 0.25, 0.5, 0.75, 1.0)


def run_witness(tol: float = DEFAULT_TOL) -> dict:
    rep = witness.run_witness(tol)
    sweep = []
    for alpha in CAVES_SWEEP:
        _, verdict = witness.caves_state(alpha)
        sweep.append({"alpha": alpha, **verdict.to_dict()})
    sweep_ok = all((s["alpha"] == 0.0) == s["product_state"]
                   and s["operational"] for s in sweep)
    return {"passed": rep.passed and sweep_ok,
            "witness": rep.to_dict(),
            "caves_sweep": sweep}
