"""JSON encoding and decoding of operators, scenarios, and protocols.

Operator encoding: ``{"dims": [...], "field": "C"|"R", "entries": [...]}``
with row-major entries, complex values as [re, im] pairs.  Rectangular
operators (protocol Kraus blocks) add ``"col_dims"``.  Scenario and
protocol documents carry a ``"type"`` tag so the CLI can dispatch.
"""

from __future__ import annotations

import json

import numpy as np

from .linalg import prod
from .networks import NetworkScenario, Party, Source
from .protocols import ChannelBlock, InstrumentBlock, Protocol, Round


class ParseError(ValueError):
    """Malformed or inconsistent input document."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


def encode_matrix(mat: np.ndarray, dims, field: str, col_dims=None) -> dict:
    mat = np.asarray(mat)
    out = {"dims": [int(d) for d in dims], "field": field}
    if col_dims is not None:
        out["col_dims"] = [int(d) for d in col_dims]
    if field == "C":
        out["entries"] = [[float(v.real), float(v.imag)]
                          for v in mat.reshape(-1)]
    else:
        out["entries"] = [float(v) for v in np.real(mat).reshape(-1)]
    return out


def decode_matrix(doc: dict, location: str = "operator") -> tuple:
    """Returns (matrix, dims, field, col_dims)."""
    if not isinstance(doc, dict):
        raise ParseError("expected an operator object", location)
    for key in ("dims", "field", "entries"):
        if key not in doc:
            raise ParseError(f"missing key {key!r}", location)
    dims = doc["dims"]
    field = doc["field"]
    if field not in ("C", "R"):
        raise ParseError(f"field must be 'C' or 'R', got {field!r}", location)
    col_dims = doc.get("col_dims", None)
    rows = prod(dims)
    cols = prod(col_dims) if col_dims is not None else rows
    entries = doc["entries"]
    if len(entries) != rows * cols:
        raise ParseError(f"expected {rows * cols} entries, got {len(entries)}",
                         location)
    if field == "C":
        try:
            flat = np.array([complex(re, im) for re, im in entries])
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad complex entry: {exc}", location)
    else:
        try:
            flat = np.array([float(v) for v in entries])
        except (TypeError, ValueError) as exc:
            raise ParseError(f"bad real entry: {exc}", location)
    return flat.reshape(rows, cols), list(dims), field, col_dims


# ---- scenarios ---------------------------------------------------------------


def _scenario_state_dims(field: str, sub_dims) -> list:
    """Stored per-factor dims of a source state: the data dims over the
    complex field, doubled interleaved pairs over the real field."""
    if field == "C":
        return [int(d) for d in sub_dims]
    out = []
    for d in sub_dims:
        out.extend([2, int(d)])
    return out


def encode_scenario(sc: NetworkScenario) -> dict:
    blocks = [list(b) for b in sc.blocks]
    povms = {}
    for b, fams in sc.povms.items():
        key = ",".join(sc.blocks[b])
        bdims = _scenario_state_dims(sc.field, sc.block_data_dims(b))
        povms[key] = {setting: [encode_matrix(e, bdims, sc.field)
                                for e in effects]
                      for setting, effects in sorted(fams.items())}
    return {
        "type": "scenario",
        "field": sc.field,
        "parties": [{"name": p.name, "dim": p.dim} for p in sc.parties],
        "sources": [{"subsystems": [{"dim": int(d)} for d in s.dims],
                     "state": encode_matrix(
                         s.state, _scenario_state_dims(sc.field, s.dims),
                         sc.field),
                     "route": list(s.route)} for s in sc.sources],
        "blocks": blocks,
        "povms": povms,
    }


def decode_scenario(doc: dict, location: str = "scenario") -> NetworkScenario:
    if doc.get("type") != "scenario":
        raise ParseError("expected type 'scenario'", location)
    field = doc.get("field", "C")
    try:
        parties = [Party(p["name"], int(p["dim"])) for p in doc["parties"]]
        sources = []
        for i, s in enumerate(doc["sources"]):
            dims = tuple(int(sub["dim"]) for sub in s["subsystems"])
            mat, _, sfield, _ = decode_matrix(
                s["state"], f"{location}.sources[{i}].state")
            if sfield != field:
                raise ParseError("source state field mismatch",
                                 f"{location}.sources[{i}]")
            sources.append(Source(dims, mat, tuple(s["route"])))
        blocks = tuple(tuple(b) for b in doc["blocks"])
        povms = {}
        for b, blk in enumerate(blocks):
            key = ",".join(blk)
            if key not in doc["povms"]:
                raise ParseError(f"missing POVM family for block {key!r}",
                                 f"{location}.povms")
            fams = {}
            for setting, effects in doc["povms"][key].items():
                fams[setting] = [
                    decode_matrix(e, f"{location}.povms[{key}][{setting}]"
                                  f"[{j}]")[0]
                    for j, e in enumerate(effects)]
            povms[b] = fams
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing or malformed field: {exc!r}", location)
    return NetworkScenario(parties, sources, blocks, povms, field)


# ---- protocols ---------------------------------------------------------------


def _encode_blocks(kind: str, blocks, field: str) -> list:
    out = []
    for blk in blocks:
        if kind == "channel":
            out.append({
                "subsystems": [int(i) for i in blk.subsystems],
                "out_dims": [int(d) for d in blk.out_dims],
                "kraus": [encode_matrix(k, list(blk.out_dims), field,
                                        col_dims=None
                                        if np.asarray(k).shape[0]
                                        == np.asarray(k).shape[1]
                                        else [int(np.asarray(k).shape[1])])
                          for k in blk.kraus],
            })
        else:
            out.append({
                "subsystems": [int(i) for i in blk.subsystems],
                "outcomes": list(blk.outcomes),
                "ops": [encode_matrix(op, [int(np.asarray(op).shape[0])],
                                      field) for op in blk.ops],
            })
    return out


def _decode_blocks(kind: str, docs, location: str):
    out = []
    for i, b in enumerate(docs):
        loc = f"{location}.blocks[{i}]"
        try:
            subsys = tuple(int(x) for x in b["subsystems"])
            if kind == "channel":
                kraus = tuple(decode_matrix(k, f"{loc}.kraus[{j}]")[0]
                              for j, k in enumerate(b["kraus"]))
                out.append(ChannelBlock(subsys, kraus,
                                        tuple(int(d) for d in b["out_dims"])))
            else:
                ops = tuple(decode_matrix(op, f"{loc}.ops[{j}]")[0]
                            for j, op in enumerate(b["ops"]))
                out.append(InstrumentBlock(subsys, tuple(b["outcomes"]), ops))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"missing or malformed field: {exc!r}", loc)
    return tuple(out)


def _encode_when(when):
    return None if when is None else [list(outcome) for outcome in when]


def _decode_when(doc):
    return None if doc is None else tuple(tuple(o) for o in doc)


def encode_protocol(p: Protocol) -> dict:
    rounds = []
    for rnd in p.rounds:
        r = {"kind": rnd.kind}
        if rnd.route is not None:
            r["route"] = [int(x) for x in rnd.route]
        if len(rnd.cases) == 1 and rnd.cases[0][0] is None:
            r["blocks"] = _encode_blocks(rnd.kind, rnd.cases[0][1], p.field)
        else:
            r["cases"] = [{"when": _encode_when(when),
                           "blocks": _encode_blocks(rnd.kind, blocks,
                                                    p.field)}
                          for when, blocks in rnd.cases]
        rounds.append(r)
    return {
        "type": "protocol",
        "field": p.field,
        "dims": [int(d) for d in p.dims],
        "initial_state": encode_matrix(p.initial_state, list(p.dims), p.field),
        "rounds": rounds,
    }


def decode_protocol(doc: dict, location: str = "protocol") -> Protocol:
    if doc.get("type") != "protocol":
        raise ParseError("expected type 'protocol'", location)
    field = doc.get("field", "C")
    try:
        dims = tuple(int(d) for d in doc["dims"])
        state = decode_matrix(doc["initial_state"],
                              f"{location}.initial_state")[0]
        rounds = []
        for t, r in enumerate(doc["rounds"]):
            loc = f"{location}.rounds[{t}]"
            kind = r["kind"]
            route = tuple(int(x) for x in r["route"]) if "route" in r else None
            if "blocks" in r:
                cases = ((None, _decode_blocks(kind, r["blocks"], loc)),)
            else:
                cases = tuple(
                    (_decode_when(c.get("when")),
                     _decode_blocks(kind, c["blocks"], f"{loc}.cases[{i}]"))
                    for i, c in enumerate(r["cases"]))
            rounds.append(Round(kind, cases, route))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing or malformed field: {exc!r}", location)
    return Protocol(state, dims, rounds, field)


# ---- documents ---------------------------------------------------------------


def encode_document(obj) -> dict:
    if isinstance(obj, NetworkScenario):
        return encode_scenario(obj)
    if isinstance(obj, Protocol):
        return encode_protocol(obj)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def load_document(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(str(exc), path)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno} column "
                         f"{exc.colno}: {exc.msg}", path)


def decode_document(doc: dict, location: str = "input"):
    """Dispatch on the document's type tag; returns a model object or, for
    embedded bundles, a dict of them."""
    kind = doc.get("type")
    if kind == "scenario":
        return decode_scenario(doc, location)
    if kind == "protocol":
        return decode_protocol(doc, location)
    if kind == "embedded-scenario":
        return {"qt": decode_scenario(doc["qt"], f"{location}.qt"),
                "real": decode_scenario(doc["real"], f"{location}.real"),
                "certificate": doc.get("certificate")}
    if kind == "embedded-protocol":
        return {"qt": decode_protocol(doc["qt"], f"{location}.qt"),
                "real": decode_protocol(doc["real"], f"{location}.real")}
    raise ParseError(f"unknown document type {kind!r}", location)


def dump_json(doc: dict, path: str | None = None) -> str:
    text = json.dumps(doc, indent=2, sort_keys=False)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
