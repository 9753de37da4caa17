"""Sequential adaptive protocols: rounds of locality-labelled channels and
instruments, branch-by-branch simulation, and the componentwise real
embedding.

A protocol carries an initial state over explicit tensor factors and an
ordered list of rounds.  Channel rounds apply one trace-preserving Kraus set
per block of factors; instrument rounds optionally permute factors, apply
one single-Kraus measurement operator per block and outcome, and undo the
permutation.  Round content may be conditioned on the outcome history.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import embedding as emb
from .linalg import (ShapeError, invert_perm, prod, validate_density,
                     validate_kraus)

DEFAULT_TOL = 1e-9
BRANCH_EPS = 1e-12


@dataclass(frozen=True)
class ChannelBlock:
    subsystems: tuple      # factor indices acted on, in operator order
    kraus: tuple           # Kraus operators (out_side x in_side)
    out_dims: tuple        # per-factor output dims (same count as inputs)


@dataclass(frozen=True)
class InstrumentBlock:
    subsystems: tuple
    outcomes: tuple        # outcome labels, in order
    ops: tuple             # one measurement operator per outcome


@dataclass(frozen=True)
class Round:
    kind: str              # "channel" | "instrument"
    cases: tuple           # ((when | None, blocks), ...); when = history tuple
    route: tuple | None = None   # instrument factor permutation

    def resolve(self, history):
        default = None
        for when, blocks in self.cases:
            if when is None:
                default = blocks
            elif tuple(when) == tuple(history):
                return blocks
        if default is None:
            raise ShapeError(f"no round content for history {history}")
        return default


@dataclass
class Protocol:
    initial_state: np.ndarray
    dims: tuple            # data factor dims of the initial state
    rounds: list
    field: str = "C"

    def validate(self, tol: float = DEFAULT_TOL):
        side = prod(self.dims)
        if np.asarray(self.initial_state).shape != (side, side):
            raise ShapeError("initial state side does not match dims")
        rep = validate_density(self.initial_state, tol)
        if not rep.valid:
            raise ShapeError(f"invalid initial state: {rep.violations}")
        for t, rnd in enumerate(self.rounds):
            if rnd.kind not in ("channel", "instrument"):
                raise ShapeError(f"unknown round kind {rnd.kind!r}")
            for _, blocks in rnd.cases:
                seen = [s for blk in blocks for s in blk.subsystems]
                if len(seen) != len(set(seen)):
                    raise ShapeError(f"round {t}: overlapping blocks")


def _apply_block_op(state, sides, subsystems, op, out_sides):
    """Apply ``op (x) identity`` to a state: op acts on the listed factors in
    their listed order; returns (new state, new per-factor sides)."""
    n = len(sides)
    subsystems = list(subsystems)
    rest = [i for i in range(n) if i not in subsystems]
    perm = subsystems + rest
    # bring block to the front
    t = np.asarray(state).reshape(list(sides) * 2)
    t = t.transpose(perm + [n + p for p in perm])
    b_in = prod(sides[i] for i in subsystems)
    r = prod(sides[i] for i in rest)
    t = t.reshape(b_in, r, b_in, r)
    op = np.asarray(op)
    b_out = op.shape[0]
    t = np.einsum("ab,brcs,dc->ards", op, t, op.conj(), optimize=True)
    new_front = [int(d) for d in out_sides]
    new_sides = [0] * n
    for pos, i in enumerate(subsystems):
        new_sides[i] = new_front[pos]
    for i in rest:
        new_sides[i] = sides[i]
    t = t.reshape(new_front + [sides[i] for i in rest]
                  + new_front + [sides[i] for i in rest])
    inv = invert_perm(perm)
    t = t.transpose(inv + [n + p for p in inv])
    side = prod(new_sides)
    return t.reshape(side, side), new_sides


def _apply_channel_block(state, dims, block: ChannelBlock, out_dims):
    total = None
    for k in block.kraus:
        term, new_dims = _apply_block_op(state, dims, block.subsystems, k,
                                         out_dims)
        total = term if total is None else total + term
    return total, new_dims


def _permute_state(state, sides, perm):
    n = len(sides)
    t = np.asarray(state).reshape(list(sides) * 2)
    t = t.transpose(list(perm) + [n + p for p in perm])
    side = prod(sides)
    return t.reshape(side, side), [sides[p] for p in perm]


@dataclass
class Branch:
    probability: float
    state: np.ndarray | None
    dims: tuple


def simulate(protocol: Protocol, eps: float = BRANCH_EPS) -> dict:
    """Expand every outcome history depth-first.

    Returns {history tuple -> Branch}; a history is one per-round tuple of
    per-block outcome labels for each instrument round.  Branches whose
    probability falls below ``eps`` carry no conditional state.
    """
    branches = {}

    def rec(state, dims, t, history):
        if t == len(protocol.rounds):
            p = float(np.trace(state).real)
            cond = state / p if p > eps else None
            branches[history] = Branch(p, cond, tuple(dims))
            return
        rnd = protocol.rounds[t]
        blocks = rnd.resolve(history)
        if rnd.kind == "channel":
            cur_state, cur_dims = state, list(dims)
            for blk in blocks:
                cur_state, cur_dims = _apply_channel_block(
                    cur_state, cur_dims, blk, [int(d) for d in blk.out_dims])
            rec(cur_state, cur_dims, t + 1, history)
            return
        # instrument round
        perm = (list(rnd.route) if rnd.route is not None
                else list(range(len(dims))))
        routed, routed_dims = _permute_state(state, dims, perm)
        inv = invert_perm(perm)
        for combo in itertools.product(*[range(len(b.outcomes))
                                         for b in blocks]):
            cur_state, cur_dims = routed, list(routed_dims)
            for blk, oi in zip(blocks, combo):
                cur_state, cur_dims = _apply_block_op(
                    cur_state, cur_dims, blk.subsystems, blk.ops[oi],
                    [cur_dims[i] for i in blk.subsystems])
            back_state, _ = _permute_state(cur_state, cur_dims, inv)
            outcome = tuple(blk.outcomes[oi]
                            for blk, oi in zip(blocks, combo))
            rec(back_state, list(dims), t + 1, history + (outcome,))

    rec(np.asarray(protocol.initial_state), list(protocol.dims), 0, ())
    total = sum(b.probability for b in branches.values())
    if abs(total - 1.0) > 1e-8:
        raise ShapeError(f"branch probabilities sum to {total}, not 1")
    return branches


# ---- embedding -------------------------------------------------------------


def embed_channel_block(block: ChannelBlock, in_dims) -> ChannelBlock:
    """Real counterpart of a channel block: each Kraus operator maps through
    the localized embedding over the block's fold count.  Depends only on
    the block itself — the surrounding protocol plays no role."""
    row = [int(d) for d in block.out_dims]
    col = [int(in_dims[i]) for i in range(len(block.subsystems))]
    kraus = tuple(emb.loc_gamma(k, row, col) for k in block.kraus)
    return ChannelBlock(tuple(block.subsystems), kraus, tuple(block.out_dims))


def embed_instrument_block(block: InstrumentBlock, in_dims) -> InstrumentBlock:
    dims = [int(d) for d in in_dims]
    ops = tuple(emb.loc_gamma(op, dims) for op in block.ops)
    return InstrumentBlock(tuple(block.subsystems), tuple(block.outcomes), ops)


def _dims_after(protocol: Protocol):
    """Per-round input dims, tracking channel resizing (history-independent
    dims are required: every case of a round must agree on out_dims)."""
    dims_in = []
    dims = list(protocol.dims)
    for rnd in protocol.rounds:
        dims_in.append(list(dims))
        if rnd.kind == "channel":
            out_maps = set()
            for _, blocks in rnd.cases:
                new = list(dims)
                for blk in blocks:
                    for pos, i in enumerate(blk.subsystems):
                        new[i] = int(blk.out_dims[pos])
                out_maps.add(tuple(new))
            if len(out_maps) != 1:
                raise ShapeError("conditioned cases disagree on output dims")
            dims = list(out_maps.pop())
    return dims_in


def embed_protocol(protocol: Protocol, tol: float = DEFAULT_TOL) -> Protocol:
    """Componentwise real translation of a complex protocol: the initial
    state maps through the halved n-fold embedding, every block operator
    through the localized embedding, and routing permutations act on the
    doubled (phase, data) factor pairs."""
    if protocol.field != "C":
        raise ShapeError("can only embed a complex protocol")
    protocol.validate(tol)
    dims_in = _dims_after(protocol)
    real_rounds = []
    for rnd, in_dims in zip(protocol.rounds, dims_in):
        cases = []
        for when, blocks in rnd.cases:
            r_blocks = []
            for blk in blocks:
                blk_in = [in_dims[i] for i in blk.subsystems]
                pair_subsys = tuple(2 * i + off for i in blk.subsystems
                                    for off in (0, 1))
                if rnd.kind == "channel":
                    e = embed_channel_block(blk, blk_in)
                    rep = validate_kraus(e.kraus, tol)
                    if not rep.valid:
                        raise ShapeError(f"embedded channel block invalid: "
                                         f"{rep.violations}")
                    pair_out = tuple(x for d in e.out_dims for x in (2, d))
                    r_blocks.append(ChannelBlock(pair_subsys, e.kraus,
                                                 pair_out))
                else:
                    e = embed_instrument_block(blk, blk_in)
                    rep = validate_kraus(e.ops, tol)
                    if not rep.valid:
                        raise ShapeError(f"embedded instrument block invalid:"
                                         f" {rep.violations}")
                    r_blocks.append(InstrumentBlock(pair_subsys, e.outcomes,
                                                    e.ops))
            cases.append((when, tuple(r_blocks)))
        route = None
        if rnd.route is not None:
            route = tuple(x for p in rnd.route for x in (2 * p, 2 * p + 1))
        real_rounds.append(Round(rnd.kind, tuple(cases), route))
    r_state = 0.5 * emb.gamma_n(protocol.initial_state, protocol.dims)
    pair_dims = []
    for d in protocol.dims:
        pair_dims.extend((2, int(d)))
    return Protocol(r_state, tuple(pair_dims), real_rounds, field="R")


# ---- verification ----------------------------------------------------------


@dataclass
class ProtocolReport:
    max_deviation: float
    branch_count: int
    per_branch: dict
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {"max_deviation": self.max_deviation,
                "branch_count": self.branch_count,
                "per_branch": {"|".join(",".join(map(str, o)) for o in k) or
                               "(none)": v for k, v in self.per_branch.items()},
                "tol": self.tol,
                "passed": self.passed}


def prefix_probabilities(branches):
    """p(prefix) for every outcome-history prefix, summed over full
    strings."""
    out = {}
    full = {h: br.probability for h, br in branches.items()}
    for hist, p in full.items():
        for t in range(len(hist) + 1):
            out.setdefault(hist[:t], 0.0)
    for pre in out:
        out[pre] = sum(p for h, p in full.items() if h[:len(pre)] == pre)
    return out


def verify_protocol_equivalence(protocol: Protocol, real: Protocol,
                                tol: float = DEFAULT_TOL,
                                eps: float = BRANCH_EPS) -> ProtocolReport:
    """Simulate both protocols and compare full-string probabilities and
    every conditional distribution along prefixes with weight above
    ``eps``."""
    b_qt = simulate(protocol, eps)
    b_r = simulate(real, eps)
    if set(b_qt) != set(b_r):
        raise ShapeError("outcome sets differ between the two protocols")
    per_branch = {}
    max_dev = 0.0
    for hist in b_qt:
        dev = abs(b_qt[hist].probability - b_r[hist].probability)
        per_branch[hist] = dev
        max_dev = max(max_dev, dev)
    pq = prefix_probabilities(b_qt)
    pr = prefix_probabilities(b_r)
    for pre, p in pq.items():
        if not pre or p <= eps:
            continue
        parent_q = pq[pre[:-1]]
        parent_r = pr[pre[:-1]]
        if parent_q > eps and parent_r > eps:
            dev = abs(p / parent_q - pr[pre] / parent_r)
            max_dev = max(max_dev, dev)
    return ProtocolReport(max_dev, len(b_qt), per_branch, tol,
                          max_dev <= tol)


# ---- randomized instances ----------------------------------------------------


def _haar_unitary(rng, d: int) -> np.ndarray:
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def _random_density(rng, d: int) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def _random_partition(rng, n: int):
    order = list(rng.permutation(n))
    blocks = []
    while order:
        take = int(rng.integers(1, min(2, len(order)) + 1))
        blocks.append(tuple(order[:take]))
        order = order[take:]
    return blocks


def _random_channel_blocks(rng, dims):
    blocks = []
    for subsys in _random_partition(rng, len(dims)):
        side = prod(dims[i] for i in subsys)
        env = int(rng.integers(1, 3))
        u = _haar_unitary(rng, side * env).reshape(side, env, side, env)
        kraus = tuple(np.ascontiguousarray(u[:, i, :, 0])
                      for i in range(env))
        blocks.append(ChannelBlock(subsys, kraus,
                                   tuple(dims[i] for i in subsys)))
    return tuple(blocks)


def _random_instrument_blocks(rng, dims):
    blocks = []
    for subsys in _random_partition(rng, len(dims)):
        side = prod(dims[i] for i in subsys)
        v = _haar_unitary(rng, side)
        split = int(rng.integers(1, side))
        p0 = np.diag([1.0 if i < split else 0.0 for i in range(side)])
        p1 = np.eye(side) - p0
        blocks.append(InstrumentBlock(subsys, ("0", "1"),
                                      (p0 @ v, p1 @ v)))
    return tuple(blocks)


def random_protocol(rng, n_parties: int | None = None,
                    horizon: int | None = None) -> Protocol:
    """A random adaptive protocol on qubit factors: per round, a channel
    round of Haar-derived Kraus blocks followed by an instrument round with
    a random routing permutation; with a two-round horizon the second
    instrument is conditioned on the first outcome."""
    n = int(n_parties if n_parties is not None else rng.integers(1, 4))
    horizon = int(horizon if horizon is not None else rng.integers(1, 3))
    dims = (2,) * n
    rounds = []
    first_outcomes = None
    for t in range(horizon):
        rounds.append(Round("channel",
                            ((None, _random_channel_blocks(rng, dims)),)))
        route = tuple(int(p) for p in rng.permutation(n))
        if t == 1 and first_outcomes is not None:
            # condition the second measurement on one specific history
            special = (tuple("0" for _ in first_outcomes),)
            cases = ((None, _random_instrument_blocks(rng, dims)),
                     (special, _random_instrument_blocks(rng, dims)))
        else:
            blocks = _random_instrument_blocks(rng, dims)
            cases = ((None, blocks),)
            first_outcomes = cases[0][1]
        rounds.append(Round("instrument", cases, route))
    return Protocol(_random_density(rng, 2 ** n), dims, rounds)
