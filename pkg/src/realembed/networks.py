"""Network scenarios: independent sources routed to parties, grouped
measurement blocks, Born-rule evaluation, and the real embedding.

A scenario over the complex field composes source states with the Kronecker
product.  Its real counterpart keeps one embedded state per source but
composes them with the rescaled R-product (``2 * r_product``), which is the
real image of the Kronecker product; block effects are embedded with the
localized map so they remain genuine POVMs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import embedding as emb
from .linalg import (ShapeError, fnorm, kron, partial_trace, permute_factors,
                     prod, rel_scale, validate_density, validate_povm)

DEFAULT_TOL = 1e-9

_LETTERS = "abcdefgh"
_COL_LETTERS = "ijklmnop"
_OUT_LETTERS = "qrstuvwx"


def expectation_tensor(bm_state: np.ndarray, sides, stacks) -> np.ndarray:
    """T[m_1..m_k] = Tr[state (S_m1 (x) ... (x) S_mk)] for a block-major
    state and one stacked operator family per block."""
    k = len(sides)
    subs = [_LETTERS[:k] + _COL_LETTERS[:k]]
    ops = [np.asarray(bm_state).reshape(list(sides) * 2)]
    for b in range(k):
        subs.append(_OUT_LETTERS[b] + _COL_LETTERS[b] + _LETTERS[b])
        ops.append(np.asarray(stacks[b]))
    return np.einsum(",".join(subs) + "->" + _OUT_LETTERS[:k], *ops,
                     optimize=True)


@dataclass(frozen=True)
class Party:
    name: str
    dim: int


@dataclass(frozen=True)
class Source:
    dims: tuple            # per-subsystem data dims
    state: np.ndarray      # joint state over the subsystems
    route: tuple           # party name per subsystem


@dataclass
class NetworkScenario:
    parties: list
    sources: list
    blocks: tuple          # tuple of tuples of party names
    povms: dict            # block index -> {setting key -> [effects]}
    field: str = "C"       # "C" complex Kronecker model, "R" embedded model

    # ---- structure helpers -------------------------------------------------

    def party(self, name: str) -> Party:
        for p in self.parties:
            if p.name == name:
                return p
        raise ShapeError(f"unknown party {name!r}")

    def subsystem_list(self):
        """Flattened (source index, position) list in source-major order."""
        return [(s, pos) for s, src in enumerate(self.sources)
                for pos in range(len(src.dims))]

    def subsystem_dims(self):
        return [self.sources[s].dims[pos] for s, pos in self.subsystem_list()]

    def party_subsystems(self, name: str):
        """Subsystems routed to a party, in arrival (source-major) order."""
        return [(s, pos) for s, pos in self.subsystem_list()
                if self.sources[s].route[pos] == name]

    def block_subsystems(self, block_idx: int):
        out = []
        for pname in self.blocks[block_idx]:
            out.extend(self.party_subsystems(pname))
        return out

    def block_data_dims(self, block_idx: int):
        return [self.sources[s].dims[pos]
                for s, pos in self.block_subsystems(block_idx)]

    def _factor_side(self, d: int) -> int:
        return 2 * d if self.field == "R" else d

    # ---- validation --------------------------------------------------------

    def validate(self, tol: float = DEFAULT_TOL):
        names = [p.name for p in self.parties]
        if len(set(names)) != len(names):
            raise ShapeError("duplicate party names")
        for src in self.sources:
            if len(src.route) != len(src.dims):
                raise ShapeError("route length != subsystem count")
            for pname in src.route:
                self.party(pname)
            side = prod(self._factor_side(d) for d in src.dims)
            if np.asarray(src.state).shape != (side, side):
                raise ShapeError(f"source state shape "
                                 f"{np.asarray(src.state).shape} != {side}")
            rep = validate_density(src.state, tol)
            if not rep.valid:
                raise ShapeError(f"invalid source state: {rep.violations}")
        covered = [n for blk in self.blocks for n in blk]
        if sorted(covered) != sorted(names):
            raise ShapeError("blocks must partition the parties")
        for pname in names:
            expected = prod(self.sources[s].dims[pos]
                            for s, pos in self.party_subsystems(pname))
            if expected != self.party(pname).dim:
                raise ShapeError(f"party {pname!r} dim {self.party(pname).dim}"
                                 f" != routed product {expected}")
        for b, blk in enumerate(self.blocks):
            side = prod(self._factor_side(d) for d in self.block_data_dims(b))
            fams = self.povms.get(b)
            if not fams:
                raise ShapeError(f"block {blk} has no measurement family")
            for setting, effects in fams.items():
                for e in effects:
                    if np.asarray(e).shape != (side, side):
                        raise ShapeError(
                            f"effect shape {np.asarray(e).shape} != {side} "
                            f"for block {blk} setting {setting}")
                rep = validate_povm(effects, tol)
                if not rep.valid:
                    raise ShapeError(f"invalid POVM for block {blk} setting "
                                     f"{setting}: {rep.violations}")

    # ---- state assembly and evaluation -------------------------------------

    def joint_state(self) -> np.ndarray:
        """Source-major joint state: Kronecker composition over the complex
        field, rescaled R-product composition over the real field."""
        cached = getattr(self, "_joint_cache", None)
        if cached is not None:
            return cached
        if self.field == "C":
            out = np.asarray(self.sources[0].state)
            for src in self.sources[1:]:
                out = np.kron(out, src.state)
        else:
            out = np.asarray(self.sources[0].state)
            acc_dims = list(self.sources[0].dims)
            for src in self.sources[1:]:
                out = 2.0 * emb.r_product(out, acc_dims, src.state, src.dims)
                acc_dims.extend(src.dims)
        self._joint_cache = out
        return out

    def _block_major_state(self) -> np.ndarray:
        cached = getattr(self, "_bm_cache", None)
        if cached is not None:
            return cached
        subsys = self.subsystem_list()
        target = [s for b in range(len(self.blocks))
                  for s in self.block_subsystems(b)]
        perm = [subsys.index(t) for t in target]
        data_dims = self.subsystem_dims()
        state = self.joint_state()
        if self.field == "C":
            bm = permute_factors(state, data_dims, perm)
        else:
            pair_dims = emb.interleaved_dims(data_dims)
            pair_perm = []
            for p in perm:
                pair_perm.extend((2 * p, 2 * p + 1))
            bm = permute_factors(state, pair_dims, pair_perm)
        self._bm_cache = bm
        return bm

    def setting_keys(self, block_idx: int):
        return sorted(self.povms[block_idx].keys())

    def evaluate(self, settings) -> dict:
        """Outcome distribution for one setting per block.

        ``settings`` is a sequence of setting keys, one per block, or a dict
        keyed by block index.  Returns {outcome tuple -> probability}.
        """
        nblocks = len(self.blocks)
        if isinstance(settings, dict):
            settings = [settings[b] for b in range(nblocks)]
        if len(settings) != nblocks:
            raise ShapeError(f"need {nblocks} settings, got {len(settings)}")
        effect_lists = []
        for b, key in enumerate(settings):
            if key not in self.povms[b]:
                raise ShapeError(f"unknown setting {key!r} for block "
                                 f"{self.blocks[b]}")
            effect_lists.append(self.povms[b][key])
        state = self._block_major_state()
        sides = [prod(self._factor_side(d) for d in self.block_data_dims(b))
                 for b in range(nblocks)]
        stacks = [np.stack([np.asarray(e) for e in effs])
                  for effs in effect_lists]
        tensor = expectation_tensor(state, sides, stacks)
        dist = {}
        for combo in itertools.product(*[range(len(e)) for e in effect_lists]):
            dist[combo] = float(tensor[combo].real)
        return dist

    def all_setting_tuples(self):
        return list(itertools.product(
            *[self.setting_keys(b) for b in range(len(self.blocks))]))


def evaluate_qt(scenario: NetworkScenario, settings) -> dict:
    if scenario.field != "C":
        raise ShapeError("expected a complex scenario")
    return scenario.evaluate(settings)


def evaluate_rqt(scenario: NetworkScenario, settings) -> dict:
    if scenario.field != "R":
        raise ShapeError("expected a real scenario")
    return scenario.evaluate(settings)


# ---- independence ----------------------------------------------------------


def _sym_basis(d: int):
    """Orthonormal basis of real symmetric d x d matrices."""
    out = []
    for i in range(d):
        e = np.zeros((d, d))
        e[i, i] = 1.0
        out.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d))
            e[i, j] = e[j, i] = 1.0 / np.sqrt(2.0)
            out.append(e)
    return np.stack(out)


def _herm_basis(d: int):
    """Orthonormal basis of Hermitian d x d matrices."""
    out = [m.astype(complex) for m in _sym_basis(d)]
    for i in range(d):
        for j in range(i + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[i, j] = -1j / np.sqrt(2.0)
            e[j, i] = 1j / np.sqrt(2.0)
            out.append(e)
    return np.stack(out)


@dataclass
class IndependenceVerdict:
    product_state: bool
    product_residual: float
    operational: bool
    operational_residual: float
    tol: float

    def to_dict(self) -> dict:
        return {"product_state": self.product_state,
                "product_residual": self.product_residual,
                "operational": self.operational,
                "operational_residual": self.operational_residual,
                "tol": self.tol}


def check_independence(state: np.ndarray, dims, partition, field: str = "C",
                       tol: float = DEFAULT_TOL) -> IndependenceVerdict:
    """Decide product-state and operational independence of ``state`` across
    a partition of its factors.

    The operational check verifies the factorization of expectation values
    on a complete basis of symmetric (real field) or Hermitian (complex
    field) effects per block; both sides are multilinear in the effects, so
    the basis check is exhaustive.
    """
    dims = [int(d) for d in dims]
    blocks = [list(b) for b in partition]
    flat = sorted(f for b in blocks for f in b)
    if flat != list(range(len(dims))):
        raise ShapeError("partition must cover every factor exactly once")
    order = [f for b in blocks for f in b]
    bm = permute_factors(np.asarray(state), dims, order)
    sides = [prod(dims[f] for f in b) for b in blocks]
    k = len(blocks)

    # marginals over the block-major layout
    marginals = []
    offset = 0
    for side_list in [[dims[f] for f in b] for b in blocks]:
        keep = list(range(offset, offset + len(side_list)))
        marginals.append(partial_trace(bm, [dims[f] for b in blocks
                                            for f in b], keep))
        offset += len(side_list)

    scale = rel_scale(bm)
    prod_resid = fnorm(bm - kron(*marginals)) / scale
    product_ok = prod_resid <= tol

    basis_fn = _sym_basis if field == "R" else _herm_basis
    bases = [basis_fn(s) for s in sides]
    t_full = expectation_tensor(bm, sides, bases)
    t_marg = [np.einsum("ai,mia->m", marginals[b].reshape(sides[b], sides[b]),
                        bases[b], optimize=True) for b in range(k)]
    outer = t_marg[0]
    for v in t_marg[1:]:
        outer = np.multiply.outer(outer, v)
    op_resid = float(np.max(np.abs(t_full - outer))) / scale
    operational_ok = op_resid <= tol
    return IndependenceVerdict(product_ok, float(prod_resid),
                               operational_ok, float(op_resid), tol)


def source_partition(scenario: NetworkScenario):
    """Factor-index partition of the joint state grouped by source."""
    out = []
    idx = 0
    for src in scenario.sources:
        out.append(list(range(idx, idx + len(src.dims))))
        idx += len(src.dims)
    return out


def joint_independence(scenario: NetworkScenario,
                       tol: float = DEFAULT_TOL) -> IndependenceVerdict:
    """Independence verdict of the scenario's joint state w.r.t. sources."""
    state = scenario.joint_state()
    if scenario.field == "C":
        dims = scenario.subsystem_dims()
        blocks = source_partition(scenario)
    else:
        dims = emb.interleaved_dims(scenario.subsystem_dims())
        blocks = [[2 * f + off for f in b for off in (0, 1)]
                  for b in source_partition(scenario)]
        blocks = [sorted(b) for b in blocks]
    return check_independence(state, dims, blocks, scenario.field, tol)


# ---- embedding -------------------------------------------------------------


@dataclass
class EmbeddingCertificate:
    source_reports: list = field(default_factory=list)
    povm_reports: dict = field(default_factory=dict)
    independence: dict | None = None
    valid: bool = True

    def to_dict(self) -> dict:
        return {"sources": self.source_reports,
                "povms": {str(k): v for k, v in self.povm_reports.items()},
                "independence": self.independence,
                "valid": self.valid}


def embed_network(scenario: NetworkScenario, tol: float = DEFAULT_TOL):
    """Translate a complex scenario into its real counterpart.

    Source states map through the halved n-fold embedding; block effects map
    through the localized embedding so each family stays a valid POVM.
    Returns the real scenario and a certificate of the checked evidence.
    """
    if scenario.field != "C":
        raise ShapeError("can only embed a complex scenario")
    scenario.validate(tol)
    real_sources = []
    cert = EmbeddingCertificate()
    for src in scenario.sources:
        r_state = 0.5 * emb.gamma_n(src.state, src.dims)
        rep = validate_density(r_state, tol)
        cert.source_reports.append(rep.to_dict())
        cert.valid = cert.valid and rep.valid
        real_sources.append(Source(tuple(src.dims), r_state, tuple(src.route)))
    real_parties = [Party(p.name, p.dim) for p in scenario.parties]
    real_povms = {}
    for b in range(len(scenario.blocks)):
        bdims = scenario.block_data_dims(b)
        fams = {}
        reports = {}
        for setting, effects in scenario.povms[b].items():
            r_effects = [emb.loc_gamma(e, bdims) for e in effects]
            rep = validate_povm(r_effects, tol)
            reports[setting] = rep.to_dict()
            cert.valid = cert.valid and rep.valid
            fams[setting] = r_effects
        real_povms[b] = fams
        cert.povm_reports[b] = reports
    real = NetworkScenario(real_parties, real_sources, scenario.blocks,
                           real_povms, field="R")
    if len(real.sources) > 1:
        verdict = joint_independence(real, tol)
        cert.independence = verdict.to_dict()
        cert.valid = cert.valid and verdict.operational
    return real, cert


# ---- equivalence -----------------------------------------------------------


@dataclass
class EquivalenceReport:
    max_deviation: float
    per_setting: dict
    independence: dict | None
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {"max_deviation": self.max_deviation,
                "per_setting": {"|".join(map(str, k)): v
                                for k, v in self.per_setting.items()},
                "independence": self.independence,
                "tol": self.tol,
                "passed": self.passed}


def verify_equivalence(qt: NetworkScenario, real: NetworkScenario,
                       tol: float = DEFAULT_TOL) -> EquivalenceReport:
    """Sweep every setting tuple and compare per-outcome probabilities of
    the complex scenario and its real counterpart."""
    per_setting = {}
    max_dev = 0.0
    for setting in qt.all_setting_tuples():
        p_qt = qt.evaluate(list(setting))
        p_rqt = real.evaluate(list(setting))
        dev = max(abs(p_qt[o] - p_rqt[o]) for o in p_qt)
        per_setting[setting] = dev
        max_dev = max(max_dev, dev)
    independence = None
    if len(real.sources) > 1:
        independence = joint_independence(real, tol).to_dict()
    passed = max_dev <= tol and (independence is None
                                 or independence["operational"])
    return EquivalenceReport(max_dev, per_setting, independence, tol, passed)
