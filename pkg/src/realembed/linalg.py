"""Dense matrix algebra with explicit tensor-factor bookkeeping.

Operators are plain numpy arrays; functions that need the tensor structure
take the per-factor dimensions explicitly.  The :class:`Operator` wrapper
bundles a matrix with its factor shape and numeric field for serialization
and validation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_TOL = 1e-9
MAX_SIDE = 4096


class ShapeError(ValueError):
    """Inconsistent factor shapes or sizes."""


def prod(dims) -> int:
    out = 1
    for d in dims:
        out *= int(d)
    return out


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices."""
    out = np.asarray(mats[0])
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def kron_field_check(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product requiring both operands over the same field."""
    if np.iscomplexobj(a) != np.iscomplexobj(b):
        raise ShapeError("kron operands must share a numeric field")
    return np.kron(a, b)


def _check_perm(perm, n: int):
    perm = list(perm)
    if len(perm) != n:
        raise ShapeError(f"permutation length {len(perm)} != factor count {n}")
    if sorted(perm) != list(range(n)):
        raise ShapeError(f"not a permutation of 0..{n - 1}: {perm}")
    return perm


def invert_perm(perm):
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return inv


def permute_factors(a: np.ndarray, dims, perm,
                    col_dims=None, col_perm=None) -> np.ndarray:
    """Conjugate ``a`` by the factor-permutation unitary.

    ``perm`` uses the convention ``output factor i = input factor perm[i]``,
    so the result's factor dims are ``[dims[p] for p in perm]``.  Rectangular
    operators may pass separate column dims/permutation.
    """
    dims = [int(d) for d in dims]
    perm = _check_perm(perm, len(dims))
    if col_dims is None:
        col_dims, col_perm = dims, perm
    else:
        col_dims = [int(d) for d in col_dims]
        col_perm = _check_perm(col_perm, len(col_dims))
    a = np.asarray(a)
    if a.shape != (prod(dims), prod(col_dims)):
        raise ShapeError(f"matrix shape {a.shape} does not match dims "
                         f"{dims} x {col_dims}")
    nr, nc = len(dims), len(col_dims)
    t = a.reshape(dims + col_dims)
    t = t.transpose(list(perm) + [nr + p for p in col_perm])
    rows = prod(dims)
    cols = prod(col_dims)
    return np.ascontiguousarray(t.reshape(rows, cols))


def permutation_matrix(dims, perm) -> np.ndarray:
    """Matrix S with S|i_1,..,i_n> = |i_{perm[1]},..>, i.e. S A S^T equals
    ``permute_factors(A, dims, perm)``."""
    dims = [int(d) for d in dims]
    perm = _check_perm(perm, len(dims))
    n = len(dims)
    side = prod(dims)
    t = np.eye(side).reshape(dims + dims)
    t = t.transpose(perm + list(range(n, 2 * n)))
    return np.ascontiguousarray(t.reshape(side, side))


def partial_trace(a: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out all factors not in ``keep``; kept factors stay in their
    original relative order."""
    dims = [int(d) for d in dims]
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise ShapeError(f"keep indices {keep} out of range for {n} factors")
    a = np.asarray(a)
    side = prod(dims)
    if a.shape != (side, side):
        raise ShapeError(f"matrix shape {a.shape} does not match dims {dims}")
    t = a.reshape(dims + dims)
    traced = [i for i in range(n) if i not in keep]
    for off, i in enumerate(sorted(traced, reverse=True)):
        t = np.trace(t, axis1=i, axis2=i + (n - off))
    kept_side = prod(dims[k] for k in keep)
    if kept_side == 1 and t.ndim == 0:
        return t.reshape(1, 1)
    return t.reshape(kept_side, kept_side)


def frobenius(a: np.ndarray, b: np.ndarray):
    """Frobenius inner product Tr[a^dagger b]."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ShapeError(f"size mismatch {a.shape} vs {b.shape}")
    return np.vdot(a, b)


def fnorm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def rel_scale(*mats) -> float:
    """Scale used for relative tolerances: max Frobenius norm, floored at 1."""
    return max(1.0, *(fnorm(m) for m in mats))


def min_eigval_sym(a: np.ndarray) -> float:
    """Minimum eigenvalue of the (Hermitian-)symmetrized part of ``a``."""
    a = np.asarray(a)
    h = (a + a.conj().T) / 2
    return float(np.linalg.eigvalsh(h).min())


@dataclass(frozen=True)
class Operator:
    """A dense operator with its tensor-factor dims and numeric field."""

    mat: np.ndarray
    dims: tuple
    field: str = "C"  # "C" or "R"

    def __post_init__(self):
        mat = np.asarray(self.mat)
        dims = tuple(int(d) for d in self.dims)
        if any(d < 1 for d in dims):
            raise ShapeError(f"factor dims must be >= 1: {dims}")
        side = prod(dims)
        if side > MAX_SIDE:
            raise ShapeError(f"side length {side} exceeds cap {MAX_SIDE}")
        if mat.shape != (side, side):
            raise ShapeError(f"matrix shape {mat.shape} does not match dims "
                             f"{dims} (side {side})")
        if self.field not in ("C", "R"):
            raise ShapeError(f"unknown field {self.field!r}")
        if self.field == "R":
            if np.iscomplexobj(mat):
                if fnorm(mat.imag) > 0:
                    raise ShapeError("real operator has nonzero imaginary part")
                mat = mat.real
            mat = mat.astype(float)
        else:
            mat = mat.astype(complex)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def side(self) -> int:
        return self.mat.shape[0]


@dataclass
class ValidityReport:
    """Violated invariants with their magnitudes; empty means valid."""

    violations: list = field(default_factory=list)

    def add(self, name: str, magnitude: float, tol: float):
        if magnitude > tol:
            self.violations.append({"invariant": name,
                                    "magnitude": float(magnitude)})

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"valid": self.valid, "violations": list(self.violations)}


def validate_density(mat: np.ndarray, tol: float = DEFAULT_TOL) -> ValidityReport:
    mat = np.asarray(mat)
    scale = rel_scale(mat)
    rep = ValidityReport()
    rep.add("hermitian", fnorm(mat - mat.conj().T), tol * scale)
    rep.add("psd", max(0.0, -min_eigval_sym(mat)), tol * scale)
    rep.add("unit-trace", abs(np.trace(mat) - 1.0), tol * scale)
    return rep


def validate_povm(effects, tol: float = DEFAULT_TOL) -> ValidityReport:
    rep = ValidityReport()
    if not effects:
        rep.add("nonempty", 1.0, 0.0)
        return rep
    side = np.asarray(effects[0]).shape[0]
    total = np.zeros((side, side), dtype=complex)
    for i, e in enumerate(effects):
        e = np.asarray(e)
        scale = rel_scale(e)
        rep.add(f"effect[{i}] hermitian", fnorm(e - e.conj().T), tol * scale)
        rep.add(f"effect[{i}] psd", max(0.0, -min_eigval_sym(e)), tol * scale)
        total = total + e
    rep.add("sums-to-identity", fnorm(total - np.eye(side)),
            tol * rel_scale(total))
    return rep


def validate_kraus(ops, tol: float = DEFAULT_TOL,
                   subchannel: bool = False) -> ValidityReport:
    """Channel check: sum_i K_i^dagger K_i = identity (or <= identity)."""
    rep = ValidityReport()
    if not ops:
        rep.add("nonempty", 1.0, 0.0)
        return rep
    cols = np.asarray(ops[0]).shape[1]
    total = np.zeros((cols, cols), dtype=complex)
    for k in ops:
        k = np.asarray(k)
        if k.shape[1] != cols:
            rep.add("consistent-input-dim", 1.0, 0.0)
            return rep
        total = total + k.conj().T @ k
    scale = rel_scale(total)
    if subchannel:
        rep.add("below-identity",
                max(0.0, -min_eigval_sym(np.eye(cols) - total)), tol * scale)
    else:
        rep.add("trace-preserving", fnorm(total - np.eye(cols)), tol * scale)
    return rep
