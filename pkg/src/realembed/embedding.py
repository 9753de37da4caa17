"""Complex-to-real operator embeddings.

The single-fold map sends a complex matrix A to the real matrix
``I (x) Re{A} + J (x) Im{A}`` with ``I = [[1,0],[0,1]]`` and
``J = [[0,-1],[1,0]]``.  The n-fold variant delocalizes the phase over n
2-dim factors via the pair ``(i_mat(n), j_mat(n))`` of phase operators.

Factor-ordering convention: results are *interleaved* — each complex data
factor d_i is preceded by its 2-dim phase factor, giving dims
``[2, d_1, 2, d_2, ..., 2, d_n]``.  The alternative "gathered left" layout
``[2, ..., 2, d_1, ..., d_n]`` is reachable through the permutation
returned by :func:`gather_perm`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as iproduct

import numpy as np

from .linalg import (ShapeError, fnorm, invert_perm, kron, partial_trace,
                     permute_factors, prod, rel_scale)

I2 = np.eye(2)
J2 = np.array([[0.0, -1.0], [1.0, 0.0]])

CLOSED_FORM_MAX_FOLD = 8


@dataclass(frozen=True)
class PhaseRep:
    """The pair of 2^n x 2^n phase operators representing (1, i) over n
    delocalized 2-dim factors."""

    n: int
    i_mat: np.ndarray
    j_mat: np.ndarray


@lru_cache(maxsize=None)
def phase_rep(n: int) -> PhaseRep:
    """Phase representation by the recursive rule."""
    if n < 1:
        raise ShapeError(f"fold count must be >= 1, got {n}")
    if n == 1:
        i_mat, j_mat = I2.copy(), J2.copy()
    else:
        prev = phase_rep(n - 1)
        i_mat = (np.kron(prev.i_mat, I2) - np.kron(prev.j_mat, J2)) / 2
        j_mat = (np.kron(prev.j_mat, I2) + np.kron(prev.i_mat, J2)) / 2
    i_mat.setflags(write=False)
    j_mat.setflags(write=False)
    return PhaseRep(n, i_mat, j_mat)


def phase_rep_closed_form(n: int) -> PhaseRep:
    """Phase representation as an explicit sum over parity-constrained words
    of {identity, J} tensor factors.  Oracle path; capped at n = 8."""
    if n < 1 or n > CLOSED_FORM_MAX_FOLD:
        raise ShapeError(f"fold count must be in 1..{CLOSED_FORM_MAX_FOLD}")
    side = 2 ** n
    i_mat = np.zeros((side, side))
    j_mat = np.zeros((side, side))
    scale = 2.0 ** (-(n - 1))
    for word in iproduct((0, 1), repeat=n):
        w = sum(word)
        term = scale * kron(*[J2 if b else I2 for b in word])
        if w % 2 == 0:
            i_mat += (-1) ** (w // 2) * term
        else:
            j_mat += (-1) ** ((w - 1) // 2) * term
    return PhaseRep(n, i_mat, j_mat)


def interleave_perm(n: int):
    """Permutation taking gathered-left factors [p1..pn, d1..dn] to the
    interleaved order [p1, d1, p2, d2, ...]."""
    out = []
    for i in range(n):
        out.extend((i, n + i))
    return out


def gather_perm(n: int):
    """Inverse of :func:`interleave_perm`: interleaved -> gathered-left."""
    return invert_perm(interleave_perm(n))


def interleaved_dims(data_dims):
    out = []
    for d in data_dims:
        out.extend((2, int(d)))
    return out


def _interleave(gathered: np.ndarray, data_dims, col_data_dims=None):
    """Reorder a gathered-left matrix (dims [2]*n + data_dims) into the
    interleaved layout."""
    n = len(data_dims)
    perm = interleave_perm(n)
    rdims = [2] * n + [int(d) for d in data_dims]
    if col_data_dims is None:
        return permute_factors(gathered, rdims, perm)
    cdims = [2] * n + [int(d) for d in col_data_dims]
    return permute_factors(gathered, rdims, perm, cdims, perm)


def phase_pad(phase_mat: np.ndarray, data_dims) -> np.ndarray:
    """Pad a 2^n x 2^n phase operator with identities on the data factors,
    returned in the interleaved layout."""
    n = len(data_dims)
    if phase_mat.shape != (2 ** n, 2 ** n):
        raise ShapeError(f"phase operator shape {phase_mat.shape} does not "
                         f"match fold count {n}")
    return _interleave(np.kron(phase_mat, np.eye(prod(data_dims))), data_dims)


def gamma(a: np.ndarray) -> np.ndarray:
    """Single-fold complex-to-real map; accepts rectangular input."""
    a = np.asarray(a, dtype=complex)
    return np.kron(I2, a.real) + np.kron(J2, a.imag)


def gamma_n(a: np.ndarray, data_dims, col_data_dims=None) -> np.ndarray:
    """n-fold complex-to-real map in the interleaved layout.

    ``data_dims`` lists the complex factor dims (row side); rectangular
    operators pass ``col_data_dims`` with the same factor count.
    """
    a = np.asarray(a, dtype=complex)
    n = len(data_dims)
    rep = phase_rep(n)
    gathered = (np.kron(rep.i_mat, a.real) + np.kron(rep.j_mat, a.imag))
    return _interleave(gathered, data_dims, col_data_dims)


def loc_gamma(a: np.ndarray, data_dims, col_data_dims=None,
              slot: int = 0) -> np.ndarray:
    """Localized n-factor complex-to-real map: identity phase padding with a
    single J carrier at ``slot``.

    Equals ``relocalise(gamma_n(a, dims), dims, slot)`` but is defined for
    rectangular ``a`` as well.  Unlike :func:`gamma_n` it is unital, which
    is what makes embedded effect and measurement families normalize.
    """
    a = np.asarray(a, dtype=complex)
    n = len(data_dims)
    if not 0 <= slot < n:
        raise ShapeError(f"slot {slot} out of range for {n} folds")
    j_slot = kron(*[J2 if i == slot else I2 for i in range(n)])
    gathered = (np.kron(np.eye(2 ** n), a.real) + np.kron(j_slot, a.imag))
    return _interleave(gathered, data_dims, col_data_dims)


def r_product(a: np.ndarray, a_data_dims, b: np.ndarray,
              b_data_dims) -> np.ndarray:
    """Real image of the complex Kronecker product: the plain Kronecker
    product of two interleaved real operators, compressed by the combined
    phase projector on both sides."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[0] != 2 ** len(a_data_dims) * prod(a_data_dims):
        raise ShapeError("left operand inconsistent with its fold metadata")
    if b.shape[0] != 2 ** len(b_data_dims) * prod(b_data_dims):
        raise ShapeError("right operand inconsistent with its fold metadata")
    dims = list(a_data_dims) + list(b_data_dims)
    proj = phase_pad(phase_rep(len(dims)).i_mat, dims)
    return proj @ np.kron(a, b) @ proj


def phase_trace(a: np.ndarray, data_dims) -> np.ndarray:
    """Trace out the phase factors of an interleaved operator."""
    n = len(data_dims)
    return partial_trace(a, interleaved_dims(data_dims),
                         keep=[2 * i + 1 for i in range(n)])


def relocalise(a: np.ndarray, data_dims, slot: int = 0) -> np.ndarray:
    """Replace the delocalized phase state of an interleaved operator with
    one localized at phase factor ``slot``.

    Projections use the transposes of the phase operators so that the map
    is the identity at n = 1 and preserves pairings against n-fold images.
    """
    n = len(data_dims)
    if not 0 <= slot < n:
        raise ShapeError(f"slot {slot} out of range for {n} folds")
    rep = phase_rep(n)
    i_pad = phase_pad(rep.i_mat, data_dims)
    j_pad = phase_pad(rep.j_mat, data_dims)
    re_part = phase_trace(0.5 * i_pad @ a, data_dims)
    im_part = phase_trace(0.5 * j_pad.T @ a, data_dims)
    j_slot = kron(*[J2 if i == slot else I2 for i in range(n)])
    gathered = (np.kron(np.eye(2 ** n), re_part) + np.kron(j_slot, im_part))
    return _interleave(gathered, data_dims)


@dataclass(frozen=True)
class SpecialSymmetricCert:
    """Residuals certifying that a real operator is symmetric and commutes
    with the given phase reference."""

    symmetry_defect: float
    commutation_defect: float
    tol: float

    @property
    def valid(self) -> bool:
        return (self.symmetry_defect <= self.tol
                and self.commutation_defect <= self.tol)

    def to_dict(self) -> dict:
        return {"symmetry_defect": self.symmetry_defect,
                "commutation_defect": self.commutation_defect,
                "tol": self.tol, "valid": self.valid}


def is_special_symmetric(a: np.ndarray, j_ref: np.ndarray,
                         tol: float = 1e-9) -> SpecialSymmetricCert:
    a = np.asarray(a)
    j_ref = np.asarray(j_ref)
    if a.shape != j_ref.shape:
        raise ShapeError(f"size mismatch {a.shape} vs {j_ref.shape}")
    scale = rel_scale(a)
    return SpecialSymmetricCert(
        symmetry_defect=fnorm(a - a.T) / scale,
        commutation_defect=fnorm(j_ref @ a - a @ j_ref) / scale,
        tol=tol,
    )


def inverse_gamma(r: np.ndarray, data_dims, tol: float = 1e-9) -> np.ndarray:
    """Recover the complex operator whose n-fold real image is ``r``.

    Requires ``r`` to be in the image subspace: absorbed by the padded
    phase projector and commuting with the padded antisymmetric phase
    operator, checked to ``tol`` (relative).  Hermitian preimages are
    additionally symmetric, but anti-Hermitian ones (e.g. the phase
    generator itself) are not, so symmetry is not demanded here.
    """
    n = len(data_dims)
    rep = phase_rep(n)
    i_pad = phase_pad(rep.i_mat, data_dims)
    j_pad = phase_pad(rep.j_mat, data_dims)
    r = np.asarray(r)
    scale = rel_scale(r)
    absorption = fnorm(r - i_pad @ r) / scale
    commutation = fnorm(j_pad @ r - r @ j_pad) / scale
    if absorption > tol or commutation > tol:
        raise ShapeError(
            "operator is not in the embedding image: absorption defect "
            f"{absorption:.3e}, commutation defect "
            f"{commutation:.3e} (tol {tol:.1e})")
    re_part = 0.5 * phase_trace(i_pad @ r, data_dims)
    im_part = 0.5 * phase_trace(j_pad.T @ r, data_dims)
    return re_part + 1j * im_part
