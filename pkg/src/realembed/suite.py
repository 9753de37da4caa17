"""Named algebraic property checks for the embedding machinery.

Each check runs a batch of randomized or exhaustive identities and reports
its worst residual.  The CLI's ``check-algebra`` command and the service's
algebra endpoint drive this suite; ``inject_fault`` deliberately perturbs
one input so the failure path is testable end to end.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import embedding as emb
from .linalg import fnorm, min_eigval_sym, permute_factors, rel_scale

STRICT_TOL = 1e-12
RANDOM_TOL = 1e-10


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_residual: float
    tol: float

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed),
                "max_residual": float(self.max_residual), "tol": self.tol}


def _rand_complex(rng, d):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def check_standard_mapping(rng, pairs: int = 50) -> CheckResult:
    """Homomorphism, adjoint-transpose, positivity, trace and inner-product
    rescaling of the single-fold map on random pairs."""
    worst = 0.0
    for _ in range(pairs):
        d = int(rng.integers(2, 9))
        a = _rand_complex(rng, d)
        b = _rand_complex(rng, d)
        ga, gb = emb.gamma(a), emb.gamma(b)
        scale = rel_scale(ga, gb)
        worst = max(worst,
                    fnorm(emb.gamma(a + b) - (ga + gb)) / scale,
                    fnorm(emb.gamma(2.5 * a) - 2.5 * ga) / scale,
                    fnorm(emb.gamma(a @ b) - ga @ gb) / (scale * scale),
                    fnorm(emb.gamma(a.conj().T) - ga.T) / scale,
                    abs(np.trace(a).real - 0.5 * np.trace(ga)) / scale,
                    abs(np.vdot(a, b).real
                        - 0.5 * np.trace(ga.T @ gb)) / (scale * scale),
                    fnorm(emb.gamma(np.eye(d)) - np.eye(2 * d)),
                    fnorm(emb.gamma(1j * np.eye(d))
                          - np.kron(emb.J2, np.eye(d))))
        psd = a.conj().T @ a
        worst = max(worst, max(0.0, -min_eigval_sym(emb.gamma(psd)))
                    / rel_scale(psd))
    return CheckResult("standard-mapping-homomorphism", bool(worst <= RANDOM_TOL),
                       worst, RANDOM_TOL)


def check_phase_rep_algebra(rng, max_fold: int = 5,
                            inject_fault: bool = False) -> CheckResult:
    """Idempotence/anti-idempotence/absorption of the phase pair, its
    invariance under factor permutations, and the fold-grouping identity."""
    worst = 0.0
    for n in range(1, max_fold + 1):
        rep = emb.phase_rep(n)
        i_mat, j_mat = rep.i_mat, rep.j_mat
        if inject_fault and n == 2:
            j_mat = j_mat + 1e-3
        worst = max(worst,
                    fnorm(i_mat @ i_mat - i_mat),
                    fnorm(j_mat @ j_mat + i_mat),
                    fnorm(i_mat @ j_mat - j_mat),
                    fnorm(j_mat @ i_mat - j_mat))
        for _ in range(10):
            perm = list(rng.permutation(n))
            worst = max(worst,
                        fnorm(permute_factors(i_mat, [2] * n, perm) - i_mat),
                        fnorm(permute_factors(j_mat, [2] * n, perm) - j_mat))
        for k in range(1, n):
            left = emb.phase_rep(n - k)
            right = emb.phase_rep(k)
            worst = max(worst,
                        fnorm(i_mat - (np.kron(left.i_mat, right.i_mat)
                                       - np.kron(left.j_mat, right.j_mat)) / 2),
                        fnorm(j_mat - (np.kron(left.j_mat, right.i_mat)
                                       + np.kron(left.i_mat, right.j_mat)) / 2))
    return CheckResult("phase-rep-algebra", bool(worst <= STRICT_TOL), worst,
                       STRICT_TOL)


def check_phase_rep_closed_form(max_fold: int = 5) -> CheckResult:
    worst = 0.0
    for n in range(1, min(max_fold, emb.CLOSED_FORM_MAX_FOLD) + 1):
        rec = emb.phase_rep(n)
        cf = emb.phase_rep_closed_form(n)
        worst = max(worst, fnorm(rec.i_mat - cf.i_mat),
                    fnorm(rec.j_mat - cf.j_mat))
    return CheckResult("phase-rep-closed-form", bool(worst <= STRICT_TOL), worst,
                       STRICT_TOL)


def check_phase_rep_globality(max_fold: int = 4) -> CheckResult:
    """A leading sub-fold phase pair acts on the full pair like the full pair
    itself."""
    worst = 0.0
    for n in range(1, min(max_fold, 4) + 1):
        full = emb.phase_rep(n)
        for k in range(1, n + 1):
            sub = emb.phase_rep(k)
            pad = np.eye(2 ** (n - k))
            i_sub = np.kron(sub.i_mat, pad)
            j_sub = np.kron(sub.j_mat, pad)
            worst = max(worst,
                        fnorm(i_sub @ full.i_mat - full.i_mat @ full.i_mat),
                        fnorm(j_sub @ full.j_mat - full.j_mat @ full.j_mat),
                        fnorm(i_sub @ full.j_mat - full.j_mat),
                        fnorm(j_sub @ full.i_mat - full.j_mat),
                        fnorm(full.i_mat @ i_sub - full.i_mat),
                        fnorm(full.j_mat @ j_sub + full.i_mat),
                        fnorm(full.j_mat @ i_sub - full.j_mat),
                        fnorm(full.i_mat @ j_sub - full.j_mat))
    return CheckResult("phase-rep-globality", bool(worst <= STRICT_TOL), worst,
                       STRICT_TOL)


def check_contamination(rng, instances: int = 100) -> CheckResult:
    """Pairing an R-composed pair of embedded effects with Kronecker- or
    R-composed symmetric operators gives the same trace, equal to half the
    product of the marginal traces."""
    worst = 0.0
    for _ in range(instances):
        a = _rand_complex(rng, 2)
        a = a + a.conj().T
        b = _rand_complex(rng, 2)
        b = b + b.conj().T
        at, bt = emb.gamma(a), emb.gamma(b)
        ell = rng.normal(size=(4, 4))
        ell = ell + ell.T
        r = rng.normal(size=(4, 4))
        r = r + r.T
        arb = emb.r_product(at, [2], bt, [2])
        t1 = np.trace(arb @ np.kron(ell, r))
        t2 = np.trace(arb @ emb.r_product(ell, [2], r, [2]))
        t3 = 0.5 * np.trace(at @ ell) * np.trace(bt @ r)
        t4 = 0.5 * np.trace(np.kron(at, bt) @ np.kron(ell, r))
        scale = rel_scale(arb) * rel_scale(ell) * rel_scale(r)
        worst = max(worst, max(abs(t1 - t2), abs(t1 - t3), abs(t1 - t4))
                    / scale)
    return CheckResult("contamination", bool(worst <= RANDOM_TOL), worst,
                       RANDOM_TOL)


def check_special_symmetric_projector(rng, max_fold: int = 3) -> CheckResult:
    """Embedded Hermitian operators are absorbed by the padded phase
    projector, and any sub-fold antisymmetric phase acts like the full
    one."""
    worst = 0.0
    for n in range(1, max_fold + 1):
        dims = [2] * n
        h = _rand_complex(rng, 2 ** n)
        h = h + h.conj().T
        a = emb.gamma_n(h, dims)
        i_pad = emb.phase_pad(emb.phase_rep(n).i_mat, dims)
        j_pad = emb.phase_pad(emb.phase_rep(n).j_mat, dims)
        scale = rel_scale(a)
        worst = max(worst,
                    fnorm(a - i_pad @ a) / scale,
                    fnorm(a - a @ i_pad) / scale)
        for k in range(1, n + 1):
            sub = np.kron(emb.phase_rep(k).j_mat, np.eye(2 ** (n - k)))
            sub_pad = emb.phase_pad(sub, dims)
            worst = max(worst, fnorm(sub_pad @ a - j_pad @ a) / scale)
    return CheckResult("special-symmetric-projector", bool(worst <= RANDOM_TOL),
                       worst, RANDOM_TOL)


def check_n_fold_mapping(rng, max_fold: int = 3) -> CheckResult:
    """Trace and inner-product rescaling of the n-fold map, the R-product
    image property, relocalisation pairing, unitality of the localized map,
    and the inverse round-trip."""
    worst = 0.0
    for n in range(1, max_fold + 1):
        dims = [int(rng.integers(2, 4)) for _ in range(n)]
        d = int(np.prod(dims))
        a = _rand_complex(rng, d)
        b = _rand_complex(rng, d)
        ga, gb = emb.gamma_n(a, dims), emb.gamma_n(b, dims)
        scale = rel_scale(ga, gb)
        worst = max(worst,
                    abs(np.trace(a).real - 0.5 * np.trace(ga)) / scale,
                    abs(np.vdot(a, b).real
                        - 0.5 * np.trace(ga.T @ gb)) / (scale * scale),
                    fnorm(emb.gamma_n(a @ b, dims) - ga @ gb)
                    / (scale * scale),
                    fnorm(emb.loc_gamma(np.eye(d), dims)
                          - np.eye(2 ** n * d)) / scale)
        h = a + a.conj().T
        hb = b + b.conj().T
        gh, ghb = emb.gamma_n(h, dims), emb.gamma_n(hb, dims)
        worst = max(worst,
                    abs(np.trace(gh @ ghb)
                        - np.trace(gh @ emb.relocalise(ghb, dims)))
                    / rel_scale(gh, ghb) ** 2,
                    fnorm(emb.inverse_gamma(gh, dims) - h) / rel_scale(gh))
        if n >= 2:
            k = n // 2
            x = _rand_complex(rng, int(np.prod(dims[:k])))
            y = _rand_complex(rng, int(np.prod(dims[k:])))
            lhs = emb.gamma_n(np.kron(x, y), dims)
            rhs = emb.r_product(emb.gamma_n(x, dims[:k]), dims[:k],
                                emb.gamma_n(y, dims[k:]), dims[k:])
            worst = max(worst, fnorm(lhs - rhs) / rel_scale(lhs))
    return CheckResult("n-fold-mapping", bool(worst <= RANDOM_TOL), worst,
                       RANDOM_TOL)


def run_suite(max_fold: int = 5, seed: int | None = None,
              inject_fault: str | None = None) -> list:
    """Run every named check; returns the list of results in a fixed order."""
    rng = np.random.default_rng(seed)
    return [
        check_standard_mapping(rng),
        check_phase_rep_algebra(rng, max_fold,
                                inject_fault == "phase-rep"),
        check_phase_rep_closed_form(max_fold),
        check_phase_rep_globality(min(max_fold, 4)),
        check_contamination(rng),
        check_special_symmetric_projector(rng, min(max_fold, 3)),
        check_n_fold_mapping(rng, min(max_fold, 3)),
    ]
