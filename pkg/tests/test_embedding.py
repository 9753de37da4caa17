import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from realembed import embedding as emb
from realembed.linalg import fnorm, min_eigval_sym, permute_factors

J = emb.J2


@pytest.fixture
def rng():
    return np.random.default_rng(777)


def rand_c(rng, d, d2=None):
    return rng.normal(size=(d, d2 or d)) + 1j * rng.normal(size=(d, d2 or d))


def rand_herm(rng, d):
    a = rand_c(rng, d)
    return a + a.conj().T


class TestGamma:
    def test_imaginary_unit_maps_to_j(self):
        assert np.allclose(emb.gamma(1j * np.eye(3)),
                           np.kron(J, np.eye(3)), atol=0)

    def test_unital(self):
        assert np.array_equal(emb.gamma(np.eye(4)), np.eye(8))

    def test_multiplicative(self, rng):
        a, b = rand_c(rng, 2), rand_c(rng, 2)
        # both sides computed independently
        assert fnorm(emb.gamma(a @ b) - emb.gamma(a) @ emb.gamma(b)) < 1e-12

    def test_real_linear(self, rng):
        a, b = rand_c(rng, 3), rand_c(rng, 3)
        assert fnorm(emb.gamma(2 * a - 3 * b)
                     - (2 * emb.gamma(a) - 3 * emb.gamma(b))) < 1e-12

    def test_adjoint_to_transpose(self, rng):
        a = rand_c(rng, 3)
        assert fnorm(emb.gamma(a.conj().T) - emb.gamma(a).T) < 1e-12

    def test_trace_rescaling(self, rng):
        h = rand_herm(rng, 3)
        assert abs(np.trace(h) - 0.5 * np.trace(emb.gamma(h))) < 1e-12

    def test_inner_product_rescaling(self, rng):
        a, b = rand_herm(rng, 3), rand_herm(rng, 3)
        assert abs(np.vdot(a, b) - 0.5 * np.trace(emb.gamma(a).T
                                                  @ emb.gamma(b))) < 1e-12

    def test_psd_preserved(self, rng):
        a = rand_c(rng, 3)
        psd = a.conj().T @ a
        assert min_eigval_sym(emb.gamma(psd)) > -1e-12


class TestPhaseRep:
    def test_fold_one(self):
        rep = emb.phase_rep(1)
        assert np.array_equal(rep.i_mat, np.eye(2))
        assert np.array_equal(rep.j_mat, J)

    def test_fold_two_explicit(self):
        rep = emb.phase_rep(2)
        assert np.allclose(rep.i_mat,
                           (np.kron(np.eye(2), np.eye(2)) - np.kron(J, J)) / 2)
        assert np.allclose(rep.j_mat,
                           (np.kron(J, np.eye(2)) + np.kron(np.eye(2), J)) / 2)

    def test_invalid_fold(self):
        with pytest.raises(emb.ShapeError):
            emb.phase_rep(0)
        with pytest.raises(emb.ShapeError):
            emb.phase_rep_closed_form(9)

    @pytest.mark.parametrize("n", range(1, 7))
    def test_recursion_matches_closed_form(self, n):
        rec = emb.phase_rep(n)
        cf = emb.phase_rep_closed_form(n)
        assert fnorm(rec.i_mat - cf.i_mat) < 1e-12
        assert fnorm(rec.j_mat - cf.j_mat) < 1e-12

    @pytest.mark.parametrize("n", range(1, 6))
    def test_algebra(self, n):
        rep = emb.phase_rep(n)
        assert fnorm(rep.i_mat @ rep.i_mat - rep.i_mat) < 1e-12
        assert fnorm(rep.j_mat @ rep.j_mat + rep.i_mat) < 1e-12
        assert fnorm(rep.i_mat @ rep.j_mat - rep.j_mat) < 1e-12
        assert fnorm(rep.j_mat @ rep.i_mat - rep.j_mat) < 1e-12
        assert abs(np.trace(rep.i_mat) - 2.0) < 1e-12
        assert fnorm(rep.j_mat + rep.j_mat.T) < 1e-12  # antisymmetric

    @pytest.mark.parametrize("n", range(2, 6))
    def test_permutation_invariance(self, n, rng):
        rep = emb.phase_rep(n)
        for _ in range(5):
            perm = list(rng.permutation(n))
            assert fnorm(permute_factors(rep.i_mat, [2] * n, perm)
                         - rep.i_mat) < 1e-12
            assert fnorm(permute_factors(rep.j_mat, [2] * n, perm)
                         - rep.j_mat) < 1e-12

    @pytest.mark.parametrize("n", range(2, 6))
    def test_grouping(self, n):
        rep = emb.phase_rep(n)
        for k in range(1, n):
            lft, rgt = emb.phase_rep(n - k), emb.phase_rep(k)
            assert fnorm(rep.i_mat - (np.kron(lft.i_mat, rgt.i_mat)
                                      - np.kron(lft.j_mat, rgt.j_mat)) / 2
                         ) < 1e-12
            assert fnorm(rep.j_mat - (np.kron(lft.j_mat, rgt.i_mat)
                                      + np.kron(lft.i_mat, rgt.j_mat)) / 2
                         ) < 1e-12

    @pytest.mark.parametrize("n", range(1, 5))
    def test_globality(self, n):
        full = emb.phase_rep(n)
        for k in range(1, n + 1):
            sub = emb.phase_rep(k)
            pad = np.eye(2 ** (n - k))
            i_sub, j_sub = np.kron(sub.i_mat, pad), np.kron(sub.j_mat, pad)
            i2 = full.i_mat @ full.i_mat
            j2 = full.j_mat @ full.j_mat
            assert fnorm(i_sub @ full.i_mat - i2) < 1e-12
            assert fnorm(j_sub @ full.j_mat - j2) < 1e-12
            assert fnorm(i_sub @ full.j_mat - full.j_mat) < 1e-12
            assert fnorm(j_sub @ full.i_mat - full.j_mat) < 1e-12


class TestGammaN:
    def test_single_fold_reduces_to_gamma(self, rng):
        a = rand_c(rng, 3)
        assert fnorm(emb.gamma_n(a, [3]) - emb.gamma(a)) < 1e-14

    def test_trace_rescaling(self, rng):
        h = rand_herm(rng, 6)
        assert abs(2 * np.trace(h) - np.trace(emb.gamma_n(h, [2, 3]))) < 1e-12

    def test_isometric_up_to_half(self, rng):
        a, b = rand_c(rng, 6), rand_c(rng, 6)
        ga, gb = emb.gamma_n(a, [2, 3]), emb.gamma_n(b, [2, 3])
        assert abs(np.vdot(a, b).real - 0.5 * np.trace(ga.T @ gb)) < 1e-10

    def test_multiplicative(self, rng):
        a, b = rand_c(rng, 4), rand_c(rng, 4)
        assert fnorm(emb.gamma_n(a @ b, [2, 2])
                     - emb.gamma_n(a, [2, 2]) @ emb.gamma_n(b, [2, 2])) < 1e-10

    def test_gathered_view_recoverable(self, rng):
        a = rand_c(rng, 6)
        dims = [2, 3]
        inter = emb.gamma_n(a, dims)
        rep = emb.phase_rep(2)
        gathered = np.kron(rep.i_mat, a.real) + np.kron(rep.j_mat, a.imag)
        back = permute_factors(inter, emb.interleaved_dims(dims),
                               emb.gather_perm(2))
        assert fnorm(back - gathered) < 1e-14

    def test_factor_count_mismatch(self, rng):
        with pytest.raises(emb.ShapeError):
            emb.phase_pad(np.eye(4), [2, 2, 2])


class TestRProduct:
    def test_identity_composition(self):
        i1 = emb.phase_pad(emb.phase_rep(1).i_mat, [2])
        i2 = emb.phase_pad(emb.phase_rep(1).i_mat, [3])
        got = emb.r_product(i1, [2], i2, [3])
        want = emb.phase_pad(emb.phase_rep(2).i_mat, [2, 3])
        assert fnorm(got - want) < 1e-12

    def test_j_composition_gives_minus_identity(self):
        j1 = emb.phase_pad(emb.phase_rep(1).j_mat, [2])
        j2 = emb.phase_pad(emb.phase_rep(1).j_mat, [3])
        got = emb.r_product(j1, [2], j2, [3])
        want = -emb.phase_pad(emb.phase_rep(2).i_mat, [2, 3])
        assert fnorm(got - want) < 1e-12

    def test_image_of_kronecker(self, rng):
        x, y = rand_c(rng, 2), rand_c(rng, 3)
        lhs = emb.gamma_n(np.kron(x, y), [2, 3])
        rhs = emb.r_product(emb.gamma_n(x, [2]), [2],
                            emb.gamma_n(y, [3]), [3])
        assert fnorm(lhs - rhs) < 1e-10

    def test_fold_metadata_checked(self, rng):
        with pytest.raises(emb.ShapeError):
            emb.r_product(np.eye(4), [2, 2], np.eye(4), [2])


class TestContamination:
    def test_four_equalities(self, rng):
        for _ in range(30):
            a, b = rand_herm(rng, 2), rand_herm(rng, 2)
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
            assert max(abs(t1 - t2), abs(t1 - t3), abs(t1 - t4)) < 1e-10


class TestRelocalise:
    def test_single_fold_is_identity(self, rng):
        g = emb.gamma(rand_c(rng, 3))
        assert fnorm(emb.relocalise(g, [3]) - g) < 1e-12

    def test_unital_composition(self):
        g = emb.gamma_n(np.eye(6), [2, 3])
        assert fnorm(emb.relocalise(g, [2, 3]) - np.eye(24)) < 1e-12

    def test_trace_pairing_preserved(self, rng):
        a, b = rand_herm(rng, 4), rand_herm(rng, 4)
        ga, gb = emb.gamma_n(a, [2, 2]), emb.gamma_n(b, [2, 2])
        assert abs(np.trace(ga @ gb)
                   - np.trace(ga @ emb.relocalise(gb, [2, 2]))) < 1e-10

    def test_matches_localized_map(self, rng):
        a = rand_c(rng, 6)
        for slot in (0, 1):
            assert fnorm(emb.relocalise(emb.gamma_n(a, [2, 3]), [2, 3], slot)
                         - emb.loc_gamma(a, [2, 3], slot=slot)) < 1e-10

    def test_slot_out_of_range(self):
        with pytest.raises(emb.ShapeError):
            emb.relocalise(np.eye(8), [2], slot=1)

    def test_localized_map_is_homomorphism_and_unital(self, rng):
        a, b = rand_c(rng, 4), rand_c(rng, 4)
        la_, lb = emb.loc_gamma(a, [2, 2]), emb.loc_gamma(b, [2, 2])
        assert fnorm(emb.loc_gamma(a @ b, [2, 2]) - la_ @ lb) < 1e-10
        assert fnorm(emb.loc_gamma(a.conj().T, [2, 2]) - la_.T) < 1e-12
        assert np.array_equal(emb.loc_gamma(np.eye(4), [2, 2]), np.eye(16))

    def test_localized_rectangular_normalization(self, rng):
        # an isometry-slice pair stays exactly normalized after embedding
        u = np.linalg.qr(rand_c(rng, 4))[0]
        ks = [np.ascontiguousarray(u.reshape(2, 2, 2, 2)[:, i, :, 0])
              for i in range(2)]
        total = sum(emb.loc_gamma(k, [2], [2]).T
                    @ emb.loc_gamma(k, [2], [2]) for k in ks)
        assert fnorm(total - np.eye(4)) < 1e-12


class TestSpecialSymmetric:
    def test_hermitian_image_certified(self, rng):
        h = rand_herm(rng, 3)
        j_ref = emb.phase_pad(J, [3])
        cert = emb.is_special_symmetric(emb.gamma(h), j_ref, 1e-12)
        assert cert.valid

    def test_j_fails_symmetry(self):
        cert = emb.is_special_symmetric(J, J, 1e-9)
        assert cert.symmetry_defect > 0.1

    def test_symmetric_non_commuting_fails(self, rng):
        j_ref = emb.phase_pad(J, [2])
        s = rng.normal(size=(4, 4))
        s = s + s.T
        assert fnorm(j_ref @ s - s @ j_ref) > 1e-6  # construction check
        cert = emb.is_special_symmetric(s, j_ref, 1e-9)
        assert not cert.valid and cert.symmetry_defect < 1e-12


class TestInverseGamma:
    def test_identity(self):
        got = emb.inverse_gamma(np.eye(6), [3])
        assert fnorm(got - np.eye(3)) < 1e-12

    def test_phase_generator(self):
        got = emb.inverse_gamma(emb.phase_pad(J, [3]), [3])
        assert fnorm(got - 1j * np.eye(3)) < 1e-12

    def test_round_trip(self, rng):
        h = rand_herm(rng, 3)
        got = emb.inverse_gamma(emb.gamma(h), [3])
        assert fnorm(got - h) < 1e-12

    def test_two_fold_round_trip(self, rng):
        h = rand_herm(rng, 6)
        got = emb.inverse_gamma(emb.gamma_n(h, [2, 3]), [2, 3])
        assert fnorm(got - h) < 1e-12

    def test_precondition_enforced(self, rng):
        with pytest.raises(emb.ShapeError):
            emb.inverse_gamma(np.diag([1.0, 2.0, 3.0, 4.0]), [2])


class TestProjectorAbsorption:
    @pytest.mark.parametrize("n", [2, 3])
    def test_embedded_hermitian_absorbed(self, n, rng):
        dims = [2] * n
        a = emb.gamma_n(rand_herm(rng, 2 ** n), dims)
        i_pad = emb.phase_pad(emb.phase_rep(n).i_mat, dims)
        j_pad = emb.phase_pad(emb.phase_rep(n).j_mat, dims)
        assert fnorm(a - i_pad @ a) < 1e-10
        assert fnorm(a - a @ i_pad) < 1e-10
        for k in range(1, n + 1):
            sub = np.kron(emb.phase_rep(k).j_mat, np.eye(2 ** (n - k)))
            assert fnorm(emb.phase_pad(sub, dims) @ a - j_pad @ a) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2 ** 31 - 1))
def test_gamma_homomorphism_property(d, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    b = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    assert fnorm(emb.gamma(a @ b) - emb.gamma(a) @ emb.gamma(b)) < 1e-10
    assert fnorm(emb.gamma(a.conj().T) - emb.gamma(a).T) < 1e-12
