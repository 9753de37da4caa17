import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from realembed import linalg as la


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def rand_c(rng, d, d2=None):
    return rng.normal(size=(d, d2 or d)) + 1j * rng.normal(size=(d, d2 or d))


class TestKron:
    def test_scalar_case(self):
        assert np.allclose(la.kron(np.array([[2.0]]), np.array([[3.0]])),
                           [[6.0]])

    def test_identity_case(self):
        assert np.allclose(la.kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_j_kron_j_squares_to_identity(self):
        j = np.array([[0.0, -1.0], [1.0, 0.0]])
        jj = la.kron(j, j)
        # direct multiplication oracle
        assert np.allclose(jj @ jj, np.eye(4))

    def test_field_mismatch_rejected(self):
        with pytest.raises(la.ShapeError):
            la.kron_field_check(np.eye(2), np.eye(2).astype(complex))

    def test_bilinear_and_associative(self, rng):
        a, b, c = (rand_c(rng, 2) for _ in range(3))
        left = la.kron(la.kron(a, b), c)
        right = la.kron(a, la.kron(b, c))
        assert np.allclose(left, right, atol=1e-12)
        assert np.allclose(la.kron(a + 2 * b, c),
                           la.kron(a, c) + 2 * la.kron(b, c), atol=1e-12)


class TestPermuteFactors:
    def test_identity_perm(self, rng):
        a = rand_c(rng, 6)
        assert np.array_equal(la.permute_factors(a, [2, 3], [0, 1]), a)

    def test_basis_state_relabeling(self):
        ket01 = np.zeros((4, 4))
        ket01[1, 1] = 1.0  # |01><01|
        ket10 = np.zeros((4, 4))
        ket10[2, 2] = 1.0
        assert np.array_equal(la.permute_factors(ket01, [2, 2], [1, 0]),
                              ket10)

    def test_swap_matches_kron_swap(self, rng):
        a, b = rand_c(rng, 2), rand_c(rng, 2)
        swapped = la.permute_factors(np.kron(a, b), [2, 2], [1, 0])
        assert np.allclose(swapped, np.kron(b, a), atol=1e-12)

    def test_perm_then_inverse_is_identity(self, rng):
        dims = [2, 3, 2]
        a = rand_c(rng, 12)
        perm = [2, 0, 1]
        back = la.permute_factors(
            la.permute_factors(a, dims, perm),
            [dims[p] for p in perm], la.invert_perm(perm))
        assert np.array_equal(back, a)

    def test_bad_perm_rejected(self, rng):
        a = rand_c(rng, 4)
        with pytest.raises(la.ShapeError):
            la.permute_factors(a, [2, 2], [0])
        with pytest.raises(la.ShapeError):
            la.permute_factors(a, [2, 2], [0, 0])

    def test_matrix_form_agrees(self, rng):
        dims = [2, 3]
        a = rand_c(rng, 6)
        s = la.permutation_matrix(dims, [1, 0])
        assert np.allclose(s @ a @ s.T, la.permute_factors(a, dims, [1, 0]),
                           atol=1e-12)


class TestPartialTrace:
    def test_product_marginal(self, rng):
        a, b = rand_c(rng, 2), rand_c(rng, 3)
        got = la.partial_trace(np.kron(a, b), [2, 3], keep=[0])
        assert np.allclose(got, np.trace(b) * a, atol=1e-12)

    def test_trace_all(self, rng):
        a = rand_c(rng, 6)
        got = la.partial_trace(a, [2, 3], keep=[])
        assert got.shape == (1, 1)
        assert np.isclose(got[0, 0], np.trace(a))

    def test_maximally_entangled_marginal(self):
        ket = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)
        rho = np.outer(ket, ket)
        got = la.partial_trace(rho, [2, 2], keep=[0])
        assert np.allclose(got, np.eye(2) / 2, atol=1e-12)

    def test_trace_preserved(self, rng):
        a = rand_c(rng, 12)
        got = la.partial_trace(a, [2, 3, 2], keep=[1])
        assert abs(np.trace(got) - np.trace(a)) < 1e-12


class TestFrobenius:
    def test_identity(self):
        assert np.isclose(la.frobenius(np.eye(2), np.eye(2)), 2.0)

    def test_antisymmetric_vs_symmetric(self, rng):
        j = np.array([[0.0, -1.0], [1.0, 0.0]])
        s = rng.normal(size=(2, 2))
        s = s + s.T
        assert abs(la.frobenius(j, s)) < 1e-12

    def test_elementwise_oracle(self, rng):
        a, b = rand_c(rng, 3), rand_c(rng, 3)
        assert np.isclose(la.frobenius(a, b),
                          sum(a[i, j].conjugate() * b[i, j]
                              for i in range(3) for j in range(3)))

    def test_self_inner_product_nonnegative_real(self, rng):
        a = rand_c(rng, 4)
        v = la.frobenius(a, a)
        assert abs(v.imag) < 1e-12 and v.real >= 0

    def test_size_mismatch(self):
        with pytest.raises(la.ShapeError):
            la.frobenius(np.eye(2), np.eye(3))


class TestValidate:
    def test_uniform_povm_valid(self):
        rep = la.validate_povm([np.eye(2) / 2, np.eye(2) / 2])
        assert rep.valid

    def test_single_effect_povm_valid(self):
        assert la.validate_povm([np.eye(2)]).valid

    def test_negative_effect_reported(self):
        bad = np.diag([1.1, -0.1])
        rep = la.validate_povm([bad, np.eye(2) - bad])
        assert not rep.valid
        psd = [v for v in rep.violations if "psd" in v["invariant"]]
        assert psd and np.isclose(psd[0]["magnitude"], 0.1)

    def test_density_checks(self):
        assert la.validate_density(np.eye(2) / 2).valid
        assert not la.validate_density(np.eye(2)).valid  # trace 2
        assert not la.validate_density(np.diag([1.5, -0.5])).valid

    def test_kraus_channel_validity_matches_trace_preservation(self, rng):
        # validity of the set <=> the induced map preserves trace
        u = np.linalg.qr(rand_c(rng, 4))[0]
        kraus = [np.ascontiguousarray(u.reshape(2, 2, 2, 2)[:, i, :, 0])
                 for i in range(2)]
        assert la.validate_kraus(kraus).valid
        for _ in range(10):
            g = rand_c(rng, 2)
            rho = g @ g.conj().T
            rho /= np.trace(rho)
            out = sum(k @ rho @ k.conj().T for k in kraus)
            assert abs(np.trace(out) - 1.0) < 1e-10
        assert not la.validate_kraus([kraus[0]]).valid
        assert la.validate_kraus([kraus[0]], subchannel=True).valid

    def test_reports_never_throw(self):
        rep = la.validate_povm([])
        assert not rep.valid


class TestOperator:
    def test_shape_checked(self):
        with pytest.raises(la.ShapeError):
            la.Operator(np.eye(3), (2,), "C")

    def test_real_field_rejects_imaginary(self):
        with pytest.raises(la.ShapeError):
            la.Operator(1j * np.eye(2), (2,), "R")

    def test_side_cap(self):
        with pytest.raises(la.ShapeError):
            la.Operator(np.eye(2), (8192,), "R")


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2 ** 31 - 1))
def test_partial_trace_of_kron_property(da, db, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(da, da)) + 1j * rng.normal(size=(da, da))
    b = rng.normal(size=(db, db)) + 1j * rng.normal(size=(db, db))
    got = la.partial_trace(np.kron(a, b), [da, db], keep=[1])
    assert np.allclose(got, np.trace(a) * b, atol=1e-10)
