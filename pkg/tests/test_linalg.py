import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from coinshift.linalg import (
    DimensionMismatch,
    NotHermitian,
    dft_matrix,
    hermitian_eig,
    kron,
    max_unitarity_error,
    partial_trace_coin,
    partial_transpose_coin,
    unitary_exp,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def random_unitary(n, rng):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def random_density(n, rng, rank=None):
    a = rng.normal(size=(n, rank or n)) + 1j * rng.normal(size=(n, rank or n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


# brute-force index-summation oracles, coin index outermost
def brute_partial_trace(rho, d):
    out = np.zeros((d, d), dtype=complex)
    for a in range(d):
        for b in range(d):
            for c in range(2):
                out[a, b] += rho[c * d + a, c * d + b]
    return out


def brute_partial_transpose(rho, d):
    out = np.zeros_like(rho)
    for c1 in range(2):
        for c2 in range(2):
            for a in range(d):
                for b in range(d):
                    out[c1 * d + a, c2 * d + b] = rho[c2 * d + a, c1 * d + b]
    return out


class TestHermitianEig:
    def test_pauli(self):
        w, _ = hermitian_eig(SX)
        np.testing.assert_allclose(w, [-1, 1], atol=1e-14)

    def test_identity(self):
        w, v = hermitian_eig(np.eye(5))
        np.testing.assert_allclose(w, np.ones(5))

    def test_reconstruct_from_known_spectrum(self):
        rng = np.random.default_rng(1)
        u = random_unitary(6, rng)
        lam = np.sort(rng.normal(size=6))
        m = u @ np.diag(lam) @ u.conj().T
        m = (m + m.conj().T) / 2
        w, v = hermitian_eig(m)
        np.testing.assert_allclose(w, lam, atol=1e-12)
        assert np.max(np.abs(v @ np.diag(w) @ v.conj().T - m)) <= 1e-10
        assert np.max(np.abs(v.conj().T @ v - np.eye(6))) <= 1e-10

    @pytest.mark.parametrize("n", [2, 17, 64, 300])
    def test_reconstruction_up_to_300(self, n):
        m = random_hermitian(n, np.random.default_rng(n))
        w, v = hermitian_eig(m)
        assert np.all(np.diff(w) >= 0)
        assert np.max(np.abs((v * w) @ v.conj().T - m)) <= 1e-10

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitian):
            hermitian_eig(np.array([[0, 1], [0, 0]]))

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            hermitian_eig(np.zeros((2, 3)))


class TestUnitaryExp:
    def test_zero_scale(self):
        m = random_hermitian(4, np.random.default_rng(0))
        np.testing.assert_allclose(unitary_exp(m, 0.0), np.eye(4), atol=1e-14)

    def test_pauli_rotation(self):
        np.testing.assert_allclose(unitary_exp(SX, np.pi / 2), 1j * SX, atol=1e-14)

    def test_diagonal_generator(self):
        d, theta = 7, 0.37
        got = unitary_exp(np.diag(np.arange(d)), theta)
        np.testing.assert_allclose(got, np.diag(np.exp(1j * theta * np.arange(d))), atol=1e-13)

    def test_matches_pade(self):
        m = random_hermitian(20, np.random.default_rng(3))
        np.testing.assert_allclose(unitary_exp(m, 0.8), scipy.linalg.expm(0.8j * m), atol=1e-11)

    @pytest.mark.parametrize("n", [2, 50, 290])
    def test_unitary(self, n):
        m = random_hermitian(n, np.random.default_rng(n))
        assert max_unitarity_error(unitary_exp(m, 1.3)) <= 1e-10


class TestKron:
    def test_identities(self):
        np.testing.assert_array_equal(kron(np.eye(2), np.eye(5)), np.eye(10))

    def test_coin_blocks(self):
        n = np.diag(np.arange(4.0))
        got = kron(SZ, n)
        np.testing.assert_array_equal(got[:4, :4], n)
        np.testing.assert_array_equal(got[4:, 4:], -n)
        assert not np.any(got[:4, 4:])

    def test_mixed_product(self):
        rng = np.random.default_rng(5)
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        lhs = kron(SX, a) @ kron(SX, b)
        rhs = np.zeros((6, 6), dtype=complex)
        ab = a @ b
        rhs[:3, :3] = ab
        rhs[3:, 3:] = ab
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
    def test_associative(self, seed, na, nb, nc):
        rng = np.random.default_rng(seed)
        a, b, c = (rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k)) for k in (na, nb, nc))
        assert np.max(np.abs(kron(kron(a, b), c) - kron(a, kron(b, c)))) <= 1e-12


class TestPartialTrace:
    def test_product(self):
        rng = np.random.default_rng(0)
        rho_w = random_density(5, rng)
        up = np.diag([1.0, 0.0])
        np.testing.assert_allclose(partial_trace_coin(kron(up, rho_w), 5), rho_w, atol=1e-15)

    def test_maximally_mixed(self):
        np.testing.assert_allclose(partial_trace_coin(np.eye(8) / 8, 4), np.eye(4) / 4)

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_matches_index_sum(self, d):
        rho = random_density(2 * d, np.random.default_rng(d))
        red = partial_trace_coin(rho, d)
        np.testing.assert_allclose(red, brute_partial_trace(rho, d), atol=1e-15)
        assert abs(np.trace(red) - 1) <= 1e-10

    def test_one_step_walk(self):
        # one Hadamard-like step at d=4 from coin |0>, walker |phi_0>
        from coinshift.phase_space import WalkConfig
        from coinshift.walk import build_operators, standard_step

        d = 4
        f = dft_matrix(d)
        psi = np.kron([1, 0], f[:, 0])
        psi = standard_step(psi, build_operators(WalkConfig(d=d, alpha=0)))
        rho = np.outer(psi, psi.conj())
        np.testing.assert_allclose(partial_trace_coin(rho, d), brute_partial_trace(rho, d), atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            partial_trace_coin(np.eye(6), 4)


class TestPartialTranspose:
    def test_product_stays_positive(self):
        rng = np.random.default_rng(2)
        rho = kron(random_density(2, rng), random_density(4, rng))
        assert np.linalg.eigvalsh(partial_transpose_coin(rho, 4)).min() >= -1e-12

    def test_bell_state(self):
        bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
        rho = np.outer(bell, bell)
        assert np.linalg.eigvalsh(partial_transpose_coin(rho, 2)).min() == pytest.approx(-0.5, abs=1e-14)

    def test_separable_mixture(self):
        rng = np.random.default_rng(9)
        weights = rng.dirichlet(np.ones(6))
        rho = sum(w * kron(random_density(2, rng, 1), random_density(3, rng, 1)) for w in weights)
        assert np.linalg.eigvalsh(partial_transpose_coin(rho, 3)).min() >= -1e-10

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_matches_index_sum_and_involution(self, d):
        rho = random_density(2 * d, np.random.default_rng(10 + d))
        pt = partial_transpose_coin(rho, d)
        np.testing.assert_array_equal(pt, brute_partial_transpose(rho, d))
        np.testing.assert_array_equal(partial_transpose_coin(pt, d), rho)
        assert np.trace(pt) == np.trace(rho)
        np.testing.assert_allclose(pt, pt.conj().T, atol=1e-15)


class TestDFT:
    def test_two_point(self):
        np.testing.assert_allclose(dft_matrix(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)

    def test_unitary(self):
        f = dft_matrix(31)
        np.testing.assert_allclose(f @ f.conj().T, np.eye(31), atol=1e-10)

    def test_rotation_hops_phase_states(self):
        d = 5
        f = dft_matrix(d)
        rot = unitary_exp(np.diag(np.arange(d)), 2 * np.pi / d)
        for m in range(d):
            np.testing.assert_allclose(rot @ f[:, m], f[:, (m + 1) % d], atol=1e-12)

    def test_rejects_small(self):
        with pytest.raises(ValueError):
            dft_matrix(1)
