import math

import numpy as np
import pytest

from qrf.group_rep import CollectiveSU2Rep, CyclicRep, U1Rep, couple_qubits
from qrf.quantum_core import DensityOperator, QuantumChannel, apply_channel, random_channel, random_state
from qrf.twirl import (
    block_twirl,
    class_quadrature_twirl,
    dense_twirl_via_sampling,
    fourier_coefficients,
    is_g_invariant,
    pinch_between,
    sector_projectors,
    su2_twirl_qubits,
    super_twirl,
    u1_twirl,
    weighted_u1_twirl,
)


class TestSu2Twirl:
    @pytest.mark.parametrize("N", [1, 2, 3])
    def test_matches_quadrature_oracle(self, N):
        rho = random_state([2] * N, np.random.default_rng(N))
        exact = su2_twirl_qubits(rho, N).matrix
        oracle = class_quadrature_twirl(rho, N, n_class=64).matrix
        assert np.allclose(exact, oracle, atol=1e-12)

    def test_matches_monte_carlo(self):
        rho = random_state([2, 2], np.random.default_rng(7))
        mean, err = dense_twirl_via_sampling(rho, CollectiveSU2Rep(2), 20000, rng_seed=3)
        exact = su2_twirl_qubits(rho, 2).matrix
        assert np.all(np.abs(mean.matrix - exact) <= 5 * err + 1e-12)

    def test_single_qubit_fully_depolarized(self):
        rho = random_state([2], np.random.default_rng(0))
        assert np.allclose(su2_twirl_qubits(rho, 1).matrix, np.eye(2) / 2, atol=1e-14)

    def test_idempotent_trace_preserving_invariant(self):
        rng = np.random.default_rng(4)
        rho = random_state([2] * 4, rng)
        once = su2_twirl_qubits(rho, 4)
        assert np.allclose(su2_twirl_qubits(once, 4).matrix, once.matrix, atol=1e-12)
        assert np.trace(once.matrix).real == pytest.approx(1.0)
        assert is_g_invariant(once, CollectiveSU2Rep(4))
        assert not is_g_invariant(rho, CollectiveSU2Rep(4))

    def test_sector_weights_preserved(self):
        rho = random_state([2] * 3, np.random.default_rng(5))
        projs = sector_projectors(couple_qubits(3))
        tw = su2_twirl_qubits(rho, 3)
        for p in projs.values():
            assert np.trace(p @ tw.matrix).real == pytest.approx(np.trace(p @ rho.matrix).real, abs=1e-12)
        assert np.allclose(pinch_between(tw, list(projs.values())).matrix, tw.matrix, atol=1e-12)

    def test_wrong_dimension(self):
        with pytest.raises(ValueError):
            su2_twirl_qubits(np.eye(3) / 3, 1)

    def test_too_few_samples(self):
        with pytest.raises(ValueError):
            dense_twirl_via_sampling(np.eye(2) / 2, CollectiveSU2Rep(1), 10)


class TestU1Twirl:
    def test_pinches_number_sectors(self):
        rho = random_state([4], np.random.default_rng(1))
        out = u1_twirl(rho, np.arange(4))
        assert np.allclose(out.matrix, np.diag(np.diag(rho.matrix)))

    def test_degenerate_spectrum_keeps_coherence(self):
        rho = random_state([3], np.random.default_rng(2))
        out = u1_twirl(rho, [0, 1, 1])
        assert out.matrix[1, 2] == pytest.approx(rho.matrix[1, 2])
        assert out.matrix[0, 1] == 0

    def test_block_twirl_agrees(self):
        rho = random_state([4], np.random.default_rng(3))
        rep = U1Rep([0, 1, 1, 2])
        assert np.allclose(block_twirl(rho, rep.decomposition()).matrix, u1_twirl(rho, rep.spectrum).matrix)

    def test_non_integer_spectrum(self):
        with pytest.raises(ValueError):
            u1_twirl(np.eye(2) / 2, [0, 0.5])

    def test_fourier_coefficients(self):
        # von Mises density: c_k = I_k(kappa)/I_0(kappa)
        from scipy.special import iv

        kappa = 2.0
        dens = lambda p: np.exp(kappa * np.cos(p)) / (2 * math.pi * iv(0, kappa))
        c = fourier_coefficients(dens, [0, 1, 2])
        assert np.allclose(c, iv([0, 1, 2], kappa) / iv(0, kappa), atol=1e-12)
        c2 = fourier_coefficients(([0.0, math.pi], [0.5, 0.5]), [1, 2])
        assert np.allclose(c2, [0, 1], atol=1e-14)

    def test_bad_distribution(self):
        with pytest.raises(ValueError):
            fourier_coefficients(lambda p: np.ones_like(p), [1])

    def test_weighted_twirl_limits(self):
        rho = random_state([3], np.random.default_rng(4))
        uniform = weighted_u1_twirl(rho, np.arange(3), lambda p: np.full_like(p, 1 / (2 * math.pi)))
        assert np.allclose(uniform.matrix, u1_twirl(rho, np.arange(3)).matrix, atol=1e-12)
        delta = weighted_u1_twirl(rho, np.arange(3), ([0.0], [1.0]))
        assert np.allclose(delta.matrix, rho.matrix)

    def test_weighted_twirl_against_sum(self):
        rho = random_state([3], np.random.default_rng(5))
        angles, w = np.array([0.1, 1.3, 2.9]), np.array([0.2, 0.5, 0.3])
        n = np.arange(3)
        ref = sum(wi * np.diag(np.exp(-1j * a * n)) @ rho.matrix @ np.diag(np.exp(1j * a * n))
                  for a, wi in zip(angles, w))
        assert np.allclose(weighted_u1_twirl(rho, n, (angles, w)).matrix, ref, atol=1e-12)


class TestSuperTwirl:
    def test_u1_channel_average(self):
        rng = np.random.default_rng(6)
        rep = U1Rep([0, 1, 2])
        ch = random_channel(3, 2, rng)
        tw = super_twirl(ch, rep)
        assert is_g_invariant(tw, rep)
        assert not is_g_invariant(ch, rep)
        rho = random_state([3], rng)
        # Riemann sum over 64 angles is exact for charge differences below 64
        thetas = 2 * math.pi * np.arange(64) / 64
        ref = np.zeros((3, 3), dtype=complex)
        for t in thetas:
            u = rep.unitary(t)
            ref += u @ apply_channel(ch, DensityOperator(u.conj().T @ rho.matrix @ u)).matrix @ u.conj().T / 64
        assert np.allclose(apply_channel(tw, rho).matrix, ref, atol=1e-12)

    def test_cyclic_channel_average(self):
        rng = np.random.default_rng(7)
        rep = CyclicRep(4, [0, 1, 3])
        tw = super_twirl(random_channel(3, 2, rng), rep)
        assert is_g_invariant(tw, rep)

    def test_invariant_channel_fixed(self):
        rep = U1Rep([0, 1])
        ch = QuantumChannel.unitary(np.diag([1, 1j]))
        rho = random_state([2], np.random.default_rng(8))
        assert np.allclose(apply_channel(super_twirl(ch, rep), rho).matrix, apply_channel(ch, rho).matrix)

    def test_unsupported_group(self):
        with pytest.raises(TypeError):
            super_twirl(QuantumChannel.identity(2), CollectiveSU2Rep(1))
