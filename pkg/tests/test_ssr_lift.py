import numpy as np
import pytest

from qrf.group_rep import CyclicRep
from qrf.quantum_core import DensityOperator, QuantumChannel, StateVector, random_channel, random_state, random_unitary
from qrf.ssr_lift import (
    WedgeViolation,
    dequantize_u1,
    dollar_map,
    invariant_born_check,
    invariant_channel,
    invariant_state,
    joint_rep_unitary,
    quantize_phase_state,
    relational_factorization,
)


def _random_op(rng, d):
    return rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))


def _random_effect(rng, d):
    e = random_state([d], rng).matrix
    return e / np.max(np.linalg.eigvalsh(e))


class TestDollarMap:
    def test_identity(self):
        rep = CyclicRep(4, [0, 1, 3])
        assert np.allclose(dollar_map(np.eye(3), rep), np.eye(12))

    def test_homomorphism_adjoint_linearity(self):
        rng = np.random.default_rng(0)
        rep = CyclicRep(8, [0, 1, 5])
        for _ in range(100):
            a, b = _random_op(rng, 3), _random_op(rng, 3)
            la, lb = dollar_map(a, rep), dollar_map(b, rep)
            assert np.allclose(dollar_map(a @ b, rep), la @ lb, atol=1e-12)
            assert np.allclose(dollar_map(a.conj().T, rep), la.conj().T, atol=1e-12)
            assert np.allclose(dollar_map(2 * a - 1j * b, rep), 2 * la - 1j * lb, atol=1e-12)

    def test_invariance(self):
        rng = np.random.default_rng(1)
        rep = CyclicRep(6, [0, 2, 5])
        la = dollar_map(_random_op(rng, 3), rep)
        for g in rep.elements():
            u = joint_rep_unitary(rep, g)
            assert np.allclose(u @ la @ u.conj().T, la, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            dollar_map(np.eye(2), CyclicRep(3, [0, 1, 2]))

    def test_invariant_state_and_channel(self):
        rng = np.random.default_rng(2)
        rep = CyclicRep(5, [0, 1])
        rho_inv = invariant_state(random_state([2], rng), rep)
        assert rho_inv.dims == [5, 2]
        ch = invariant_channel(random_channel(2, 2, rng), rep)
        assert np.allclose(sum(k.conj().T @ k for k in ch.kraus), np.eye(10), atol=1e-12)


class TestBornRule:
    @pytest.mark.parametrize("d", [2, 8, 32])
    def test_random_triples(self, d):
        rng = np.random.default_rng(d)
        for _ in range(1000):
            dim = int(rng.integers(2, 4))
            rep = CyclicRep(d, rng.integers(0, d, dim))
            r = invariant_born_check(random_state([dim], rng), _random_effect(rng, dim), rep,
                                     random_channel(dim, 2, rng))
            assert abs(r["lhs"] - r["rhs"]) < 1e-12

    def test_identity_effect(self):
        rng = np.random.default_rng(3)
        r = invariant_born_check(random_state([2], rng), np.eye(2), CyclicRep(8, [0, 1]))
        assert r["lhs"] == pytest.approx(1.0, abs=1e-12) and r["rhs"] == pytest.approx(1.0, abs=1e-12)

    def test_non_invariant_unitary(self):
        rng = np.random.default_rng(4)
        ch = QuantumChannel.unitary(random_unitary(2, rng))
        r = invariant_born_check(random_state([2], rng), _random_effect(rng, 2), CyclicRep(8, [0, 1]), ch)
        assert r["lhs"] == pytest.approx(r["rhs"], abs=1e-12)


class TestPhaseQuantization:
    def test_plus_state(self):
        plus = StateVector(np.array([1, 1]) / np.sqrt(2))
        joint = quantize_phase_state(plus, 1)
        ref = np.zeros(4)
        ref[[2, 1]] = 1 / np.sqrt(2)  # |1>_R|0>_S + |0>_R|1>_S
        assert np.allclose(joint.amplitudes, ref)

    def test_reduced_system_dephased(self):
        psi = StateVector(np.array([0.6, 0.8j]))
        joint = quantize_phase_state(psi, 4).density()
        red = np.einsum("rarb->ab", joint.matrix.reshape(5, 2, 5, 2))
        assert np.allclose(red, np.diag([0.36, 0.64]))

    def test_total_number_eigenstate(self):
        joint = quantize_phase_state(np.array([0.5, 0.5, 0.5, 0.5]), 6)
        pops = np.abs(joint.amplitudes.reshape(7, 4)) ** 2
        tot = np.add.outer(np.arange(7), np.arange(4))
        mean = np.sum(pops * tot)
        assert np.sum(pops * (tot - mean) ** 2) == pytest.approx(0.0, abs=1e-15)

    def test_reference_too_small(self):
        with pytest.raises(ValueError):
            quantize_phase_state(np.array([0, 0, 1.0]), 1)

    def test_round_trip(self):
        rng = np.random.default_rng(5)
        for dim in (2, 3, 5):
            psi = random_state([dim], rng, pure=True)
            for n in (dim - 1, dim + 3):
                rel = dequantize_u1(quantize_phase_state(psi, n), [n + 1, dim])
                assert np.allclose(rel.matrix, psi.density().matrix, atol=1e-12)

    def test_plus_round_trip_five(self):
        plus = StateVector(np.array([1, 1]) / np.sqrt(2))
        rel = dequantize_u1(quantize_phase_state(plus, 5), [6, 2])
        assert np.allclose(rel.matrix, np.full((2, 2), 0.5), atol=1e-12)

    def test_mixed_total_number(self):
        plus = np.array([1, 1]) / np.sqrt(2)
        a = quantize_phase_state(plus, 3).density().matrix
        b = quantize_phase_state(plus, 5).density().matrix
        rho = DensityOperator(0.5 * (np.pad(a, ((0, 4), (0, 4))) + b), [6, 2])
        joint, ns = relational_factorization(rho, [6, 2])
        glob = np.einsum("nana->na", joint).sum(axis=1)
        assert np.allclose(glob[[0, 2]], 0.5) and ns.tolist() == [3, 4, 5]
        assert np.allclose(np.einsum("namb->nm", joint)[0, 2], 0)  # no coherence between totals 3 and 5
        rel = dequantize_u1(rho, [6, 2])
        assert np.allclose(rel.matrix, np.full((2, 2), 0.5), atol=1e-12)

    def test_wedge_violation(self):
        bad = np.zeros((2, 3))
        bad[0, 0] = bad[0, 2] = 1 / np.sqrt(2)  # system number 2 exceeds the smallest total 0
        with pytest.raises(WedgeViolation):
            dequantize_u1(StateVector(bad.ravel(), [2, 3]), [2, 3])
