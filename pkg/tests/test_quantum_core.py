import numpy as np
import pytest

from qrf.quantum_core import (
    DensityOperator,
    Povm,
    QuantumChannel,
    StateVector,
    apply_channel,
    compose,
    entanglement_entropy,
    fidelity,
    from_json,
    partial_trace,
    permute_subsystems,
    random_channel,
    random_state,
    random_unitary,
    sample_measurements,
    tensor,
    tensor_all,
    to_json,
    von_neumann_entropy,
)

BELL = StateVector(np.array([1, 0, 0, 1]) / np.sqrt(2), [2, 2])


class TestStates:
    def test_unnormalized_vector_rejected(self):
        with pytest.raises(ValueError):
            StateVector(np.array([1.0, 1.0]))

    def test_from_unnormalized(self):
        psi = StateVector.from_unnormalized([3, 4])
        assert np.allclose(psi.amplitudes, [0.6, 0.8])

    def test_dims_must_multiply(self):
        with pytest.raises(ValueError):
            StateVector(np.array([1, 0, 0, 0]), [3])

    @pytest.mark.parametrize("m", [np.array([[1, 1], [0, 0]]), np.eye(2), np.diag([1.5, -0.5])])
    def test_invalid_density_rejected(self, m):
        with pytest.raises(ValueError):
            DensityOperator(m)

    def test_basis_tuple_index(self):
        psi = StateVector.basis((1, 0, 1), [2, 2, 2])
        assert psi.amplitudes[5] == 1

    def test_purity_and_mixed(self):
        assert DensityOperator.maximally_mixed([2, 2]).purity() == pytest.approx(0.25)
        assert BELL.density().purity() == pytest.approx(1.0)


class TestSubsystems:
    def test_partial_trace_of_product(self):
        rng = np.random.default_rng(0)
        a, b, c = (random_state([d], rng) for d in (2, 3, 2))
        abc = tensor_all([a, b, c])
        assert np.allclose(partial_trace(abc, [1]).matrix, b.matrix, atol=1e-12)
        assert np.allclose(partial_trace(abc, [0, 2]).matrix, tensor(a, c).matrix, atol=1e-12)

    def test_partial_trace_against_einsum(self):
        rng = np.random.default_rng(1)
        rho = random_state([2, 3], rng)
        oracle = np.einsum("ajbj->ab", rho.matrix.reshape(2, 3, 2, 3))
        assert np.allclose(partial_trace(rho, [0]).matrix, oracle, atol=1e-14)

    def test_partial_trace_bad_index(self):
        with pytest.raises(ValueError):
            partial_trace(BELL.density(), [2])

    def test_permute_swaps_factors(self):
        rng = np.random.default_rng(2)
        a, b = random_state([2], rng, pure=True), random_state([3], rng, pure=True)
        swapped = permute_subsystems(tensor(a, b), [1, 0])
        assert np.allclose(swapped.amplitudes, tensor(b, a).amplitudes)
        rho = permute_subsystems(tensor(a.density(), b.density()), [1, 0])
        assert np.allclose(rho.matrix, tensor(b.density(), a.density()).matrix)

    def test_entanglement_entropy(self):
        assert entanglement_entropy(BELL, [0]) == pytest.approx(1.0, abs=1e-12)
        assert entanglement_entropy(StateVector.basis(0, [2, 2]), [1]) == pytest.approx(0.0, abs=1e-12)
        assert von_neumann_entropy(DensityOperator.maximally_mixed([4])) == pytest.approx(2.0)


class TestChannels:
    def test_non_trace_preserving_rejected(self):
        with pytest.raises(ValueError):
            QuantumChannel((np.eye(2) * 0.5,))

    def test_depolarizing_maps_to_identity(self):
        rng = np.random.default_rng(3)
        for d in (2, 3, 5):
            out = apply_channel(QuantumChannel.depolarizing(d), random_state([d], rng))
            assert np.allclose(out.matrix, np.eye(d) / d, atol=1e-12)

    def test_superoperator_matches_kraus(self):
        rng = np.random.default_rng(4)
        ch = random_channel(3, 2, rng)
        rho = random_state([3], rng)
        vec = ch.superoperator() @ rho.matrix.ravel()
        assert np.allclose(vec.reshape(3, 3), apply_channel(ch, rho).matrix, atol=1e-12)

    def test_compose_order(self):
        rng = np.random.default_rng(5)
        first, second = random_channel(2, 2, rng), QuantumChannel.unitary(random_unitary(2, rng))
        rho = random_state([2], rng)
        direct = apply_channel(second, apply_channel(first, rho))
        assert np.allclose(apply_channel(compose(second, first), rho).matrix, direct.matrix, atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            apply_channel(QuantumChannel.identity(3), BELL.density())


class TestMeasurementAndFidelity:
    def test_sampling_frequencies(self):
        rho = DensityOperator(np.diag([0.3, 0.7]))
        povm = Povm((np.diag([1, 0]), np.diag([0, 1])), ("a", "b"))
        outs = sample_measurements(povm, rho, 20000, rng_seed=1)
        assert outs.count("a") / 20000 == pytest.approx(0.3, abs=0.015)
        assert outs == sample_measurements(povm, rho, 20000, rng_seed=1)

    def test_incomplete_povm(self):
        povm = Povm((np.diag([1, 0]),), ("a",))
        with pytest.raises(ValueError):
            sample_measurements(povm, DensityOperator(np.diag([0.5, 0.5])), 10)

    def test_fidelity_pure_states(self):
        rng = np.random.default_rng(6)
        a, b = random_state([3], rng, pure=True), random_state([3], rng, pure=True)
        assert fidelity(a.density(), b.density()) == pytest.approx(abs(a.overlap(b)) ** 2, abs=1e-10)

    def test_fidelity_commuting_states(self):
        p, q = np.array([0.2, 0.3, 0.5]), np.array([0.5, 0.5, 0.0])
        ref = np.sum(np.sqrt(p * q)) ** 2
        assert fidelity(DensityOperator(np.diag(p)), DensityOperator(np.diag(q))) == pytest.approx(ref, abs=1e-12)


class TestSerialization:
    def test_round_trip(self):
        rng = np.random.default_rng(7)
        for obj in (random_state([2, 3], rng), random_state([2, 2], rng, pure=True)):
            back = from_json(to_json(obj))
            assert type(back) is type(obj) and back.dims == obj.dims
            arr = obj.amplitudes if isinstance(obj, StateVector) else obj.matrix
            arr2 = back.amplitudes if isinstance(back, StateVector) else back.matrix
            assert np.array_equal(arr, arr2)
