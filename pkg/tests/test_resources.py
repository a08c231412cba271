import itertools
import math

import numpy as np
import pytest

from qrf import resources
from qrf.group_rep import clebsch_gordan
from qrf.quantum_core import StateVector, entanglement_entropy

ONE = resources.mode_numbers(1)
TWO = resources.join_numbers(ONE, ONE)


def _random_eigenstate(rng, dims, number_a, number_b, total):
    amp = rng.normal(size=dims) + 1j * rng.normal(size=dims)
    amp = amp * (np.add.outer(number_a, number_b) == total)
    return StateVector(amp.ravel() / np.linalg.norm(amp), list(dims))


class TestEssr:
    def test_two_mode_single_photon(self):
        assert resources.e_ssr_pure(resources.single_photon_state(), ONE, ONE) == pytest.approx(0.0, abs=1e-12)

    def test_one_photon_per_wing(self):
        amp = np.zeros((4, 4))
        amp[1, 2] = amp[2, 1] = 1 / math.sqrt(2)  # |01>_A|10>_B + |10>_A|01>_B
        assert resources.e_ssr_pure(StateVector(amp.ravel(), [4, 4]), TWO, TWO) == pytest.approx(1.0, abs=1e-12)

    def test_product_state(self):
        psi = StateVector(np.kron([0.6, 0.8], [1, 0]), [2, 2])
        assert resources.e_ssr_pure(psi, ONE, ONE) == pytest.approx(0.0, abs=1e-12)

    def test_bounded_by_entanglement(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            amp = rng.normal(size=16) + 1j * rng.normal(size=16)
            psi = StateVector(amp / np.linalg.norm(amp), [4, 4])
            assert resources.e_ssr_pure(psi, TWO, TWO) <= entanglement_entropy(psi, [0]) + 1e-12

    def test_rejects_mixed(self):
        with pytest.raises(TypeError):
            resources.e_ssr_pure(resources.single_photon_state().density(), ONE, ONE)

    def test_spectrum_mismatch(self):
        with pytest.raises(ValueError):
            resources.e_ssr_pure(resources.single_photon_state(), TWO, ONE)


class TestSiv:
    def test_single_photon(self):
        assert resources.siv(resources.single_photon_state(), ONE, ONE) == pytest.approx(1.0, abs=1e-12)

    def test_sharp_local_number(self):
        assert resources.siv(StateVector(np.array([0, 0, 1, 0]), [2, 2]), ONE, ONE) == 0.0

    def test_two_copies(self):
        s = resources.single_photon_state()
        assert resources.siv(resources.join_bipartite(s, s), TWO, TWO) == pytest.approx(2.0, abs=1e-12)

    def test_additivity_random(self):
        rng = np.random.default_rng(1)
        n3 = np.arange(3)
        for _ in range(50):
            a = _random_eigenstate(rng, (3, 3), n3, n3, int(rng.integers(1, 4)))
            b = _random_eigenstate(rng, (3, 3), n3, n3, int(rng.integers(1, 4)))
            joint = resources.join_bipartite(a, b)
            nj = resources.join_numbers(n3, n3)
            total = resources.siv(a, n3, n3) + resources.siv(b, n3, n3)
            assert resources.siv(joint, nj, nj) == pytest.approx(total, abs=1e-10)

    def test_rejects_non_eigenstate(self):
        with pytest.raises(ValueError):
            resources.siv(resources.plus_plus_state(), ONE, ONE)


class TestActivation:
    def test_post_state(self):
        r = resources.activate_refbit()
        ref = np.zeros((4, 4))
        ref[1, 2] = ref[2, 1] = 1 / math.sqrt(2)
        assert np.allclose(np.abs(r["post_state"].amplitudes.reshape(4, 4)), ref, atol=1e-12)
        assert abs(r["post_state"].overlap(StateVector(ref.ravel(), [4, 4]))) == pytest.approx(1.0, abs=1e-12)

    def test_probability_against_enumeration(self):
        # independent enumeration over the occupation patterns (A1, B1, A2, B2)
        total = 0.0
        for a1, b1, a2, b2 in itertools.product((0, 1), repeat=4):
            amp = (a1 + b1 == 1) / math.sqrt(2) * 0.5
            if a1 + a2 == 1 and b1 + b2 == 1:
                total += amp ** 2
        r = resources.activate_refbit()
        assert r["success_probability"] == pytest.approx(total, abs=1e-12)
        assert r["success_probability"] == pytest.approx(
            resources.enumerate_activation_amplitudes()["probability"], abs=1e-12)
        assert total == pytest.approx(0.25)

    def test_distillation(self):
        r = resources.two_copy_distill()
        assert r["success_probability"] == pytest.approx(0.5, abs=1e-12)
        assert resources.e_ssr_pure(r["post_state"], r["number_a"], r["number_b"]) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("protocol", [resources.activate_refbit, resources.two_copy_distill])
    def test_outputs_have_sharp_local_numbers(self, protocol):
        r = protocol()
        pops = np.abs(r["post_state"].amplitudes.reshape(4, 4)) ** 2
        assert np.all(pops[r["number_a"] != 1, :] < 1e-15)
        assert np.all(pops[:, r["number_b"] != 1] < 1e-15)


class TestBitCommitment:
    def test_tokens_normalized(self):
        r = resources.bit_commitment_tokens()
        assert np.trace(r["rho0"].matrix).real == pytest.approx(1.0)
        assert np.trace(r["rho1"].matrix).real == pytest.approx(1.0)

    def test_pinched_tokens_equal(self):
        r = resources.bit_commitment_tokens()
        assert np.max(np.abs(r["pinched0"] - r["pinched1"])) < 1e-12
        assert not r["ssr_distinguishable"]
        assert np.allclose(resources.spin_block_pinch(r["rho0"]).diagonal(), r["pinched0"].diagonal())

    def test_fidelity_below_one(self):
        r = resources.bit_commitment_tokens()
        assert r["fidelity"] < 1 - 1e-6
        assert r["fidelity"] == pytest.approx(1 / 9, abs=1e-10)

    def test_commitment_states(self):
        c0, c1 = resources.commitment_state(0), resources.commitment_state(1)
        assert abs(c0.overlap(c1)) < 1e-12
        amp = c0.amplitudes.reshape(3, 9)
        # proof in m = 1: token sector m = 0 with weights 2/3, -1/sqrt2, sqrt2/6 on j = 0, 1, 2
        phi0 = amp[0] * math.sqrt(2)
        assert phi0[resources.token_index(0, 0)] == pytest.approx(2 / 3)
        assert phi0[resources.token_index(1, 0)] == pytest.approx(-1 / math.sqrt(2))
        assert phi0[resources.token_index(2, 0)] == pytest.approx(math.sqrt(2) / 6)
        phi1 = amp[1] * math.sqrt(3)
        assert phi1[resources.token_index(1, 1)] == pytest.approx(math.sqrt(3) / 2)
        assert phi1[resources.token_index(2, 1)] == pytest.approx(-0.5)
        assert amp[2][resources.token_index(2, 2)] * math.sqrt(6) == pytest.approx(1.0)

    def test_total_spin_one(self):
        # lowering from the top: the proof-token state is annihilated by the total raising operator
        c = resources.commitment_state(0).amplitudes.reshape(3, 9)
        vec = np.zeros((3, 9), dtype=complex)
        for jt in resources.TOKEN_SPINS:
            for p_idx, mp in enumerate((1, 0, -1)):
                for mt in range(-jt, jt + 1):
                    w = c[p_idx, resources.token_index(jt, mt)]
                    if mp < 1:
                        vec[p_idx - 1, resources.token_index(jt, mt)] += w * math.sqrt(2 - mp * (mp + 1))
                    if mt < jt:
                        vec[p_idx, resources.token_index(jt, mt + 1)] += w * math.sqrt(jt * (jt + 1) - mt * (mt + 1))
        assert np.allclose(vec, 0, atol=1e-12)
        assert clebsch_gordan(1, 1, 1, 0, 1, 1) == pytest.approx(-1 / math.sqrt(2))

    def test_bad_bit(self):
        with pytest.raises(ValueError):
            resources.commitment_state(2)
