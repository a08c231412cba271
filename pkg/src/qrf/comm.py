"""Communication without a shared frame of reference.

Encoders and decoders for collective-rotation-noise-free qubit codes,
private state families that the twirl maps to the maximally mixed state,
and the singlet-product key-distribution states.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .group_rep import classical_message_count, couple_qubits
from .quantum_core import DensityOperator, StateVector, permute_subsystems, tensor_all, partial_trace

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
SINGLET = (np.kron(KET0, KET1) - np.kron(KET1, KET0)) / np.sqrt(2)
TRIPLET0 = (np.kron(KET0, KET1) + np.kron(KET1, KET0)) / np.sqrt(2)


def dfs_report(N: int) -> dict:
    """Per-spin table of gauge and multiplicity dimensions for N qubits."""
    if N < 1:
        raise ValueError("need at least one qubit")
    dec = couple_qubits(N)
    rows = [{"j": b.label, "gauge_dim": b.gauge_dim, "multiplicity": b.multiplicity} for b in dec.blocks]
    best = max(rows, key=lambda r: (r["multiplicity"], -r["j"]))
    return {"n_qubits": N, "sectors": rows, "classical_count": classical_message_count(N),
            "best_quantum_subsystem": {"j": best["j"], "multiplicity": best["multiplicity"]},
            "total_dim": sum(r["gauge_dim"] * r["multiplicity"] for r in rows)}


# ----------------------------------------------------------------------------
# one bit on two qubits


def encode_singlet_triplet_bit(b: int) -> StateVector:
    if b not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    return StateVector(SINGLET if b == 0 else np.kron(KET0, KET0), [2, 2])


@dataclass(frozen=True)
class BitReadout:
    bit: int
    p_singlet: float
    p_symmetric: float


def decode_singlet_triplet_bit(rho: DensityOperator) -> BitReadout:
    """Project onto singlet vs symmetric subspace; singlet means 0."""
    p0 = float(np.real(SINGLET.conj() @ rho.matrix @ SINGLET))
    p1 = float(np.real(np.trace(rho.matrix))) - p0
    return BitReadout(0 if p0 >= p1 else 1, p0, p1)


# ----------------------------------------------------------------------------
# one logical qubit on three physical qubits


def _spin_half_block():
    dec = couple_qubits(3)
    return dec, dec.block(0.5)


def encode_logical_qubit_3(psi, gauge: str = "mixed") -> DensityOperator:
    """Place a qubit on the decoherence-free factor of the three-qubit j=1/2 sector.

    ``gauge='mixed'`` leaves the gauge factor maximally mixed; ``'pure'``
    fixes it to the m=+1/2 gauge ket.
    """
    if isinstance(psi, StateVector):
        rho_l = np.outer(psi.amplitudes, psi.amplitudes.conj())
    elif isinstance(psi, DensityOperator):
        rho_l = psi.matrix
    else:
        raise TypeError("logical input must be a StateVector or DensityOperator")
    if rho_l.shape != (2, 2):
        raise ValueError("logical input must be a single qubit")
    dec, blk = _spin_half_block()
    if gauge == "mixed":
        g = np.eye(2) / 2
    elif gauge == "pure":
        g = np.diag([1.0, 0.0])
    else:
        raise ValueError("gauge must be 'mixed' or 'pure'")
    coupled = np.zeros((8, 8), dtype=complex)
    coupled[blk.start:blk.stop, blk.start:blk.stop] = np.kron(rho_l, g)
    return DensityOperator(dec.from_coupled(coupled), [2, 2, 2])


class OutsideCodeSpace(ValueError):
    pass


def decode_logical_qubit_3(rho: DensityOperator, tol: float = 1e-10) -> DensityOperator:
    """Read the multiplicity factor of the j=1/2 sector; reject weight elsewhere."""
    dec, blk = _spin_half_block()
    c = dec.to_coupled(rho.matrix)
    inside = float(np.real(np.trace(c[blk.start:blk.stop, blk.start:blk.stop])))
    if abs(1 - inside) > tol:
        raise OutsideCodeSpace(f"{1 - inside:.3g} of the state lies outside the code space")
    sub = c[blk.start:blk.stop, blk.start:blk.stop].reshape(2, 2, 2, 2)
    return DensityOperator(np.einsum("akbk->ab", sub), [2])


# ----------------------------------------------------------------------------
# private shared-frame states


def tetrahedron_directions():
    w = np.exp(2j * np.pi / 3)
    r2 = np.sqrt(2)
    return [KET0.copy(),
            1j / np.sqrt(3) * (KET0 + r2 * KET1),
            -1j / np.sqrt(3) * (KET0 + w * r2 * KET1),
            1j / np.sqrt(3) * (KET0 + w.conjugate() * r2 * KET1)]


def tetrahedron_states() -> list:
    """Four orthogonal two-qubit states |i> = 1/2 |singlet> + sqrt(3)/2 |n_i n_i>."""
    return [StateVector(0.5 * SINGLET + np.sqrt(3) / 2 * np.kron(n, n), [2, 2])
            for n in tetrahedron_directions()]


def _bell_pairs():
    r = 1 / np.sqrt(2)
    return [np.array([r, 0, 0, r]), np.array([r, 0, 0, -r]),
            np.array([0, r, r, 0]), np.array([0, r, -r, 0])]


def eight_states_3qubits() -> list:
    """Eight states (|3/2,mu> + (-1)^b |1/2,mu>)/sqrt2 that twirl to I/8.

    |1/2,mu> are the four Bell states between the multiplicity and gauge
    factors of the j=1/2 sector; |3/2,mu> runs over m = 3/2..-3/2.
    """
    dec = couple_qubits(3)
    hi, lo = dec.block(1.5), dec.block(0.5)
    out = []
    for b in (0, 1):
        for mu, bell in enumerate(_bell_pairs()):
            c = np.zeros(8, dtype=complex)
            c[hi.start + mu] = 1 / np.sqrt(2)
            c[lo.start:lo.stop] = (-1) ** b * bell / np.sqrt(2)
            out.append(StateVector(dec.from_coupled(c), [2, 2, 2]))
    return out


def private_capacities(N: int) -> dict:
    """Private quantum capacity log2(N+1) and asymptotic classical 3 log2 N, in (qu)bits."""
    return {"quantum": math.log2(N + 1), "classical": 3 * math.log2(N)}


# ----------------------------------------------------------------------------
# key distribution states


def _pair_product(pairs) -> StateVector:
    """Product of singlets on the given qubit pairs of a 4-qubit register."""
    base = tensor_all([StateVector(SINGLET, [2, 2]), StateVector(SINGLET, [2, 2])])
    flat = [q for p in pairs for q in p]
    order = [flat.index(k) for k in range(4)]
    return permute_subsystems(base, order)


def qkd_states() -> dict:
    psis = [_pair_product(p) for p in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))]
    rhos = [partial_trace(p.density(), [0, 1, 2]) for p in psis]
    return {"four_qubit": psis, "three_qubit": rhos}
