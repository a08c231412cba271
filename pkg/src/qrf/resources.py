"""Nonlocal resources under a local superselection rule.

Bipartite states are StateVectors with dims [d_A, d_B]; each wing carries a
local number operator given by its diagonal spectrum.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .group_rep import clebsch_gordan, spin_labels
from .quantum_core import DensityOperator, StateVector, entanglement_entropy, fidelity, reduce_matrix

EIGEN_TOL = 1e-10


def mode_numbers(n_modes: int, cutoff: int = 1) -> np.ndarray:
    """Total photon number of each basis state of n modes with levels 0..cutoff."""
    levels = np.arange(cutoff + 1)
    out = np.zeros(1, dtype=int)
    for _ in range(n_modes):
        out = np.add.outer(out, levels).ravel()
    return out


def _check_bipartite(psi: StateVector, number_a, number_b):
    if len(psi.dims) != 2:
        raise ValueError("expected a bipartite state with dims [d_A, d_B]")
    na, nb = np.asarray(number_a), np.asarray(number_b)
    if na.size != psi.dims[0] or nb.size != psi.dims[1]:
        raise ValueError("number spectra do not match the subsystem dimensions")
    return na, nb


def e_ssr_pure(psi: StateVector, number_a, number_b) -> float:
    """Entanglement accessible under local number superselection, in ebits.

    The state splits into orthogonal blocks of definite local numbers; each
    block contributes its entanglement entropy weighted by its probability.
    """
    if not isinstance(psi, StateVector):
        raise TypeError("e_ssr_pure needs a pure state")
    na, nb = _check_bipartite(psi, number_a, number_b)
    amp = psi.amplitudes.reshape(psi.dims)
    total = 0.0
    for a in np.unique(na):
        for b in np.unique(nb):
            blk = amp * np.outer(na == a, nb == b)
            p = float(np.sum(np.abs(blk) ** 2))
            if p < 1e-15:
                continue
            total += p * entanglement_entropy(StateVector(blk.ravel() / math.sqrt(p), psi.dims), [0])
    return total


def siv(psi: StateVector, number_a, number_b) -> float:
    """Superselection-induced variance 4 Var(N_A) of a total-number eigenstate."""
    na, nb = _check_bipartite(psi, number_a, number_b)
    pops = np.abs(psi.amplitudes.reshape(psi.dims)) ** 2
    tot = np.add.outer(na, nb)
    mean_tot = float(np.sum(pops * tot))
    if float(np.sum(pops * (tot - mean_tot) ** 2)) > EIGEN_TOL:
        raise ValueError("state is not an eigenstate of the total number")
    pa = pops.sum(axis=1)
    mean = float(pa @ na)
    return 4 * float(pa @ (na - mean) ** 2)


def join_bipartite(psi1: StateVector, psi2: StateVector) -> StateVector:
    """psi1 on A1 B1 and psi2 on A2 B2 regrouped as (A1 A2) | (B1 B2)."""
    a1, b1 = psi1.dims
    a2, b2 = psi2.dims
    t = np.kron(psi1.amplitudes, psi2.amplitudes).reshape(a1, b1, a2, b2).transpose(0, 2, 1, 3)
    return StateVector(t.ravel(), [a1 * a2, b1 * b2])


def join_numbers(n1, n2) -> np.ndarray:
    return np.add.outer(np.asarray(n1), np.asarray(n2)).ravel()


def single_photon_state() -> StateVector:
    """(|1>_A|0>_B + |0>_A|1>_B)/sqrt2 with one mode per wing."""
    return StateVector(np.array([0, 1, 1, 0]) / math.sqrt(2), [2, 2])


def plus_plus_state() -> StateVector:
    """|+>_A |+>_B with |+> = (|0> + |1>)/sqrt2 in photon number."""
    return StateVector(np.full(4, 0.5), [2, 2])


def project_local_numbers(psi: StateVector, number_a, number_b, n_a: int, n_b: int):
    """Apply Pi_{n_a} (x) Pi_{n_b}; return (probability, normalized post-state or None)."""
    na, nb = _check_bipartite(psi, number_a, number_b)
    blk = psi.amplitudes.reshape(psi.dims) * np.outer(na == n_a, nb == n_b)
    p = float(np.sum(np.abs(blk) ** 2))
    post = StateVector(blk.ravel() / math.sqrt(p), psi.dims) if p > 0 else None
    return p, post


def activate_refbit() -> dict:
    """Single-photon entangled state plus a shared |+>|+> frame, post-selected on one photon per wing."""
    one = mode_numbers(1)
    joint = join_bipartite(single_photon_state(), plus_plus_state())
    na = nb = join_numbers(one, one)
    p, post = project_local_numbers(joint, na, nb, 1, 1)
    return {"success_probability": p, "post_state": post, "number_a": na, "number_b": nb}


def two_copy_distill() -> dict:
    one = mode_numbers(1)
    joint = join_bipartite(single_photon_state(), single_photon_state())
    na = nb = join_numbers(one, one)
    p, post = project_local_numbers(joint, na, nb, 1, 1)
    return {"success_probability": p, "post_state": post, "number_a": na, "number_b": nb}


def enumerate_activation_amplitudes() -> dict:
    """Brute-force amplitude table over the 16 occupation patterns (A1, B1, A2, B2)."""
    table = {}
    for a1, b1, a2, b2 in itertools.product((0, 1), repeat=4):
        amp = (1 / math.sqrt(2) if a1 + b1 == 1 else 0.0) * 0.5
        table[(a1, b1, a2, b2)] = amp
    kept = {k: v for k, v in table.items() if k[0] + k[2] == 1 and k[1] + k[3] == 1 and v}
    return {"kept": kept, "probability": sum(v * v for v in kept.values())}


# ----------------------------------------------------------------------------
# ancilla-free bit commitment under a J^2 superselection rule

TOKEN_SPINS = (0, 1, 2)


def token_index(j: int, m: int) -> int:
    offset = sum(2 * jj + 1 for jj in TOKEN_SPINS if jj < j)
    return offset + (j - m)


def commitment_state(b: int) -> StateVector:
    """Total spin (1, +1) state of a spin-1 proof and a token in 0 (+) 1 (+) 2.

    The token's spin-1 component carries the committed bit as a sign.
    """
    if b not in (0, 1):
        raise ValueError("bit must be 0 or 1")
    weights = {0: math.sqrt(2) / 3, 1: (-1) ** (b + 1) / math.sqrt(2), 2: math.sqrt(10) / 6}
    dim_t = sum(2 * j + 1 for j in TOKEN_SPINS)
    amp = np.zeros((3, dim_t))
    for jt, w in weights.items():
        for p_idx, mp in enumerate(spin_labels(1)):
            mt = 1 - mp
            if abs(mt) <= jt:
                amp[p_idx, token_index(jt, int(mt))] += w * clebsch_gordan(1, jt, 1, mp, mt, 1)
    return StateVector(amp.ravel(), [3, dim_t])


def token_states() -> tuple:
    rhos = []
    for b in (0, 1):
        chi = commitment_state(b)
        rhos.append(DensityOperator(reduce_matrix(np.outer(chi.amplitudes, chi.amplitudes.conj()), chi.dims, [1]),
                                    [chi.dims[1]]))
    return tuple(rhos)


def spin_block_pinch(rho: DensityOperator) -> np.ndarray:
    """Keep only coherences inside each total-spin block of the token."""
    out = np.zeros_like(rho.matrix)
    for j in TOKEN_SPINS:
        s = slice(token_index(j, j), token_index(j, -j) + 1)
        out[s, s] = rho.matrix[s, s]
    return out


def bit_commitment_tokens() -> dict:
    rho0, rho1 = token_states()
    pinch0, pinch1 = np.diag(np.diag(rho0.matrix)), np.diag(np.diag(rho1.matrix))
    same = bool(np.max(np.abs(pinch0 - pinch1)) <= 1e-10)
    return {"rho0": rho0, "rho1": rho1, "pinched0": pinch0, "pinched1": pinch1,
            "fidelity": fidelity(rho0, rho1), "ssr_distinguishable": not same}
