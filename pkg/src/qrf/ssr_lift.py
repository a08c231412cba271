"""Lifting a superselection rule with a quantum reference frame.

The dollar map embeds any system operator A into a group-invariant operator
on RF (x) system, sum_g |g><g| (x) U(g) A U(g)^dag, which preserves products,
adjoints and Born-rule statistics. The U(1) quantize/dequantize pair moves
between an external-frame description and the relational one.
"""
from __future__ import annotations

import numpy as np

from .group_rep import CyclicRep
from .quantum_core import DensityOperator, QuantumChannel, StateVector

WEDGE_TOL = 1e-12


def dollar_map(a: np.ndarray, rep: CyclicRep) -> np.ndarray:
    """sum_g |g><g| (x) U(g) A U(g)^dag with the RF as the first tensor factor."""
    a = np.asarray(a, dtype=complex)
    if a.shape != (rep.dim, rep.dim):
        raise ValueError("operator dimension does not match the representation")
    d = rep.order
    out = np.zeros((d * rep.dim, d * rep.dim), dtype=complex)
    for g in rep.elements():
        u = rep.unitary(g)
        s = slice(g * rep.dim, (g + 1) * rep.dim)
        out[s, s] = u @ a @ u.conj().T
    return out


def invariant_state(rho: DensityOperator, rep: CyclicRep) -> DensityOperator:
    """rho_inv = $(rho) / |G|."""
    return DensityOperator(dollar_map(rho.matrix, rep) / rep.order, [rep.order] + list(rho.dims))


def invariant_channel(ch: QuantumChannel, rep: CyclicRep) -> QuantumChannel:
    return QuantumChannel(tuple(dollar_map(k, rep) for k in ch.kraus), f"lifted {ch.label}")


def joint_rep_unitary(rep: CyclicRep, g: int) -> np.ndarray:
    return np.kron(rep.regular(g), rep.unitary(g))


def invariant_born_check(rho: DensityOperator, effect: np.ndarray, rep: CyclicRep,
                         channel: QuantumChannel | None = None) -> dict:
    """Compare Tr[E_inv(rho_inv) E_inv] with Tr[E(rho) E]."""
    ch = channel or QuantumChannel.identity(rho.dim)
    out = sum(k @ rho.matrix @ k.conj().T for k in ch.kraus)
    rhs = float(np.real(np.trace(out @ effect)))
    rho_inv = dollar_map(rho.matrix, rep) / rep.order
    lifted = [dollar_map(k, rep) for k in ch.kraus]
    out_inv = sum(k @ rho_inv @ k.conj().T for k in lifted)
    lhs = float(np.real(np.trace(out_inv @ dollar_map(effect, rep))))
    return {"lhs": lhs, "rhs": rhs}


# ----------------------------------------------------------------------------
# U(1): quantization and dequantization of a phase reference


def quantize_phase_state(psi_s, n_rf: int) -> StateVector:
    """sum_m c_m |m>_S  ->  sum_m c_m |n-m>_R |m>_S (a total-number eigenstate)."""
    c = psi_s.amplitudes if isinstance(psi_s, StateVector) else np.asarray(psi_s, dtype=complex)
    m_max = int(np.max(np.flatnonzero(np.abs(c) > 0)))
    if n_rf < m_max:
        raise ValueError(f"reference number {n_rf} is below the system's maximal number {m_max}")
    out = np.zeros((n_rf + 1, c.size), dtype=complex)
    for m, cm in enumerate(c):
        if m <= n_rf:
            out[n_rf - m, m] = cm
    return StateVector(out.ravel(), [n_rf + 1, c.size])


class WedgeViolation(ValueError):
    pass


def relational_factorization(state, dims) -> tuple:
    """Relabel |n-m>_R|m>_S as |n>_gl|m>_rel.

    Returns (operator on gl (x) rel as a 4-index array [n, m, n', m'], the
    list of total numbers n). Raises if the support leaves the wedge
    m <= m_max <= n_min.
    """
    d_r, d_s = dims
    rho = np.outer(state.amplitudes, state.amplitudes.conj()) if isinstance(state, StateVector) \
        else (state.matrix if isinstance(state, DensityOperator) else np.asarray(state))
    pops = np.real(np.diag(rho)).reshape(d_r, d_s)
    occupied = np.argwhere(pops > WEDGE_TOL)
    if occupied.size == 0:
        raise ValueError("state has no support")
    totals = occupied.sum(axis=1)
    m_max, n_min = int(occupied[:, 1].max()), int(totals.min())
    if m_max > n_min:
        raise WedgeViolation(f"system number {m_max} exceeds the smallest total number {n_min}")
    ns = np.arange(n_min, int(totals.max()) + 1)
    t = rho.reshape(d_r, d_s, d_r, d_s)
    out = np.zeros((ns.size, d_s, ns.size, d_s), dtype=complex)
    for a, n in enumerate(ns):
        for m in range(d_s):
            if not 0 <= n - m < d_r:
                continue
            for b, n2 in enumerate(ns):
                for m2 in range(d_s):
                    if 0 <= n2 - m2 < d_r:
                        out[a, m, b, m2] = t[n - m, m, n2 - m2, m2]
    return out, ns


def dequantize_u1(state, dims) -> DensityOperator:
    """Relational state of the system: relabel to global (x) relational and trace the global factor."""
    joint, _ = relational_factorization(state, dims)
    rel = np.einsum("nanb->ab", joint)
    tr = np.real(np.trace(rel))
    return DensityOperator(rel / tr, [dims[1]])
