"""Group twirls: the decoherence seen by a party lacking the reference frame."""
from __future__ import annotations

import numpy as np

from .group_rep import CyclicRep, IrrepDecomposition, U1Rep, class_quadrature, couple_qubits, su2_matrices
from .quantum_core import DensityOperator, QuantumChannel


def _matrix(rho):
    return rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=complex)


def _wrap(like, m):
    if isinstance(like, DensityOperator):
        return DensityOperator(0.5 * (m + m.conj().T), like.dims)
    return m


def block_twirl(rho, dec: IrrepDecomposition):
    """Exact group average in block form.

    Each charge sector is projected out, its gauge factor replaced by the
    maximally mixed state and its multiplicity factor kept; coherences
    between sectors vanish.
    """
    m = dec.to_coupled(_matrix(rho))
    out = np.zeros_like(m)
    for b in dec.blocks:
        g, c = b.gauge_dim, b.multiplicity
        blk = m[b.start:b.stop, b.start:b.stop].reshape(c, g, c, g)
        rho_mult = np.einsum("akbk->ab", blk)
        out[b.start:b.stop, b.start:b.stop] = np.kron(rho_mult, np.eye(g) / g)
    return _wrap(rho, dec.from_coupled(out))


def sector_projectors(dec: IrrepDecomposition) -> dict:
    """Projector onto each charge sector in the computational basis."""
    out = {}
    for b in dec.blocks:
        p = np.zeros((dec.dim, dec.dim), dtype=complex)
        p[b.start:b.stop, b.start:b.stop] = np.eye(b.size)
        out[b.label] = dec.from_coupled(p)
    return out


def u1_twirl(rho, number_op):
    """Pinch onto the eigenspaces of a diagonal integer number operator."""
    n = np.asarray(number_op)
    n = np.diag(n) if n.ndim == 2 else n
    if n.ndim == 2 or not np.allclose(n, np.round(n)):
        raise ValueError("number operator must have an integer spectrum")
    m = _matrix(rho)
    mask = np.equal.outer(np.round(n), np.round(n))
    return _wrap(rho, np.where(mask, m, 0))


def su2_twirl_qubits(rho, N: int):
    """Average over collective rotations of N qubits."""
    m = _matrix(rho)
    if m.shape != (2 ** N, 2 ** N):
        raise ValueError(f"state of dimension {m.shape[0]} is not an {N}-qubit state")
    return block_twirl(rho, couple_qubits(N))


def dense_twirl_via_sampling(rho, rep, n_samples: int, rng_seed: int = 0):
    """Monte Carlo group average; returns (twirled matrix, elementwise standard error)."""
    if n_samples < 100:
        raise ValueError("need at least 100 samples")
    m = _matrix(rho)
    rng = np.random.default_rng(rng_seed)
    acc = np.zeros_like(m)
    acc2 = np.zeros(m.shape)
    batch = 2048
    done = 0
    while done < n_samples:
        k = min(batch, n_samples - done)
        gs = rep.sample(rng, k)
        us = np.array([rep.unitary(g) for g in gs])
        terms = us @ m @ us.conj().transpose(0, 2, 1)
        acc += terms.sum(axis=0)
        acc2 += (np.abs(terms) ** 2).sum(axis=0)
        done += k
    mean = acc / n_samples
    var = np.clip(acc2 / n_samples - np.abs(mean) ** 2, 0, None)
    return _wrap(rho, mean), np.sqrt(var / n_samples)


def fourier_coefficients(phase_distribution, ks, n_grid: int = 4096):
    """c_k = E[exp(-i k phi)] for a density callable or a discrete (angles, weights) pair."""
    ks = np.asarray(ks)
    if callable(phase_distribution):
        phi = 2 * np.pi * np.arange(n_grid) / n_grid
        p = np.asarray(phase_distribution(phi), dtype=float)
        norm = p.sum() * 2 * np.pi / n_grid
        if abs(norm - 1) > 1e-8:
            raise ValueError(f"phase density integrates to {norm}, not 1")
        w = p * 2 * np.pi / n_grid
    else:
        phi, w = (np.asarray(a, dtype=float) for a in phase_distribution)
        if abs(w.sum() - 1) > 1e-8 or np.any(w < 0):
            raise ValueError("discrete phase distribution must have nonnegative weights summing to 1")
    return np.exp(-1j * np.outer(ks, phi)) @ w


def weighted_u1_twirl(rho, number_op, phase_distribution):
    """Partial phase averaging with U(phi) = exp(-i phi N) drawn from a given distribution."""
    n = np.asarray(number_op)
    n = np.diag(n) if n.ndim == 2 else n
    n = np.round(n).astype(int)
    diff = np.subtract.outer(n, n)
    ks = np.unique(diff)
    coeff = dict(zip(ks.tolist(), fourier_coefficients(phase_distribution, ks)))
    factor = np.vectorize(coeff.get)(diff)
    return _wrap(rho, _matrix(rho) * factor)


def _charge_components(k: np.ndarray, n_out: np.ndarray, n_in: np.ndarray):
    diff = np.subtract.outer(n_out, n_in)
    for shift in np.unique(diff):
        part = np.where(diff == shift, k, 0)
        if np.any(part != 0):
            yield part


def super_twirl(ch: QuantumChannel, group) -> QuantumChannel:
    """Group-average a channel: E -> integral of U(g) E(U(g)^dag . U(g)) U(g)^dag.

    For U(1) each Kraus operator is split into pieces that shift the charge
    by a fixed amount; cross terms between different shifts average to zero.
    For a finite group the average is an explicit sum.
    """
    if ch.dim != group.dim:
        raise ValueError("channel and representation dimensions differ")
    if isinstance(group, U1Rep):
        n = np.round(group.spectrum).astype(int)
        ks = [part for k in ch.kraus for part in _charge_components(k, n, n)]
        return QuantumChannel(tuple(ks), f"u1-twirled {ch.label}")
    if isinstance(group, CyclicRep):
        d = group.order
        ks = []
        for g in group.elements():
            u = group.unitary(g)
            ks.extend(u @ k @ u.conj().T / np.sqrt(d) for k in ch.kraus)
        return QuantumChannel(tuple(ks), f"Z{d}-twirled {ch.label}")
    raise TypeError(f"unsupported group type {type(group).__name__}")


def _commutator_norm(a, g):
    return float(np.max(np.abs(a @ g - g @ a), initial=0.0))


def is_g_invariant(op_or_channel, rep, tol: float = 1e-10) -> bool:
    """Commutation test against the generators of the representation.

    Operators must commute with each generator; channels must be covariant,
    tested on their superoperator.
    """
    gens = rep.generators()
    if isinstance(op_or_channel, QuantumChannel):
        s = op_or_channel.superoperator()
        d = op_or_channel.dim
        worst = 0.0
        for g in gens:
            if rep.kind == "lie":
                ad = np.kron(g, np.eye(d)) - np.kron(np.eye(d), g.T)
            else:
                ad = np.kron(g, g.conj())
            worst = max(worst, _commutator_norm(s, ad))
        return worst <= tol
    a = _matrix(op_or_channel)
    return max(_commutator_norm(a, g) for g in gens) <= tol


def class_quadrature_twirl(rho, N: int, n_class: int = 1024):
    """Haar average of R^{(x)N} rho R^{(x)N dag} by deterministic quadrature.

    Haar measure factors into the Weyl class density times a uniform rotation
    axis. The integrand is a polynomial of degree 2N in the axis, so a small
    product rule on the sphere is exact. Used as an independent check of
    block_twirl.
    """
    m = _matrix(rho)
    om, w = class_quadrature(n_class)
    ct, wt = np.polynomial.legendre.leggauss(2 * N + 2)
    phis = 2 * np.pi * np.arange(4 * N + 4) / (4 * N + 4)
    st = np.sqrt(1 - ct ** 2)
    axes = np.stack([np.outer(st, np.cos(phis)), np.outer(st, np.sin(phis)),
                     np.outer(ct, np.ones_like(phis))], axis=-1).reshape(-1, 3)
    aw = np.repeat(wt / 2, phis.size) / phis.size
    out = np.zeros_like(m)
    for omega, wo in zip(om, w):
        q = np.column_stack([np.full(len(axes), np.cos(omega / 2)), np.sin(omega / 2) * axes])
        u1 = su2_matrices(q)
        us = u1
        for _ in range(N - 1):
            us = np.einsum("nab,ncd->nacbd", us, u1).reshape(len(q), us.shape[1] * 2, -1)
        out += wo * np.einsum("n,nab,bc,ndc->ad", aw, us, m, us.conj())
    return _wrap(rho, out)


def pinch_between(rho, projectors):
    """Sum_q P_q rho P_q for an arbitrary complete set of orthogonal projectors."""
    m = _matrix(rho)
    return _wrap(rho, sum(p @ m @ p for p in projectors))
