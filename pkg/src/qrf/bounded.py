"""Bounded quantum reference frames.

A spin-j system stands in for an ideal direction, a coherent field for an
ideal phase. Both work only approximately and wear out with use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.sparse import diags, kron as skron
from scipy.sparse.linalg import expm_multiply
from scipy.special import gammaln

from .group_rep import clebsch_gordan, spin_labels, twice
from .quantum_core import DensityOperator, Povm, QuantumChannel, StateVector
from .ssr_lift import dequantize_u1


@dataclass(frozen=True)
class SpinJFrame:
    j: float
    state: DensityOperator

    def __post_init__(self):
        if twice(self.j) < 1:
            raise ValueError("frame spin must be at least 1/2")
        if self.state.dim != twice(self.j) + 1:
            raise ValueError("state dimension does not match 2j+1")

    @classmethod
    def coherent_z(cls, j):
        d = twice(j) + 1
        m = np.zeros((d, d))
        m[0, 0] = 1
        return cls(twice(j) / 2, DensityOperator(m))


def coupled_projector(j, total) -> np.ndarray:
    """Projector onto total spin ``total`` in spin-j (x) spin-1/2, product basis (m_frame, m_spin)."""
    mj, ms = spin_labels(j), spin_labels(0.5)
    d = mj.size * 2
    p = np.zeros((d, d))
    for M in spin_labels(total):
        v = np.zeros(d)
        for a, m1 in enumerate(mj):
            for b, m2 in enumerate(ms):
                v[2 * a + b] = clebsch_gordan(j, 0.5, total, m1, m2, M)
        p += np.outer(v, v)
    return p


def frame_povm(j) -> Povm:
    jv = twice(j) / 2
    return Povm((coupled_projector(j, jv + 0.5), coupled_projector(j, jv - 0.5)), ("aligned", "anti-aligned"))


def discriminate_aligned(j) -> dict:
    """Relational test of whether a spin-1/2 points along or against a spin-j frame |j,j>."""
    povm = frame_povm(j)
    d = twice(j) + 1
    frame = np.zeros(d)
    frame[0] = 1
    probs = {}
    for name, spin in (("+", np.array([1.0, 0.0])), ("-", np.array([0.0, 1.0]))):
        psi = np.kron(frame, spin)
        probs[name] = povm.probabilities(DensityOperator(np.outer(psi, psi)))
    p_pp, p_mm = probs["+"][0], probs["-"][1]
    return {"povm": povm, "p(+|+)": float(p_pp), "p(-|+)": float(probs["+"][1]),
            "p(+|-)": float(probs["-"][0]), "p(-|-)": float(p_mm),
            "p_success": float(0.5 * (p_pp + p_mm))}


def p_success_closed_form(j) -> float:
    """Target closed form 1 - 1/(4(j+1)) the acceptance check compares against."""
    return 1 - 1 / (4 * (twice(j) / 2 + 1))


def p_success_projector_form(j) -> float:
    """Closed form of the explicit projector calculation, 1 - 1/(4j+2)."""
    return 1 - 1 / (2 * twice(j) + 2)


# ----------------------------------------------------------------------------
# degradation under repeated use


def _partial_elements(j):
    """E^c_ab = <a|Pi_c|b> on the frame, for c in (+, -) and system labels a, b."""
    out = {}
    d = twice(j) + 1
    jv = twice(j) / 2
    for c, total in (("+", jv + 0.5), ("-", jv - 0.5)):
        p = coupled_projector(j, total).reshape(d, 2, d, 2)
        for a in range(2):
            for b in range(2):
                out[(c, a, b)] = p[:, a, :, b]
    return out


def degradation_channel(j) -> QuantumChannel:
    """Frame update after one relational measurement on a maximally mixed spin-1/2."""
    ks = tuple(e / math.sqrt(2) for e in _partial_elements(j).values())
    return QuantumChannel(ks, f"degradation j={j}")


def degradation_step(frame: SpinJFrame) -> SpinJFrame:
    ch = degradation_channel(frame.j)
    out = sum(k @ frame.state.matrix @ k.conj().T for k in ch.kraus)
    return SpinJFrame(frame.j, DensityOperator(0.5 * (out + out.conj().T)))


def success_probability(rho: DensityOperator, j) -> float:
    e = _partial_elements(j)
    return float(0.5 * np.real(np.trace(rho.matrix @ (e[("+", 0, 0)] + e[("-", 1, 1)]))))


def degradation_closed_form(j, n):
    jv = twice(j) / 2
    return 0.5 + jv / (2 * jv + 1) * (1 - 2 / (2 * jv + 1) ** 2) ** np.asarray(n)


def degradation_curve(j, n_steps: int) -> dict:
    if n_steps < 0:
        raise ValueError("n_steps must be non-negative")
    frame = SpinJFrame.coherent_z(j)
    sim = [success_probability(frame.state, j)]
    for _ in range(n_steps):
        frame = degradation_step(frame)
        sim.append(success_probability(frame.state, j))
    n = np.arange(n_steps + 1)
    return {"n": n, "simulated": np.array(sim), "closed_form": degradation_closed_form(j, n)}


def degradation_rate(j) -> float:
    jv = twice(j) / 2
    return -2 * jv / (2 * jv + 1) ** 3


def longevity(j, eps: float) -> dict:
    """Uses before the success probability may have dropped by eps.

    ``n_max`` is the linearized count floor(-eps/R); ``exact`` is the largest
    n with P(0) - P(n) <= eps on the closed-form curve (None if never).
    """
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 1/2)")
    jv = twice(j) / 2
    r = degradation_rate(j)
    n_lin = math.floor(-eps / r)
    ratio = 1 - 2 / (2 * jv + 1) ** 2
    floor_val = 1 - eps * (2 * jv + 1) / jv
    exact = None if floor_val <= 0 else math.floor(math.log(floor_val) / math.log(ratio))
    return {"n_max": n_lin, "exact": exact, "rate": r, "eps_j2": eps * jv * jv}


# ----------------------------------------------------------------------------
# Jaynes-Cummings atom driven by a quantized field used as a clock


@dataclass(frozen=True)
class BosonicMode:
    n_cut: int
    state: DensityOperator

    def leak(self) -> float:
        pops = np.real(np.diag(self.state.matrix))
        return float(pops[max(self.n_cut - 1, 0):].sum())


def coherent_amplitudes(alpha: complex, n_cut: int) -> np.ndarray:
    n = np.arange(n_cut + 1)
    a = abs(alpha)
    logmag = -a * a / 2 + n * (math.log(a) if a > 0 else 0.0) - 0.5 * gammaln(n + 1)
    if a == 0:
        logmag = np.where(n == 0, 0.0, -np.inf)
    return np.exp(logmag) * np.exp(1j * n * np.angle(alpha))


def jc_hamiltonian(g: float, n_cut: int):
    """H = i g (S+ a - a^dag S-) on atom (x) field; atom |0> ground, |1> excited."""
    a = diags(np.sqrt(np.arange(1, n_cut + 1)), 1, shape=(n_cut + 1, n_cut + 1))
    sp = np.array([[0, 0], [1, 0]])
    return 1j * g * (skron(sp, a) - skron(sp.T, a.T.conj()))


def classical_jc_state(alpha_abs: float, g: float, t: float) -> np.ndarray:
    """Atom driven by the classical field amplitude |alpha| (phase set by the frame)."""
    sp = np.array([[0, 0], [1, 0]], dtype=complex)
    h = 1j * g * alpha_abs * (sp - sp.T)
    return expm(-1j * h * t) @ np.array([0, 1], dtype=complex)


def jc_gate_fidelity(alpha: complex, g: float = 1.0, n_cut: int | None = None) -> dict:
    """Fidelity of the relational atom state with the classically driven one at t = pi/(2|alpha|g)."""
    a2 = abs(alpha) ** 2
    need = a2 + 10 * math.sqrt(a2)
    if n_cut is None:
        n_cut = math.ceil(need)
    if n_cut < need:
        raise ValueError(f"n_cut {n_cut} below |alpha|^2 + 10|alpha| = {need:.1f}")
    t = math.pi / (2 * abs(alpha) * g)
    field = coherent_amplitudes(alpha, n_cut)
    init_leak = 1 - float(np.sum(np.abs(field) ** 2))
    psi0 = np.kron(np.array([0, 1]), field)
    h = jc_hamiltonian(g, n_cut).tocsc()
    psi = expm_multiply(-1j * h * t, psi0)
    joint = psi.reshape(2, n_cut + 1)
    field_rho = joint.T @ joint.conj()
    mode = BosonicMode(n_cut, DensityOperator(field_rho / np.trace(field_rho).real))
    leak = init_leak + mode.leak()
    if leak > 1e-8:
        raise ValueError(f"truncation leak {leak:.2e} exceeds 1e-8")
    rf_first = joint.T.ravel()  # field is the reference, atom the system
    rf_first = rf_first / np.linalg.norm(rf_first)
    rel = dequantize_u1(StateVector(rf_first, [n_cut + 1, 2]), [n_cut + 1, 2])
    psi_c = classical_jc_state(abs(alpha), g, t)
    f_q = float(np.real(psi_c.conj() @ rel.matrix @ psi_c))
    f_a = 0.5 * (1 - math.cos(math.pi * math.sqrt(1 + a2) / math.sqrt(a2)) * math.exp(-math.pi ** 2 / (8 * (a2 + 1))))
    return {"F_quantized": f_q, "F_approx": f_a, "leak": leak, "n_cut": n_cut, "t": t, "field": mode,
            "relational_state": rel, "classical_state": psi_c}

