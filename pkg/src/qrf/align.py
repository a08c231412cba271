"""Reference-frame alignment as covariant estimation.

A signal state |psi> is rotated by an unknown group element g; the receiver
measures a covariant POVM whose effects are the group orbit of a fiducial
|e><e|, guesses g', and scores a payoff of the relative element g'^-1 g.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .group_rep import (
    FIDELITY_PAYOFF,
    CollectiveSU2Rep,
    IrrepDecomposition,
    PayoffFunction,
    U1Rep,
    class_angles,
    class_quadrature,
    clebsch_gordan,
    couple_qubits,
    legendre_largest_zero,
    quaternion_inverse,
    quaternion_multiply,
    rotated_z,
    su2_character,
    u1_decomposition,
    wigner_d,
)
from .quantum_core import StateVector
from .twirl import block_twirl

DEGENERACY_TOL = 1e-12


def top_eigenvector(m: np.ndarray):
    """Largest eigenpair of a real symmetric matrix, sign fixed by the first coefficient."""
    w, v = np.linalg.eigh(m)
    vec = v[:, -1]
    if vec[0] < 0 or (abs(vec[0]) < DEGENERACY_TOL and vec[np.argmax(np.abs(vec))] < 0):
        vec = -vec
    return float(w[-1]), vec


# ----------------------------------------------------------------------------
# fiducial effects


def _default_rep(dec: IrrepDecomposition):
    if dec.group == "su2":
        return CollectiveSU2Rep(dec.n_qubits)
    spectrum = np.zeros(dec.dim)
    for b in dec.blocks:
        for r in range(b.start, b.stop):
            spectrum[np.argmax(np.abs(dec.isometry[r]))] = b.label
    return U1Rep(spectrum)


@dataclass(frozen=True)
class CovariantMeasurement:
    """Orbit of |e><e| under ``rep``; resolves the identity on the support subspace."""

    effect: np.ndarray
    dec: IrrepDecomposition
    rep: object
    support: dict

    def support_projector(self) -> np.ndarray:
        p = np.zeros((self.dec.dim, self.dec.dim), dtype=complex)
        for b in self.dec.blocks:
            for lam in range(self.support.get(b.label, 0)):
                for k in range(b.gauge_dim):
                    r = b.index(lam, k)
                    p[r, r] = 1
        return self.dec.from_coupled(p)

    def completeness_error(self) -> float:
        twirled = block_twirl(np.outer(self.effect, self.effect.conj()), self.dec)
        return float(np.max(np.abs(twirled - self.support_projector())))

    @property
    def norm_sq(self) -> float:
        return float(np.vdot(self.effect, self.effect).real)

    def likelihood(self, guesses, rotated_states) -> np.ndarray:
        """|<e| U(g')^dag U(g) |psi>|^2 for each guess and each pre-rotated signal."""
        w = self.rep.act(guesses, self.effect)
        return np.abs(np.sum(w.conj() * rotated_states, axis=1)) ** 2


def fiducial_povm(dec: IrrepDecomposition, support: dict | None = None,
                  gauge_basis: dict | None = None, rep=None) -> CovariantMeasurement:
    """Build |e> = sum_q sqrt(dim M_q) sum_{m < d_q} |phi_m>|r_m>.

    ``support`` maps a sector label to its Schmidt rank d_q (default: the
    largest allowed, min(dim M_q, dim N_q)). ``gauge_basis`` optionally maps a
    label to a matrix whose columns are the gauge vectors phi_m.
    """
    labels = {b.label for b in dec.blocks}
    if support is None:
        support = {b.label: min(b.gauge_dim, b.multiplicity) for b in dec.blocks}
    support = {float(k): int(v) for k, v in support.items()}
    gauge_basis = {float(k): np.asarray(v) for k, v in (gauge_basis or {}).items()}
    for lab, d in support.items():
        if lab not in labels:
            raise ValueError(f"support names unknown sector {lab}")
        b = dec.block(lab)
        if d < 0 or d > min(b.gauge_dim, b.multiplicity):
            raise ValueError(f"Schmidt rank {d} not allowed in sector {lab}")
    coupled = np.zeros(dec.dim, dtype=complex)
    for b in dec.blocks:
        d = support.get(b.label, 0)
        phis = gauge_basis.get(b.label, np.eye(b.gauge_dim))
        if phis.ndim == 1:
            phis = phis[:, None]
        if phis.shape[0] != b.gauge_dim or phis.shape[1] < d:
            raise ValueError(f"gauge basis for sector {b.label} has the wrong shape")
        for lam in range(d):
            coupled[b.index(lam, 0):b.index(lam, 0) + b.gauge_dim] += math.sqrt(b.gauge_dim) * phis[:, lam]
    support = {b.label: support.get(b.label, 0) for b in dec.blocks}
    return CovariantMeasurement(dec.from_coupled(coupled), dec, rep or _default_rep(dec), support)


def phase_decomposition(n_max: int) -> IrrepDecomposition:
    """Single optical mode truncated at n_max photons."""
    return u1_decomposition(np.arange(n_max + 1))


# ----------------------------------------------------------------------------
# maximum likelihood


@dataclass(frozen=True)
class MaxLikelihoodOptimum:
    state: StateVector
    mu_max: float
    measurement: CovariantMeasurement


def max_likelihood_optimum(dec: IrrepDecomposition) -> MaxLikelihoodOptimum:
    """Signal proportional to the full-support fiducial; peak likelihood = |e|^2."""
    meas = fiducial_povm(dec)
    e = meas.effect
    mu = sum(b.gauge_dim * min(b.gauge_dim, b.multiplicity) for b in dec.blocks)
    return MaxLikelihoodOptimum(StateVector(e / np.linalg.norm(e)), float(mu), meas)


def twirled_rank(psi, dec: IrrepDecomposition, tol: float = 1e-8) -> int:
    v = psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi)
    ev = np.linalg.eigvalsh(block_twirl(np.outer(v, v.conj()), dec))
    return int(np.sum(ev > tol))


def cartesian_mu_max_formula(N: int) -> float:
    return N ** 3 / 6 + 5 * N / 6 + 1


# ----------------------------------------------------------------------------
# fidelity optima


@dataclass(frozen=True)
class FidelityOptimum:
    coefficients: np.ndarray
    fbar: float
    matrix: np.ndarray
    labels: np.ndarray


def phase_fidelity_optimum(N: int) -> FidelityOptimum:
    """Best single-mode state with at most N photons for payoff cos^2(dtheta/2)."""
    if N < 1:
        raise ValueError("need at least one photon")
    m = 0.5 * np.eye(N + 1) + 0.25 * (np.eye(N + 1, k=1) + np.eye(N + 1, k=-1))
    f, vec = top_eigenvector(m)
    return FidelityOptimum(vec, f, m, np.arange(N + 1))


def phase_fidelity_closed_form(N: int) -> float:
    return 0.5 * (1 + math.cos(math.pi / (N + 2)))


def direction_payoff_matrix(N: int, m: int = 0) -> tuple:
    """Matrix of the direction-fidelity quadratic form over spins j = |m|..N/2.

    Entries sqrt((2j+1)(2j'+1)) * 1/2 int sin(b) d^j_mm d^j'_mm cos^2(b/2) db,
    integrated exactly by Gauss-Legendre in cos(b).
    """
    if N % 2:
        raise ValueError("direction alignment is implemented for even N only")
    js = np.arange(abs(m), N // 2 + 1)
    x, w = np.polynomial.legendre.leggauss(N + 4)
    beta = np.arccos(x)
    d = np.array([wigner_d(j, beta)[:, j - m, j - m] for j in js])  # m-row of each d^j
    weight = 0.5 * w * (1 + x) / 2
    mat = np.einsum("an,bn,n->ab", d, d, weight)
    scale = np.sqrt(2 * js + 1)
    return mat * np.outer(scale, scale), js


def direction_fidelity_optimum(N: int, m: int = 0) -> FidelityOptimum:
    mat, js = direction_payoff_matrix(N, m)
    f, vec = top_eigenvector(mat)
    return FidelityOptimum(vec, f, mat, js)


def direction_fidelity_closed_form(N: int) -> float:
    return 0.5 * (1 + legendre_largest_zero(N // 2 + 1))


def direction_state(N: int, coefficients, m: int = 0):
    """N-qubit signal sum_j b_j |j, m>|lambda=0> and its fiducial measurement."""
    dec = couple_qubits(N)
    js = np.arange(abs(m), N // 2 + 1)
    psi = np.zeros(dec.dim, dtype=complex)
    support, basis = {}, {}
    for j, b in zip(js, coefficients):
        blk = dec.block(j)
        psi[blk.index(0, j - m)] = b
        support[j] = 1
        basis[j] = np.eye(blk.gauge_dim)[:, j - m]
    meas = fiducial_povm(dec, support, basis)
    return StateVector(dec.from_coupled(psi), [2] * N), meas


def cartesian_payoff_matrix(N: int, payoff: PayoffFunction = FIDELITY_PAYOFF, n_nodes: int = 256):
    """Quadratic form for the Cartesian-frame signal over j = 0..N/2.

    Sectors j < N/2 carry maximally entangled gauge/multiplicity states, so
    their amplitudes are characters and the entries are class integrals.
    The stretched sector j = N/2 has multiplicity one; its entries reduce by
    Schur orthogonality to a character integral (off-diagonal) and a
    Clebsch-Gordan sum over the payoff's character coefficients (diagonal).
    """
    if N % 2 or N < 2:
        raise ValueError("Cartesian alignment needs even N >= 2")
    top = N // 2
    om, w = class_quadrature(n_nodes)
    f = payoff(om)
    chis = np.array([su2_character(j, om) for j in range(top + 1)])
    mat = np.einsum("an,bn,n->ab", chis, chis, w * f)
    mat[top, :top] = mat[top, :top] / math.sqrt(2 * top + 1)
    mat[:top, top] = mat[top, :top]
    coeffs = payoff.character_expansion(top + 1, n_nodes)
    mat[top, top] = sum(a * clebsch_gordan(l, top, top, 0, top, top) ** 2
                        for l, a in coeffs.items() if l.denominator == 1 and l <= 2 * top)
    return mat


def cartesian_fidelity_optimum(N: int, payoff: PayoffFunction = FIDELITY_PAYOFF) -> FidelityOptimum:
    mat = cartesian_payoff_matrix(N, payoff)
    f, vec = top_eigenvector(mat)
    return FidelityOptimum(vec, f, mat, np.arange(N // 2 + 1))


def cartesian_state(N: int, coefficients):
    """N-qubit signal for the Cartesian-frame problem plus its fiducial measurement."""
    dec = couple_qubits(N)
    top = N // 2
    psi = np.zeros(dec.dim, dtype=complex)
    for j, b in enumerate(coefficients):
        blk = dec.block(j)
        if j < top:
            for k in range(blk.gauge_dim):
                psi[blk.index(k, k)] = b / math.sqrt(blk.gauge_dim)
        else:
            psi[blk.index(0, 0)] = b
    return StateVector(dec.from_coupled(psi), [2] * N), fiducial_povm(dec)


# ----------------------------------------------------------------------------
# Monte Carlo protocol simulation


@dataclass(frozen=True)
class EstimationRun:
    trials: int
    seed: int
    payoffs: np.ndarray
    mean: float
    stderr: float


def phase_payoff(guess, true):
    return np.cos((np.asarray(true) - np.asarray(guess)) / 2) ** 2


def direction_payoff(guess, true):
    """(1 + n_guess . n_true)/2 for the rotated z axes."""
    return 0.5 * (1 + np.sum(rotated_z(guess) * rotated_z(true), axis=1))


def relative_class_angle(guess, true):
    return class_angles(quaternion_multiply(quaternion_inverse(guess), true))


def _score(payoff, rep, guesses, trues):
    if isinstance(payoff, PayoffFunction):
        if isinstance(rep, CollectiveSU2Rep):
            return payoff(relative_class_angle(guesses, trues))
        if isinstance(rep, U1Rep):
            return payoff(np.asarray(trues) - np.asarray(guesses))
        raise TypeError("class-function payoffs need an SU(2) or U(1) representation")
    return np.asarray(payoff(guesses, trues), dtype=float)


def simulate_alignment(state, measurement: CovariantMeasurement, payoff, trials: int,
                       rng_seed: int = 0, batch: int = 20000) -> EstimationRun:
    """Draw g from Haar measure, send U(g)|psi>, sample g' from the covariant POVM.

    Guesses are drawn by rejection: propose g' from Haar measure and accept
    with probability p(g'|g) / |e|^2, which is a valid bound since
    |<e|U|psi>|^2 <= |e|^2 for normalized psi.
    """
    psi = state.amplitudes if isinstance(state, StateVector) else np.asarray(state, dtype=complex)
    rep = measurement.rep
    if psi.size != measurement.effect.size:
        raise ValueError("state and measurement dimensions differ")
    rng = np.random.default_rng(rng_seed)
    bound = measurement.norm_sq * float(np.vdot(psi, psi).real)
    payoffs = np.empty(trials)
    for lo in range(0, trials, batch):
        n = min(batch, trials - lo)
        trues = rep.sample(rng, n)
        rotated = rep.act(trues, psi)
        guesses = np.empty_like(trues)
        pending = np.arange(n)
        while pending.size:
            prop = rep.sample(rng, pending.size)
            p = measurement.likelihood(prop, rotated[pending]) / bound
            ok = rng.random(pending.size) < p
            guesses[pending[ok]] = prop[ok]
            pending = pending[~ok]
        payoffs[lo:lo + n] = _score(payoff, rep, guesses, trues)
    mean = float(payoffs.mean())
    stderr = float(payoffs.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan")
    return EstimationRun(trials, rng_seed, payoffs, mean, stderr)


def exact_average_payoff(state, measurement: CovariantMeasurement, payoff, n_samples: int = 200000,
                         rng_seed: int = 1) -> float:
    """Plain Haar Monte Carlo average of payoff * likelihood over the relative element."""
    psi = state.amplitudes if isinstance(state, StateVector) else np.asarray(state)
    rep = measurement.rep
    rng = np.random.default_rng(rng_seed)
    rel = rep.sample(rng, n_samples)
    lik = measurement.likelihood(rel, np.broadcast_to(psi, (n_samples, psi.size)))
    ident = np.tile(np.array([1.0, 0, 0, 0]), (n_samples, 1)) if isinstance(rep, CollectiveSU2Rep) \
        else np.zeros(n_samples)
    return float(np.mean(lik * _score(payoff, rep, rel, ident)))


# ----------------------------------------------------------------------------
# multi-round bitwise phase protocol

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Z = np.diag([1.0, -1.0]).astype(complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S_DAG = np.diag([1, -1j])


@dataclass(frozen=True)
class BitwiseResult:
    theta_estimate: float
    bits: tuple
    repetitions: int
    qubit_count: int
    success: bool


def repetitions_per_bit(k: int, eps: float) -> int:
    return math.ceil(32 * math.log(2 * k / eps))


def bitwise_round_expectations(theta: float, j: int):
    """Exact readout expectations after 2^j round trips.

    Returns (<Z> after H, <-Z> after S^dag then H); these equal
    cos(2^(j+1) theta) and sin(2^(j+1) theta).
    """
    half = np.diag(np.exp([-0.5j * theta, 0.5j * theta]))
    x_bob = half @ PAULI_X @ half.conj().T
    loop = np.linalg.matrix_power(PAULI_X @ x_bob, 2 ** j)
    start = HADAMARD @ np.array([1, 0], dtype=complex)
    s_cos = HADAMARD @ loop @ start
    s_sin = HADAMARD @ S_DAG @ loop @ start
    return (float(np.real(s_cos.conj() @ PAULI_Z @ s_cos)),
            float(np.real(s_sin.conj() @ -PAULI_Z @ s_sin)))


def bitwise_phase_protocol(k: int, eps: float, theta_true: float, rng_seed: int = 0) -> BitwiseResult:
    """Estimate theta = pi * 0.t1 t2 ... tk one binary digit at a time.

    Bit t_{j+1} uses n single-qubit runs, each with 2^j round trips. Half
    the runs read the cosine quadrature and half the sine, which removes the
    theta <-> pi - theta ambiguity of a cosine-only readout. Digits are then
    fixed from least to most significant by choosing the branch consistent
    with each round's angle estimate.
    """
    if not 1 <= k < 20:
        raise ValueError("k must satisfy 1 <= k < 20")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if not 0 <= theta_true < math.pi:
        raise ValueError("theta must lie in [0, pi)")
    rng = np.random.default_rng(rng_seed)
    n = repetitions_per_bit(k, eps)
    n_cos = (n + 1) // 2
    frac = []
    for j in range(k):
        c, s = bitwise_round_expectations(theta_true, j)
        c_hat = 2 * rng.binomial(n_cos, (1 + c) / 2) / n_cos - 1
        s_hat = 2 * rng.binomial(n - n_cos, (1 + s) / 2) / (n - n_cos) - 1 if n > n_cos else 0.0
        frac.append((math.atan2(s_hat, c_hat) / (2 * math.pi)) % 1.0)
    est = frac[-1]
    for j in range(k - 2, -1, -1):
        cands = [(b + est) / 2 for b in (0, 1)]
        dist = [min(abs(c - frac[j]), 1 - abs(c - frac[j])) for c in cands]
        est = cands[int(np.argmin(dist))]
    code = int(round(est * 2 ** k)) % 2 ** k
    bits = tuple(int(b) for b in format(code, f"0{k}b"))
    theta_est = math.pi * code / 2 ** k
    err = abs(theta_est - theta_true) % math.pi
    err = min(err, math.pi - err)
    return BitwiseResult(theta_est, bits, n, n * (2 ** k - 1), err <= math.pi / 2 ** k)
