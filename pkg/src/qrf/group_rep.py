"""SU(2) and U(1) representation machinery.

Spin labels may be given as ints, floats or Fractions; internally they are
carried as doubled integers (``tj = 2j``) so half-integers never drift.
Spin-j matrices use the basis order m = j, j-1, ..., -j and qubit |0> is
the m = +1/2 state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

MAX_QUBITS = 12


def twice(j) -> int:
    """Return 2j as an int, rejecting values that are not half-integers."""
    t = 2 * j if isinstance(j, Fraction) else 2 * float(j)
    ti = int(round(float(t)))
    if abs(float(t) - ti) > 1e-9:
        raise ValueError(f"{j} is not a half-integer")
    return ti


def _fact(n2: int) -> int:
    # factorial of n2/2 where n2 is even
    if n2 % 2 or n2 < 0:
        raise ValueError("factorial argument must be a non-negative integer")
    return math.factorial(n2 // 2)


@lru_cache(maxsize=None)
def _cg2(tj1, tj2, tj, tm1, tm2, tm) -> float:
    if tm1 + tm2 != tm:
        return 0.0
    if tj < abs(tj1 - tj2) or tj > tj1 + tj2 or (tj1 + tj2 + tj) % 2:
        return 0.0
    if abs(tm1) > tj1 or abs(tm2) > tj2 or abs(tm) > tj:
        return 0.0
    if (tj1 + tm1) % 2 or (tj2 + tm2) % 2 or (tj + tm) % 2:
        return 0.0
    pref = Fraction((tj + 1) * _fact(tj + tj1 - tj2) * _fact(tj - tj1 + tj2) * _fact(tj1 + tj2 - tj),
                    _fact(tj1 + tj2 + tj + 2))
    pref *= (_fact(tj + tm) * _fact(tj - tm) * _fact(tj1 - tm1) * _fact(tj1 + tm1)
             * _fact(tj2 - tm2) * _fact(tj2 + tm2))
    total = Fraction(0)
    # Racah sum over k (all arguments below are doubled)
    for k in range(0, tj1 + tj2 + tj + 2, 2):
        args = [tj1 + tj2 - tj - k, tj1 - tm1 - k, tj2 + tm2 - k, tj - tj2 + tm1 + k, tj - tj1 - tm2 + k]
        if min(args) < 0:
            continue
        den = _fact(k)
        for a in args:
            den *= _fact(a)
        total += Fraction((-1) ** (k // 2), den)
    return float(np.sign(total) * math.sqrt(pref * total * total))


def clebsch_gordan(j1, j2, j, m1, m2, m) -> float:
    """Condon-Shortley coefficient <j1 m1; j2 m2 | j m>; zero when forbidden."""
    return _cg2(twice(j1), twice(j2), twice(j), twice(m1), twice(m2), twice(m))


def spin_labels(j) -> np.ndarray:
    tj = twice(j)
    return (tj - 2 * np.arange(tj + 1)) / 2.0


def wigner_d(j, beta) -> np.ndarray:
    """Reduced rotation matrix d^j(beta); broadcasts over an array of angles."""
    tj = twice(j)
    beta = np.asarray(beta, dtype=float)
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    out = np.zeros(beta.shape + (tj + 1, tj + 1))
    for r in range(tj + 1):
        tmp = tj - 2 * r  # 2m'
        for col in range(tj + 1):
            tm = tj - 2 * col  # 2m
            num = math.sqrt(_fact(tj + tmp) * _fact(tj - tmp) * _fact(tj + tm) * _fact(tj - tm))
            val = 0.0
            for s2 in range(0, 2 * tj + 2, 2):
                a1, a2, a3 = tj + tm - s2, tmp - tm + s2, tj - tmp - s2
                if min(a1, a2, a3) < 0:
                    continue
                sign = (-1) ** ((tmp - tm + s2) // 2)
                den = _fact(a1) * _fact(s2) * _fact(a2) * _fact(a3)
                val = val + sign * num / den * c ** ((2 * tj + tm - tmp - 2 * s2) // 2) \
                    * s ** ((tmp - tm + 2 * s2) // 2)
            out[..., r, col] = val
    return out


def wigner_D(j, alpha, beta, gamma) -> np.ndarray:
    """D^j(alpha, beta, gamma) = exp(-i a Jz) exp(-i b Jy) exp(-i g Jz), zyz convention."""
    m = spin_labels(j)
    d = wigner_d(j, beta)
    return np.exp(-1j * m * alpha)[:, None] * d * np.exp(-1j * m * gamma)[None, :]


def spin_operators(j):
    """Return (Jx, Jy, Jz) for spin j in the m-descending basis."""
    m = spin_labels(j)
    jz = np.diag(m).astype(complex)
    jp = np.zeros((m.size, m.size), dtype=complex)
    jval = twice(j) / 2
    for k in range(1, m.size):
        jp[k - 1, k] = math.sqrt(jval * (jval + 1) - m[k] * (m[k] + 1))
    jm = jp.conj().T
    return (jp + jm) / 2, (jp - jm) / 2j, jz


# ----------------------------------------------------------------------------
# Group elements


@dataclass(frozen=True)
class Su2Element:
    """Unit quaternion (w, x, y, z) for U = exp(-i omega/2 n.sigma)."""

    quaternion: tuple

    def __post_init__(self):
        q = np.asarray(self.quaternion, dtype=float)
        if abs(np.linalg.norm(q) - 1) > 1e-12:
            raise ValueError("quaternion must have unit norm")
        object.__setattr__(self, "quaternion", tuple(q))

    @classmethod
    def from_euler(cls, alpha, beta, gamma):
        u = wigner_D(0.5, alpha, beta, gamma)
        return cls(tuple(quaternion_from_matrix(u)))

    def matrix(self) -> np.ndarray:
        return su2_matrices(np.asarray(self.quaternion)[None, :])[0]

    def euler(self):
        return euler_from_matrix(self.matrix())

    def class_angle(self) -> float:
        return float(2 * np.arccos(np.clip(self.quaternion[0], -1, 1)))

    def spin_matrix(self, j) -> np.ndarray:
        return wigner_D(j, *self.euler())

    def direction(self) -> np.ndarray:
        return rotated_z(np.asarray(self.quaternion)[None, :])[0]


def su2_matrices(q: np.ndarray) -> np.ndarray:
    """Batch of 2x2 SU(2) matrices from quaternions of shape (n, 4)."""
    q = np.atleast_2d(q)
    w, x, y, z = q.T
    u = np.empty((q.shape[0], 2, 2), dtype=complex)
    u[:, 0, 0] = w - 1j * z
    u[:, 0, 1] = -y - 1j * x
    u[:, 1, 0] = y - 1j * x
    u[:, 1, 1] = w + 1j * z
    return u


def quaternion_from_matrix(u: np.ndarray) -> np.ndarray:
    return np.array([u[0, 0].real, -u[1, 0].imag, u[1, 0].real, -u[0, 0].imag])


def euler_from_matrix(u: np.ndarray):
    a, b = u[0, 0], u[1, 0]
    beta = 2 * math.atan2(abs(b), abs(a))
    s = -2 * np.angle(a) if abs(a) > 1e-14 else 0.0  # alpha + gamma
    d = 2 * np.angle(b) if abs(b) > 1e-14 else 0.0   # alpha - gamma
    return (s + d) / 2, beta, (s - d) / 2


def rotated_z(q: np.ndarray) -> np.ndarray:
    """Image of the z axis under the SO(3) rotation of each quaternion."""
    q = np.atleast_2d(q)
    w, x, y, z = q.T
    return np.stack([2 * (x * z + w * y), 2 * (y * z - w * x), 1 - 2 * (x * x + y * y)], axis=-1)


def class_angles(q: np.ndarray) -> np.ndarray:
    return 2 * np.arccos(np.clip(np.atleast_2d(q)[:, 0], -1.0, 1.0))


def quaternion_multiply(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    p, q = np.atleast_2d(p), np.atleast_2d(q)
    w1, x1, y1, z1 = p.T
    w2, x2, y2, z2 = q.T
    return np.stack([w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
                     w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
                     w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
                     w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2], axis=-1)


def quaternion_inverse(q: np.ndarray) -> np.ndarray:
    return np.atleast_2d(q) * np.array([1, -1, -1, -1])


def haar_quaternions(rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.normal(size=(n, 4))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def haar_sample_su2(rng_seed: int | np.random.Generator = 0) -> Su2Element:
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    return Su2Element(tuple(haar_quaternions(rng, 1)[0]))


# ----------------------------------------------------------------------------
# Characters, Legendre polynomials, class quadrature


def su2_character(j, omega):
    """chi_j(omega) = sin((2j+1) omega/2) / sin(omega/2), evaluated as a sum of cosines."""
    omega = np.asarray(omega, dtype=float)
    return np.sum([np.cos(m * omega) for m in spin_labels(j)], axis=0)


def weyl_density(omega):
    return np.sin(np.asarray(omega) / 2) ** 2 / np.pi


def class_quadrature(n_nodes: int = 256):
    """Nodes and weights for integrating class functions over SU(2).

    Gauss-Legendre on [0, 2pi) with the Weyl density folded into the weights.
    """
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    omega = np.pi * (x + 1)
    return omega, w * np.pi * weyl_density(omega)


def legendre(l: int, x):
    """P_l(x) by the three-term recurrence."""
    x = np.asarray(x, dtype=float)
    p0, p1 = np.ones_like(x), x.copy()
    if l == 0:
        return p0
    for k in range(1, l):
        p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
    return p1


def legendre_largest_zero(l: int, tol: float = 1e-13) -> float:
    """Largest root of P_l by bisection, bracketed below by the root of P_{l-1}."""
    if l < 1:
        raise ValueError("P_0 has no zeros")
    if l == 1:
        return 0.0
    lo, hi = legendre_largest_zero(l - 1, tol), 1.0
    flo = float(legendre(l, lo))
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = float(legendre(l, mid))
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class PayoffFunction:
    """Class function on SU(2) given by character coefficients {j: a_j} or a callable of omega."""

    coefficients: dict | None = None
    func: Callable | None = None

    def __call__(self, omega):
        if self.func is not None:
            return np.asarray(self.func(np.asarray(omega, dtype=float)), dtype=float)
        return np.sum([a * su2_character(j, omega) for j, a in self.coefficients.items()], axis=0)

    def normalized(self) -> "PayoffFunction":
        """Rescale so the payoff at the identity equals 1."""
        f0 = float(self(0.0))
        if self.func is not None:
            return PayoffFunction(func=lambda w, f=self.func: np.asarray(f(w)) / f0)
        return PayoffFunction({j: a / f0 for j, a in self.coefficients.items()})

    def character_expansion(self, j_max: int, n_nodes: int = 256) -> dict:
        """Coefficients a_j = integral of f chi_j over the class measure."""
        om, w = class_quadrature(n_nodes)
        vals = self(om)
        return {Fraction(tj, 2): float(np.sum(w * vals * su2_character(Fraction(tj, 2), om)))
                for tj in range(0, 2 * j_max + 1)}


FIDELITY_PAYOFF = PayoffFunction({0: 0.25, 1: 0.25})


# ----------------------------------------------------------------------------
# Irrep decompositions


@dataclass(frozen=True)
class Block:
    label: float          # j for SU(2), charge n for U(1)
    gauge_dim: int
    multiplicity: int
    start: int

    @property
    def size(self):
        return self.gauge_dim * self.multiplicity

    @property
    def stop(self):
        return self.start + self.size

    def index(self, lam: int, k: int) -> int:
        """Coupled-basis row for multiplicity label lam and gauge index k."""
        return self.start + lam * self.gauge_dim + k


@dataclass(frozen=True)
class IrrepDecomposition:
    """Charge-sector decomposition H = sum_q M_q (x) N_q.

    ``isometry`` maps computational amplitudes to coupled amplitudes; coupled
    rows are ordered (q, lambda, k) with k the gauge index.
    """

    group: str
    n_qubits: int
    blocks: tuple
    isometry: np.ndarray

    @property
    def dim(self):
        return self.isometry.shape[0]

    def block(self, label) -> Block:
        for b in self.blocks:
            if abs(b.label - float(label)) < 1e-9:
                return b
        raise KeyError(f"no sector with label {label}")

    def to_coupled(self, op: np.ndarray) -> np.ndarray:
        w = self.isometry
        if op.ndim == 1:
            return w @ op
        return w @ op @ w.conj().T

    def from_coupled(self, op: np.ndarray) -> np.ndarray:
        w = self.isometry
        if op.ndim == 1:
            return w.conj().T @ op
        return w.conj().T @ op @ w

    def sector_vector(self, label, lam: int, k: int) -> np.ndarray:
        b = self.block(label)
        e = np.zeros(self.dim, dtype=complex)
        e[b.index(lam, k)] = 1
        return self.from_coupled(e)

    def to_dict(self) -> dict:
        return {"group": self.group, "n_qubits": self.n_qubits,
                "blocks": [{"label": b.label, "gauge_dim": b.gauge_dim, "multiplicity": b.multiplicity,
                            "rows": [b.start, b.stop]} for b in self.blocks],
                "isometry": {"re": self.isometry.real.tolist(), "im": self.isometry.imag.tolist()}}


def multiplicity(N: int, j) -> int:
    tj = twice(j)
    if tj < 0 or tj > N or (N - tj) % 2:
        raise ValueError(f"spin {j} does not occur for {N} qubits")
    a, b = (N - tj) // 2, (N + tj) // 2  # N/2 - j, N/2 + j
    val = Fraction(math.comb(N, a) * (tj + 1), b + 1)
    if val.denominator != 1:
        raise ArithmeticError("multiplicity formula produced a non-integer")
    return int(val)


def classical_message_count(N: int) -> int:
    return math.comb(N, N // 2)


def _coupled_states(N: int):
    """Map (path, 2m) -> vector, path = tuple of doubled intermediate spins."""
    up, down = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    states = {((1,), 1): up, ((1,), -1): down}
    for _ in range(1, N):
        new = {}
        paths = sorted({p for p, _ in states})
        for p in paths:
            tjp = p[-1]
            for tj in (tjp - 1, tjp + 1):
                if tj < 0:
                    continue
                for tm in range(-tj, tj + 1, 2):
                    vec = 0
                    for tms, qv in ((1, up), (-1, down)):
                        tmp = tm - tms
                        if abs(tmp) > tjp:
                            continue
                        c = _cg2(tjp, 1, tj, tmp, tms, tm)
                        if c != 0.0:
                            vec = vec + c * np.kron(states[(p, tmp)], qv)
                    new[(p + (tj,), tm)] = vec
        states = new
    return states


@lru_cache(maxsize=None)
def couple_qubits(N: int) -> IrrepDecomposition:
    """Collective SU(2) decomposition of N qubits by sequential CG coupling.

    Sectors are listed with j descending; within a sector the multiplicity
    label enumerates coupling paths in lexicographic order.
    """
    if N < 1:
        raise ValueError("need at least one qubit")
    if N > MAX_QUBITS:
        raise ValueError(f"N = {N} exceeds the dimension cap of {MAX_QUBITS} qubits")
    states = _coupled_states(N)
    rows, blocks, start = [], [], 0
    for tj in range(N, -1, -2):
        paths = sorted({p for p, _ in states if p[-1] == tj})
        for p in paths:
            for tm in range(tj, -tj - 1, -2):
                rows.append(states[(p, tm)])
        blocks.append(Block(tj / 2, tj + 1, len(paths), start))
        start += (tj + 1) * len(paths)
    w = np.array(rows, dtype=complex)
    return IrrepDecomposition("su2", N, tuple(blocks), w)


def u1_decomposition(spectrum) -> IrrepDecomposition:
    """Number-sector decomposition for a diagonal integer charge spectrum."""
    spec = np.asarray(spectrum)
    if not np.allclose(spec, np.round(spec)):
        raise ValueError("U(1) charges must be integers")
    spec = np.round(spec).astype(int)
    order, blocks, start = [], [], 0
    for n in np.unique(spec):
        idx = np.flatnonzero(spec == n)
        order.extend(idx)
        blocks.append(Block(float(n), 1, idx.size, start))
        start += idx.size
    w = np.eye(spec.size, dtype=complex)[order]
    return IrrepDecomposition("u1", 0, tuple(blocks), w)


def collective_spin_operators(N: int):
    """Total (Jx, Jy, Jz) on N qubits."""
    s = spin_operators(0.5)
    ops = []
    for a in s:
        tot = np.zeros((2 ** N, 2 ** N), dtype=complex)
        for k in range(N):
            tot += np.kron(np.kron(np.eye(2 ** k), a), np.eye(2 ** (N - k - 1)))
        ops.append(tot)
    return tuple(ops)


# ----------------------------------------------------------------------------
# Representations used by twirls and estimation


class U1Rep:
    """Phase representation U(theta) = exp(-i theta N) for a diagonal charge spectrum."""

    kind = "lie"

    def __init__(self, spectrum):
        self.spectrum = np.asarray(spectrum, dtype=float)
        if not np.allclose(self.spectrum, np.round(self.spectrum)):
            raise ValueError("U(1) charges must be integers")
        self.dim = self.spectrum.size

    def sample(self, rng, n):
        return rng.uniform(0, 2 * np.pi, size=n)

    def unitary(self, theta) -> np.ndarray:
        return np.diag(np.exp(-1j * theta * self.spectrum))

    def act(self, thetas, vec) -> np.ndarray:
        return np.exp(-1j * np.outer(thetas, self.spectrum)) * vec[None, :]

    def generators(self):
        return [np.diag(self.spectrum).astype(complex)]

    def decomposition(self) -> IrrepDecomposition:
        return u1_decomposition(self.spectrum)


class CollectiveSU2Rep:
    """R(g)^{(x)N} on N qubits, group elements stored as quaternions."""

    kind = "lie"

    def __init__(self, n_qubits: int):
        self.n_qubits = n_qubits
        self.dim = 2 ** n_qubits

    def sample(self, rng, n):
        return haar_quaternions(rng, n)

    def unitary(self, q) -> np.ndarray:
        u = su2_matrices(np.asarray(q))[0]
        out = np.ones((1, 1), dtype=complex)
        for _ in range(self.n_qubits):
            out = np.kron(out, u)
        return out

    def act(self, qs, vec) -> np.ndarray:
        u = su2_matrices(qs)
        n = u.shape[0]
        t = np.broadcast_to(vec.reshape((1,) + (2,) * self.n_qubits), (n,) + (2,) * self.n_qubits)
        for k in range(self.n_qubits):
            t = np.moveaxis(np.einsum("nab,n...b->n...a", u, np.moveaxis(t, k + 1, -1)), -1, k + 1)
        return t.reshape(n, self.dim)

    def generators(self):
        return list(collective_spin_operators(self.n_qubits))

    def decomposition(self) -> IrrepDecomposition:
        return couple_qubits(self.n_qubits)


class CyclicRep:
    """Z_d acting by U(k) = diag(exp(2 pi i k n / d)) on integer charges n."""

    kind = "unitary"

    def __init__(self, d: int, charges):
        if d < 1 or d > 64:
            raise ValueError("cyclic group order must lie in 1..64")
        self.order = d
        self.charges = np.asarray(charges, dtype=int)
        self.dim = self.charges.size

    def elements(self):
        return range(self.order)

    def sample(self, rng, n):
        return rng.integers(0, self.order, size=n)

    def unitary(self, k) -> np.ndarray:
        return np.diag(np.exp(2j * np.pi * k * self.charges / self.order))

    def act(self, ks, vec) -> np.ndarray:
        return np.exp(2j * np.pi * np.outer(ks, self.charges) / self.order) * vec[None, :]

    def regular(self, k) -> np.ndarray:
        """Left-regular representation |h> -> |h + k>."""
        return np.roll(np.eye(self.order), k, axis=0)

    def generators(self):
        return [self.unitary(1)]
