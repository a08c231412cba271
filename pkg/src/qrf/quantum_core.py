"""Exact finite-dimensional quantum objects: states, channels, POVMs.

Subsystems are tracked by an explicit ``dims`` list and composite indices
are row-major (first subsystem is the most significant digit).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

NORM_TOL = 1e-12
HERM_TOL = 1e-12
PSD_TOL = 1e-10
CHANNEL_TOL = 1e-10


def _check_dims(dims, size):
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != size:
        raise ValueError(f"dims {dims} do not multiply to {size}")
    return dims


@dataclass(frozen=True)
class StateVector:
    """Normalized pure state over a tensor product of subsystems."""

    amplitudes: np.ndarray
    dims: list = field(default_factory=list)

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex).ravel()
        dims = self.dims if self.dims else [amp.size]
        object.__setattr__(self, "amplitudes", amp)
        object.__setattr__(self, "dims", _check_dims(dims, amp.size))
        norm = np.vdot(amp, amp).real
        if abs(norm - 1.0) > NORM_TOL * max(1, amp.size):
            raise ValueError(f"state not normalized (norm^2 = {norm})")

    @classmethod
    def from_unnormalized(cls, amplitudes, dims=None):
        amp = np.asarray(amplitudes, dtype=complex).ravel()
        n = np.linalg.norm(amp)
        if n == 0:
            raise ValueError("zero vector cannot be normalized")
        return cls(amp / n, dims or [amp.size])

    @classmethod
    def basis(cls, index, dims):
        dims = list(dims)
        amp = np.zeros(int(np.prod(dims)), dtype=complex)
        if isinstance(index, (tuple, list)):
            index = int(np.ravel_multi_index(tuple(index), dims))
        amp[index] = 1.0
        return cls(amp, dims)

    @property
    def dim(self):
        return self.amplitudes.size

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


@dataclass(frozen=True)
class DensityOperator:
    """Trace-one positive semidefinite operator.

    Eigenvalues down to -1e-10 are accepted as roundoff; use ``clipped`` to
    project them back to zero.
    """

    matrix: np.ndarray
    dims: list = field(default_factory=list)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("density operator must be a square matrix")
        dims = self.dims if self.dims else [m.shape[0]]
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", _check_dims(dims, m.shape[0]))
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERM_TOL * max(1, m.shape[0]):
            raise ValueError("density operator is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > NORM_TOL * max(1, m.shape[0]):
            raise ValueError(f"density operator trace is {tr}, not 1")
        if np.linalg.eigvalsh(m).min() < -PSD_TOL:
            raise ValueError("density operator has a negative eigenvalue")

    @classmethod
    def maximally_mixed(cls, dims):
        d = int(np.prod(dims))
        return cls(np.eye(d) / d, list(dims))

    @property
    def dim(self):
        return self.matrix.shape[0]

    def clipped(self) -> "DensityOperator":
        w, v = np.linalg.eigh(self.matrix)
        w = np.clip(w, 0.0, None)
        m = (v * w) @ v.conj().T
        return DensityOperator(m / np.trace(m).real, self.dims)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class QuantumChannel:
    """CPTP map stored as Kraus operators with equal input and output dimension."""

    kraus: tuple
    label: str = ""

    def __post_init__(self):
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ks:
            raise ValueError("channel needs at least one Kraus operator")
        d = ks[0].shape[0]
        for k in ks:
            if k.shape != (d, d):
                raise ValueError("Kraus operators must be square and equally sized")
        completeness = sum(k.conj().T @ k for k in ks)
        if np.max(np.abs(completeness - np.eye(d))) > CHANNEL_TOL:
            raise ValueError("Kraus operators are not trace preserving")
        object.__setattr__(self, "kraus", ks)

    @property
    def dim(self):
        return self.kraus[0].shape[0]

    @classmethod
    def identity(cls, d):
        return cls((np.eye(d),), "identity")

    @classmethod
    def unitary(cls, u, label="unitary"):
        return cls((np.asarray(u),), label)

    @classmethod
    def depolarizing(cls, d):
        """Completely depolarizing channel built from the d^2 Weyl operators."""
        shift = np.roll(np.eye(d), 1, axis=0)
        clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
        ks = []
        for a in range(d):
            for b in range(d):
                ks.append(np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b) / d)
        return cls(tuple(ks), "depolarizing")

    def superoperator(self) -> np.ndarray:
        """Matrix S with vec(E(rho)) = S vec(rho) for row-major vec."""
        return sum(np.kron(k, k.conj()) for k in self.kraus)


@dataclass(frozen=True)
class Povm:
    effects: tuple
    labels: tuple

    def __post_init__(self):
        es = tuple(np.asarray(e, dtype=complex) for e in self.effects)
        labels = tuple(self.labels)
        if len(es) != len(labels):
            raise ValueError("one label per effect is required")
        for e in es:
            if np.max(np.abs(e - e.conj().T)) > PSD_TOL or np.linalg.eigvalsh(e).min() < -PSD_TOL:
                raise ValueError("POVM effect is not positive semidefinite")
        object.__setattr__(self, "effects", es)
        object.__setattr__(self, "labels", labels)

    @property
    def total(self):
        return sum(self.effects)

    def probabilities(self, rho: DensityOperator) -> np.ndarray:
        if self.effects[0].shape != rho.matrix.shape:
            raise ValueError("POVM and state dimensions differ")
        return np.array([np.trace(e @ rho.matrix).real for e in self.effects])


def tensor(a, b):
    """Kronecker product of two states of the same kind."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims)
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(np.kron(a.matrix, b.matrix), a.dims + b.dims)
    raise TypeError("tensor needs two StateVectors or two DensityOperators")


def tensor_all(items: Sequence):
    out = items[0]
    for it in items[1:]:
        out = tensor(out, it)
    return out


def partial_trace(rho: DensityOperator, keep) -> DensityOperator:
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("keep set must be non-empty")
    n = len(rho.dims)
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"subsystem indices {keep} out of range for {n} subsystems")
    return DensityOperator(reduce_matrix(rho.matrix, rho.dims, keep), [rho.dims[k] for k in keep])


def reduce_matrix(m: np.ndarray, dims, keep) -> np.ndarray:
    """Partial trace on a bare matrix (no state validation)."""
    n = len(dims)
    t = m.reshape(list(dims) * 2)
    drop = [i for i in range(n) if i not in keep]
    # trace out from the highest index down so axis numbers stay valid
    for count, i in enumerate(sorted(drop, reverse=True)):
        cur = n - count
        t = np.trace(t, axis1=i, axis2=i + cur)
    dk = int(np.prod([dims[k] for k in keep]))
    return t.reshape(dk, dk)


def permute_subsystems(obj, order):
    """Reorder subsystems; ``order[i]`` is the old index placed at position i."""
    order = list(order)
    if isinstance(obj, StateVector):
        t = obj.amplitudes.reshape(obj.dims).transpose(order)
        return StateVector(t.ravel(), [obj.dims[i] for i in order])
    n = len(obj.dims)
    t = obj.matrix.reshape(obj.dims * 2).transpose(order + [i + n for i in order])
    d = obj.dim
    return DensityOperator(t.reshape(d, d), [obj.dims[i] for i in order])


def apply_channel(ch: QuantumChannel, rho: DensityOperator) -> DensityOperator:
    if ch.dim != rho.dim:
        raise ValueError(f"channel acts on dimension {ch.dim}, state has {rho.dim}")
    out = sum(k @ rho.matrix @ k.conj().T for k in ch.kraus)
    out = 0.5 * (out + out.conj().T)
    return DensityOperator(out, rho.dims)


def compose(second: QuantumChannel, first: QuantumChannel) -> QuantumChannel:
    """Channel that applies ``first`` then ``second``."""
    return QuantumChannel(tuple(b @ a for b in second.kraus for a in first.kraus),
                          f"{second.label}*{first.label}")


def sample_measurements(p: Povm, rho: DensityOperator, trials: int, rng_seed: int = 0) -> list:
    probs = p.probabilities(rho)
    if abs(probs.sum() - 1.0) > 1e-8:
        raise ValueError(f"outcome probabilities sum to {probs.sum()}")
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    rng = np.random.default_rng(rng_seed)
    idx = rng.choice(len(probs), size=trials, p=probs)
    return [p.labels[i] for i in idx]


def sample_measurement(p: Povm, rho: DensityOperator, rng_seed: int = 0):
    return sample_measurements(p, rho, 1, rng_seed)[0]


def _psd_sqrt(m):
    w, v = np.linalg.eigh(m)
    w = np.where(w > 1e-13, w, 0.0)  # rounding noise below this would survive the square root
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Uhlmann fidelity, squared convention: (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2."""
    if rho.dim != sigma.dim:
        raise ValueError("fidelity needs states of equal dimension")
    f = np.sum(np.linalg.svd(_psd_sqrt(rho.matrix) @ _psd_sqrt(sigma.matrix), compute_uv=False)) ** 2
    return float(min(max(f, 0.0), 1.0))


def von_neumann_entropy(rho: DensityOperator | np.ndarray) -> float:
    m = rho.matrix if isinstance(rho, DensityOperator) else rho
    w = np.linalg.eigvalsh(m)
    w = w[w > 1e-14]
    return float(-np.sum(w * np.log2(w)))


def entanglement_entropy(psi: StateVector, cut) -> float:
    """Base-2 entropy of the reduced state on the subsystems listed in ``cut``."""
    rho = reduce_matrix(np.outer(psi.amplitudes, psi.amplitudes.conj()), psi.dims, sorted(cut))
    return max(von_neumann_entropy(rho), 0.0)


def random_state(dims, rng, pure=False):
    d = int(np.prod(dims))
    if pure:
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        return StateVector(v / np.linalg.norm(v), list(dims))
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m).real, list(dims))


def random_unitary(d, rng):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(d, n_kraus, rng):
    # Stinespring: slice an isometry into Kraus blocks
    u = random_unitary(d * n_kraus, rng)[:, :d]
    return QuantumChannel(tuple(u[i * d:(i + 1) * d] for i in range(n_kraus)), "random")


def to_json(obj) -> str:
    """Serialize to {dims, re, im}; matrices are flattened row-major."""
    arr = obj.amplitudes if isinstance(obj, StateVector) else obj.matrix
    return json.dumps({"dims": list(obj.dims), "kind": "vector" if arr.ndim == 1 else "matrix",
                       "re": arr.real.ravel().tolist(), "im": arr.imag.ravel().tolist()})


def from_json(text: str):
    data = json.loads(text)
    dims = [int(d) for d in data["dims"]]
    arr = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
    d = int(np.prod(dims))
    if arr.size == d:
        return StateVector(arr, dims)
    if arr.size == d * d:
        return DensityOperator(arr.reshape(d, d), dims)
    raise ValueError("JSON payload size matches neither a vector nor a matrix over dims")
