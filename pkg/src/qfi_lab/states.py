"""Pure probe states and the standard probe families."""

from dataclasses import dataclass
import math

import numpy as np

from .errors import ContractViolation
from .linalg import partial_trace, von_neumann_entropy

NORM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PureState:
    local_dims: tuple
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(x) for x in self.local_dims)
        amps = np.asarray(self.amplitudes, dtype=np.complex128).ravel()
        if not dims or any(x < 1 for x in dims):
            raise ContractViolation(f"invalid local dimensions {dims}")
        if amps.size != math.prod(dims):
            raise ContractViolation(f"{amps.size} amplitudes for local dimensions {dims}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ContractViolation(f"state norm^2 is {norm2!r}, expected 1")
        object.__setattr__(self, "local_dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, local_dims, amplitudes):
        amps = np.asarray(amplitudes, dtype=np.complex128).ravel()
        norm = np.linalg.norm(amps)
        if norm == 0.0:
            raise ContractViolation("zero vector cannot be normalised")
        return cls(tuple(local_dims), amps / norm)

    @property
    def dim(self):
        return self.amplitudes.size

    def density(self):
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def overlap(self, other):
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other):
        return abs(self.overlap(other)) ** 2

    def reduced(self, keep):
        return partial_trace(self.density(), self.local_dims, keep)

    def entanglement(self, keep=(0,)):
        """Entropy (ebits) of the reduced state on ``keep``."""
        return von_neumann_entropy(self.reduced(keep))

    def apply_local(self, unitaries):
        u = unitaries[0]
        for x in unitaries[1:]:
            u = np.kron(u, x)
        return PureState.normalized(self.local_dims, u @ self.amplitudes)


def basis_state(local_dims, index):
    local_dims = tuple(local_dims)
    if isinstance(index, (list, tuple)):
        index = int(np.ravel_multi_index(tuple(index), local_dims))
    v = np.zeros(math.prod(local_dims), dtype=np.complex128)
    if not 0 <= index < v.size:
        raise ContractViolation(f"basis index {index} out of range")
    v[index] = 1.0
    return PureState(local_dims, v)


def product_zero(n, d):
    return basis_state((d,) * n, 0)


def schmidt_state(coeffs, d=None):
    """``sum_i sqrt(c_i) |ii>`` for Schmidt coefficients ``c_i`` (normalised to sum 1)."""
    c = np.asarray(coeffs, dtype=float)
    if np.any(c < 0) or c.sum() <= 0:
        raise ContractViolation("Schmidt coefficients must be non-negative and not all zero")
    d = len(c) if d is None else int(d)
    if len(c) > d:
        raise ContractViolation(f"{len(c)} Schmidt coefficients for local dimension {d}")
    c = c / c.sum()
    v = np.zeros(d * d, dtype=np.complex128)
    for i, ci in enumerate(c):
        v[i * d + i] = math.sqrt(ci)
    return PureState.normalized((d, d), v)


def schmidt_probe(m, d):
    """Uniform Schmidt-rank-m probe ``(1/sqrt m) sum_{i<m} |ii>``."""
    if not 1 <= m <= d:
        raise ContractViolation(f"Schmidt rank m={m} must satisfy 1 <= m <= d={d}")
    return schmidt_state([1.0] * m, d)


def ghz(n, d=2):
    v = np.zeros(d**n, dtype=np.complex128)
    for i in range(d):
        v[int(np.ravel_multi_index((i,) * n, (d,) * n))] = 1.0
    return PureState.normalized((d,) * n, v)


def w_state(n, d=2):
    """Single excitation ``|1>`` shared symmetrically over ``n`` parties."""
    v = np.zeros(d**n, dtype=np.complex128)
    for k in range(n):
        idx = [0] * n
        idx[k] = 1
        v[int(np.ravel_multi_index(tuple(idx), (d,) * n))] = 1.0
    return PureState.normalized((d,) * n, v)


def bell_pairs(n_pairs, extra=0):
    """``|Phi+>^{(x)n_pairs}`` followed by ``extra`` qubits in ``|0>``."""
    phi = np.array([1, 0, 0, 1], dtype=np.complex128) / math.sqrt(2)
    v = np.array([1.0 + 0j])
    for _ in range(n_pairs):
        v = np.kron(v, phi)
    for _ in range(extra):
        v = np.kron(v, np.array([1, 0], dtype=np.complex128))
    return PureState.normalized((2,) * (2 * n_pairs + extra), v)


def haar_random(local_dims, rng):
    dim = math.prod(local_dims)
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return PureState.normalized(local_dims, v)


def haar_unitary(d, rng):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))
