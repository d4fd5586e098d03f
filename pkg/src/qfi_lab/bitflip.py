"""Two-qubit local bit-flip estimation: commuting sub-case formulas, the
optimal probe family and its entanglement.

The sub-cases are labelled by how the flipped images
``psi_1 = X(x)I psi``, ``psi_2 = I(x)X psi`` and ``psi_3 = X(x)X psi``
relate to the probe ``psi_0``.
"""

import math

import numpy as np

from .channels import assemble, bit_flip
from .errors import DomainError, EndpointError
from .linalg import binary_entropy
from .qfi import qfi, _spectral
from . import states

CASE_LABELS = ("I-a", "I-b", "II-a", "II-b", "II-c", "II-d")

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)


def _formula(label, p):
    pq = p * (1 - p)
    if label == "I-a":
        return 0.0
    if label == "I-b":
        return 4 * (1 - 2 * p) ** 2 / (p * p + (1 - p) ** 2) + 2 * (1 - 2 * p) ** 2 / pq
    if label == "II-a":
        return 1 / pq
    if label == "II-b":
        return (1 + p) / pq
    if label == "II-c":
        return 2 / pq
    if label == "II-d":
        return (2 - p) / pq
    raise KeyError(f"unknown bit-flip case {label!r}")


def case_qfi(label, p):
    """QFI of sub-case ``label`` at ``p``.

    Raises:
        EndpointError: ``p`` is 0 or 1 and the formula diverges there.
    """
    if label not in CASE_LABELS:
        raise KeyError(f"unknown bit-flip case {label!r}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"bit-flip strength p={p!r} outside [0, 1]")
    if label == "I-a":
        return 0.0
    if p in (0.0, 1.0):
        raise EndpointError(f"case {label} QFI diverges at p={p!r}")
    return float(_formula(label, p))


def max_case_qfi(p):
    values = {lab: case_qfi(lab, p) for lab in CASE_LABELS}
    best = max(values, key=values.get)
    return best, values[best]


def pm_basis_state(amplitudes):
    """Two-qubit state from amplitudes on ``|++>, |+->, |-+>, |-->``."""
    return states.PureState.normalized((2, 2), np.kron(_H, _H) @ np.asarray(amplitudes, dtype=np.complex128))


def optimal_probe_state(theta):
    """``(|++> + |+-> + |-+> + e^{i theta} |-->) / 2``."""
    return pm_basis_state([1, 1, 1, np.exp(1j * theta)])


def probe_entanglement(theta):
    """Entanglement (ebits) of the optimal probe, ``H(cos^2(theta/4))``."""
    return binary_entropy(math.cos(theta / 4) ** 2)


def flip_images(state):
    """``(psi_0, psi_1, psi_2, psi_3)`` as amplitude vectors."""
    v = state.amplitudes
    eye = np.eye(2)
    return (v, np.kron(_X, eye) @ v, np.kron(eye, _X) @ v, np.kron(_X, _X) @ v)


def max_image_overlap(state):
    imgs = flip_images(state)
    return max(abs(np.vdot(imgs[i], imgs[j])) for i in range(4) for j in range(i + 1, 4))


# Pure-probe witnesses. II-b and II-d cannot be realised by a pure probe
# (rho_1 = rho_0 forces rho_2 = rho_3, and rho_1 = rho_3 forces rho_2 = rho_0),
# so they are witnessed by the encoded-state structure
# (1-p)^2 rho_0 + 2p(1-p) rho_12 + p^2 rho_3 with the listed diagonals.
_PROBE_WITNESSES = {
    "I-a": [1, 0, 0, 0],
    "I-b": [1, 0, 0, 1],
    "II-a": [1, 1, 0, 0],
    "II-c": [1, 1, 1, 1],
}
_STRUCTURE_WITNESSES = {
    "II-b": (np.diag([1.0, 0, 0, 0]), np.diag([0.5, 0, 0.5, 0]), np.diag([0, 1.0, 0, 0])),
    "II-d": (np.diag([1.0, 0, 0, 0]), np.diag([0, 0.5, 0.5, 0]), np.diag([0, 1.0, 0, 0])),
}


def case_witness(label):
    """Return ``("probe", PureState)`` or ``("structure", (rho_0, rho_12, rho_3))``."""
    if label in _PROBE_WITNESSES:
        return "probe", pm_basis_state(_PROBE_WITNESSES[label])
    if label in _STRUCTURE_WITNESSES:
        return "structure", _STRUCTURE_WITNESSES[label]
    raise KeyError(f"unknown bit-flip case {label!r}")


def witness_qfi(label, p):
    """Spectral QFI of the witness for ``label``, independent of the formulas."""
    kind, w = case_witness(label)
    if kind == "probe":
        return qfi(assemble(bit_flip(), 2), w, p).value
    r0, r12, r3 = (np.asarray(x, dtype=np.complex128) for x in w)
    rho = (1 - p) ** 2 * r0 + 2 * p * (1 - p) * r12 + p * p * r3
    drho = -2 * (1 - p) * r0 + 2 * (1 - 2 * p) * r12 + 2 * p * r3
    return _spectral(rho, drho).value


def theta_sweep(p, n_theta=64):
    """Rows ``(theta, entanglement_ebits, qfi_at_p)`` over ``[0, 2 pi)``."""
    asm = assemble(bit_flip(), 2)
    rows = []
    for theta in np.arange(n_theta) * (2 * math.pi / n_theta):
        st = optimal_probe_state(theta)
        rows.append((float(theta), probe_entanglement(theta), qfi(asm, st, p).value))
    return rows
