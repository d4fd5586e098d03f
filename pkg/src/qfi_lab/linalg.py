"""Dense complex linear algebra: Hermitian eigensolver, tensor products,
partial traces, commutators, fidelity and entropy.

Operators are plain ``numpy`` arrays of dtype ``complex128``. The
eigensolver is a cyclic Jacobi iteration run by the compiled kernel when
available (see :mod:`qfi_lab._backend`).
"""

from functools import reduce
from typing import NamedTuple, Sequence

import numpy as np

from . import _backend
from .errors import ContractViolation, ConvergenceError

HERMITIAN_RTOL = 1e-12
PSD_TOL = 1e-10
MAX_SWEEPS = 100
# eigenvalues of sqrt(rho) sigma sqrt(rho) below this are treated as exact zeros
_FIDELITY_FLOOR = 1e-14


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def as_square(a, name="operator"):
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ContractViolation(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    return a


def hermiticity_defect(a):
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def check_hermitian(a, name="operator"):
    """Return ``a`` as a complex square array, raising if it is not Hermitian."""
    a = as_square(a, name)
    scale = max(1.0, float(np.max(np.abs(a))))
    if hermiticity_defect(a) > HERMITIAN_RTOL * scale:
        raise ContractViolation(
            f"{name} is not Hermitian (defect {hermiticity_defect(a):.3e})"
        )
    return a


def eig_hermitian(a, max_sweeps=MAX_SWEEPS):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Args:
        a: Hermitian matrix.
        max_sweeps: Cap on full sweeps over the off-diagonal pairs.

    Returns:
        EigenDecomposition with ascending eigenvalues and the eigenvectors
        as columns.

    Raises:
        ContractViolation: ``a`` is not Hermitian within tolerance.
        ConvergenceError: off-diagonal mass did not vanish within the cap.
    """
    a = check_hermitian(a)
    # symmetrise so the kernel sees an exactly Hermitian input
    a = 0.5 * (a + a.conj().T)
    w, v, sweeps = _backend.kernels.jacobi_eigh(a, 1e-15, int(max_sweeps))
    if sweeps < 0:
        raise ConvergenceError(f"Jacobi iteration did not converge within {max_sweeps} sweeps")
    return EigenDecomposition(np.asarray(w), np.asarray(v))


def eigvalsh(a):
    return eig_hermitian(a).eigenvalues


def kron(a, b):
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def kron_all(ops):
    return reduce(kron, ops)


def _check_dims(dim, local_dims):
    local_dims = [int(x) for x in local_dims]
    if any(x < 1 for x in local_dims) or int(np.prod(local_dims)) != dim:
        raise ContractViolation(
            f"local dimensions {local_dims} do not multiply to operator dimension {dim}"
        )
    return local_dims


def partial_trace(rho, local_dims: Sequence[int], keep):
    """Reduce ``rho`` to the subsystems listed in ``keep`` (in ascending order)."""
    rho = as_square(rho, "rho")
    dims = _check_dims(rho.shape[0], local_dims)
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if not keep or keep[0] < 0 or keep[-1] >= n:
        raise ContractViolation(f"keep must be a non-empty subset of range({n}), got {keep}")
    t = rho.reshape(dims + dims)
    # trace out from the highest index so earlier axis numbers stay valid
    nrem = n
    for k in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=k, axis2=k + nrem)
        nrem -= 1
    kd = int(np.prod([dims[k] for k in keep]))
    return t.reshape(kd, kd)


def commutator(a, b):
    a = as_square(a, "a")
    b = as_square(b, "b")
    if a.shape != b.shape:
        raise ContractViolation(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b - b @ a


def commutator_norm(a, b):
    """Frobenius norm of ``[a, b]``."""
    return float(np.linalg.norm(commutator(a, b)))


def _clamped_spectrum(rho, name):
    w, v = eig_hermitian(rho)
    if w[0] < -PSD_TOL:
        raise ContractViolation(f"{name} has eigenvalue {w[0]:.3e} below -{PSD_TOL:g}")
    return np.clip(w, 0.0, None), v


def check_density(rho, name="rho", trace_tol=1e-10):
    rho = check_hermitian(rho, name)
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > trace_tol:
        raise ContractViolation(f"{name} has trace {tr!r}, expected 1")
    _clamped_spectrum(rho, name)
    return rho


def sqrtm_psd(rho, name="rho"):
    w, v = _clamped_spectrum(rho, name)
    return (v * np.sqrt(w)) @ v.conj().T


def fidelity(rho, sigma):
    """Root fidelity ``Tr sqrt(sqrt(rho) sigma sqrt(rho))``, in [0, 1].

    With this convention ``1 - F(rho_p, rho_{p+dp}) ~ F_Q dp**2 / 8``.
    """
    rho = check_density(rho, "rho")
    sigma = check_density(sigma, "sigma")
    r = sqrtm_psd(rho, "rho")
    inner = r @ sigma @ r
    w, _ = _clamped_spectrum(0.5 * (inner + inner.conj().T), "sqrt(rho) sigma sqrt(rho)")
    w = np.where(w > _FIDELITY_FLOOR, w, 0.0)
    return float(min(1.0, np.sum(np.sqrt(w))))


def von_neumann_entropy(rho):
    """Entropy in bits; ``0 log 0`` is taken as 0."""
    rho = check_density(rho)
    w, _ = _clamped_spectrum(rho, "rho")
    w = w[w > 0.0]
    s = float(-np.sum(w * np.log2(w)))
    return min(max(0.0, s), float(np.log2(rho.shape[0])))


def binary_entropy(x):
    x = float(x)
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))
