"""Independent reference implementations used as test oracles."""

import numpy as np
from scipy import linalg as sla


def random_hermitian(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (a + a.conj().T)


def random_density(n, rng, rank=None):
    rank = n if rank is None else rank
    g = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_traceless_hermitian(n, rng):
    h = random_hermitian(n, rng)
    return h - np.trace(h) / n * np.eye(n)


def sld_qfi(rho, drho):
    """QFI via the SLD ``rho L + L rho = 2 drho`` solved as a Sylvester equation."""
    L = sla.solve_sylvester(rho, rho, 2 * drho)
    return float(np.trace(rho @ L @ L).real)


def uhlmann_fidelity(rho, sigma):
    r = sla.sqrtm(rho)
    return float(np.trace(sla.sqrtm(r @ sigma @ r)).real)


def kraus_apply(kraus, rho):
    return sum(k @ rho @ k.conj().T for k in kraus)


def depolarize_all(rho, p, d, n):
    """Depolarizing channel on every party using the explicit Pauli/Weyl operators."""
    # Weyl-Heisenberg operators X^a Z^b give an orthogonal unitary basis for any d
    w = np.exp(2j * np.pi / d)
    X = np.roll(np.eye(d), 1, axis=0)
    Z = np.diag(w ** np.arange(d))
    ops = [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b) for a in range(d) for b in range(d)]
    q = 4 * p / 3
    coeffs = [1 - q + q / d**2] + [q / d**2] * (d * d - 1)
    for k in range(n):
        left, right = np.eye(d**k), np.eye(d ** (n - k - 1))
        rho = sum(c * np.kron(np.kron(left, u), right) @ rho @ np.kron(np.kron(left, u), right).conj().T
                  for c, u in zip(coeffs, ops))
    return rho
