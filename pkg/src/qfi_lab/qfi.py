"""SLD quantum Fisher information and the continuous-commutativity test.

Three independent estimates are provided:

* :func:`qfi_spectral` solves the SLD equation in the eigenbasis of the state;
* :func:`qfi_commuting` applies the classical Fisher formula to eigenvalue
  curves, valid when ``[rho_p, d rho_p/dp] = 0``;
* :func:`qfi_fidelity_fd` differentiates the root fidelity between
  neighbouring encoded states.
"""

from dataclasses import dataclass, field, asdict
import itertools

import numpy as np

from . import _backend
from .errors import ContractViolation, DivergentQFIError, DomainError, EigenvalueCrossingError, EndpointError
from .linalg import check_density, check_hermitian, commutator_norm, eig_hermitian, fidelity

SUPPORT_CUTOFF = 1e-12
# largest |<i|drho|j>| tolerated on pairs outside the support before the QFI is called infinite
DIVERGENCE_TOL = 1e-8
MAX_Q_TERMS = 256


@dataclass(frozen=True)
class QfiReport:
    value: float
    method: str
    commutator_residual: float
    floor_hits: int = 0
    warnings: tuple = ()

    def to_dict(self):
        out = asdict(self)
        out["warnings"] = list(self.warnings)
        return out


@dataclass(frozen=True)
class CommutativityReport:
    rho_residual: float
    worst_p: float
    pairwise_max: float | None
    q_pair_max: float | None
    group_pair_max: float | None
    passes: bool
    tol: float
    notes: tuple = field(default=())

    def to_dict(self):
        out = asdict(self)
        out["notes"] = list(self.notes)
        return out


def qfi_spectral(rho_p, drho_dp, support_cutoff=SUPPORT_CUTOFF):
    """QFI ``sum_{l_i + l_j > cutoff} 2 |<i|drho|j>|^2 / (l_i + l_j)``.

    Raises:
        DivergentQFIError: ``drho_dp`` has weight on eigenvector pairs
            excluded by the cutoff, i.e. outside the support of ``rho_p``.
    """
    rho = check_density(rho_p, "rho_p", trace_tol=1e-8)
    drho = check_hermitian(drho_dp, "drho_dp")
    if rho.shape != drho.shape:
        raise ContractViolation(f"dimension mismatch: {rho.shape} vs {drho.shape}")
    tr = abs(complex(np.trace(drho)))
    if tr > 1e-8:
        raise ContractViolation(f"drho_dp must be traceless, trace is {tr:.3e}")
    return _spectral(rho, drho, support_cutoff)


def _spectral(rho, drho, support_cutoff=SUPPORT_CUTOFF):
    w, v = eig_hermitian(rho)
    dm = np.ascontiguousarray(v.conj().T @ drho @ v)
    value, hits, dropped = _backend.kernels.qfi_pair_sum(np.ascontiguousarray(w), dm, float(support_cutoff))
    scale = max(1.0, float(np.linalg.norm(drho)))
    if dropped > DIVERGENCE_TOL * scale:
        raise DivergentQFIError(
            f"derivative has weight {dropped:.3e} outside the support of the state: QFI is infinite"
        )
    return QfiReport(max(float(value), 0.0), "spectral", commutator_norm(rho, drho), int(hits))


def _curves_ok(vm, v0, vp, h):
    sm = (v0 - vm) / h
    sp = (vp - v0) / h
    return bool(np.all(np.abs(sp - sm) <= 1e-2 * np.maximum(1.0, np.abs(sp + sm) / 2)))


def qfi_commuting(eigenvalues_fn, p, step=1e-5, derivative_fn=None, support_cutoff=SUPPORT_CUTOFF):
    """Classical Fisher information of the eigenvalue curves ``p -> (l_i(p))``.

    Equal to the QFI whenever the state commutes with its derivative. The
    derivative is a central difference unless ``derivative_fn`` is given.
    Curves are used in the order returned; if that ordering shows a kink
    inside the stencil the values are re-matched by sorting.
    """
    v0 = np.asarray(eigenvalues_fn(p), dtype=float)
    if abs(v0.sum() - 1.0) > 1e-8:
        raise ContractViolation(f"eigenvalues sum to {v0.sum()!r}, expected 1")
    warnings = ()
    if derivative_fn is not None:
        dv = np.asarray(derivative_fn(p), dtype=float)
    else:
        h = float(step)
        vm = np.asarray(eigenvalues_fn(p - h), dtype=float)
        vp = np.asarray(eigenvalues_fn(p + h), dtype=float)
        if not _curves_ok(vm, v0, vp, h):
            vm, v0s, vp = np.sort(vm), np.sort(v0), np.sort(vp)
            if not _curves_ok(vm, v0s, vp, h):
                raise EigenvalueCrossingError(f"eigenvalue curves cross inside the stencil at p={p!r}")
            v0 = v0s
            warnings = ("eigenvalues re-ordered by continuity",)
        dv = (vp - vm) / (2 * h)
    keep = v0 > support_cutoff
    value = float(np.sum(dv[keep] ** 2 / v0[keep]))
    return QfiReport(value, "commuting", 0.0, int(np.count_nonzero(~keep)), warnings)


def _rank(rho, tol=1e-12):
    return int(np.count_nonzero(eig_hermitian(rho).eigenvalues > tol))


def qfi_fidelity_fd(assembly, rho0, p, dp=1e-4):
    """QFI from ``8 (1 - F(rho_{p-dp/2}, rho_{p+dp/2})) / dp^2``."""
    lo, hi = assembly.base.param_range
    if p - dp / 2 < lo or p + dp / 2 > hi:
        raise DomainError(f"stencil p +/- {dp / 2:g} leaves [{lo}, {hi}]")
    rho_m = assembly.apply(rho0, p - dp / 2)
    rho_p = assembly.apply(rho0, p + dp / 2, check=False)
    rho_c, drho_c = assembly.encode(rho0, p, check=False)
    f = fidelity(rho_m, rho_p)
    value = max(0.0, 8.0 * (1.0 - f) / dp**2)
    ranks = {_rank(rho_m), _rank(rho_c), _rank(rho_p)}
    warnings = ("rank changes across the stencil",) if len(ranks) > 1 else ()
    return QfiReport(value, "fidelity_fd", commutator_norm(rho_c, drho_c), 0, warnings)


def probe_density(probe):
    return probe.density() if hasattr(probe, "density") else np.asarray(probe, dtype=np.complex128)


def qfi(assembly, probe, p, method="spectral", **kw):
    """QFI of ``probe`` (state or density matrix) under ``assembly`` at ``p``.

    Raises:
        EndpointError: ``p`` is an end of the channel's parameter range, where
            the QFI either diverges or the encoding is degenerate.
    """
    assembly.base.check_p(p)
    if assembly.base.is_endpoint(p):
        raise EndpointError(f"QFI is not reported at the endpoint p={p!r} of the {assembly.base.name} range")
    rho0 = probe_density(probe)
    if method == "spectral":
        rho, drho = assembly.encode(rho0, p)
        return _spectral(rho, drho, kw.get("support_cutoff", SUPPORT_CUTOFF))
    if method == "fidelity_fd":
        return qfi_fidelity_fd(assembly, rho0, p, kw.get("dp", 1e-4))
    if method == "commuting":
        step = kw.get("step", 1e-5)
        rep = qfi_commuting(lambda q: eig_hermitian(assembly.apply(rho0, q, check=False)).eigenvalues, p, step)
        rho, drho = assembly.encode(rho0, p, check=False)
        warn = rep.warnings
        res = commutator_norm(rho, drho)
        if res > 1e-8:
            warn = warn + ("state does not commute with its derivative; commuting formula is a lower bound",)
        return QfiReport(rep.value, "commuting", res, rep.floor_hits, warn)
    raise ValueError(f"unknown QFI method {method!r}")


def _kraus_images(assembly, rho0):
    return [(w, k @ rho0 @ k.conj().T) for w, k in assembly.kraus_products]


def _max_pair_commutator(ops):
    best = 0.0
    for a, b in itertools.combinations(ops, 2):
        best = max(best, float(np.linalg.norm(a @ b - b @ a)))
    return best


def q_operators(assembly, rho0):
    """Operators ``Q_i = sum_{j != i, f_j == f_i} (T_i + T_j)`` with ``T_i = K_i rho0 K_i^dagger``.

    Weight equality is symbolic (identical rational expressions in ``p``).
    A term whose weight is shared by no other term gets ``Q_i = 0``.

    Returns ``(T list, Q list, group sums)``.
    """
    images = _kraus_images(assembly, rho0)
    groups = {}
    for idx, (w, _) in enumerate(images):
        groups.setdefault(w.key, []).append(idx)
    ts = [t for _, t in images]
    qs = []
    for idx, (w, t) in enumerate(images):
        members = groups[w.key]
        q = np.zeros_like(t)
        for j in members:
            if j != idx:
                q += t + ts[j]
        qs.append(q)
    sums = [sum(ts[j] for j in members) for members in groups.values()]
    return ts, qs, sums


def check_continuous_commutativity(assembly, rho0, p_samples, tol=1e-8):
    """Test ``[rho_p, d rho_p/dp] = 0`` at each sample and the pairwise Q criterion.

    The Q-operator test runs only when the channel carries an explicit Kraus
    list suited to it (``base.q_check``) and the n-fold product has at most
    ``MAX_Q_TERMS`` terms; otherwise ``q_pair_max`` is ``None``.
    """
    rho0 = probe_density(rho0)
    check_density(rho0, "rho0")
    worst, worst_p = -1.0, float("nan")
    for p in np.atleast_1d(np.asarray(p_samples, dtype=float)):
        rho, drho = assembly.encode(rho0, float(p), check=False)
        r = commutator_norm(rho, drho)
        if r > worst:
            worst, worst_p = r, float(p)
    notes = []
    pairwise = q_max = group_max = None
    terms = assembly.base.kraus_terms
    if not assembly.base.q_check or not terms:
        notes.append("Q-operator test not evaluated for this channel")
    elif len(terms) ** assembly.n_parties > MAX_Q_TERMS:
        notes.append(f"Q-operator test skipped: more than {MAX_Q_TERMS} product Kraus terms")
    else:
        ts, qs, sums = q_operators(assembly, rho0)
        pairwise = _max_pair_commutator(ts)
        q_max = _max_pair_commutator(qs)
        group_max = _max_pair_commutator(sums)
    passes = worst <= tol and (q_max is None or q_max <= tol)
    return CommutativityReport(worst, worst_p, pairwise, q_max, group_max, bool(passes), tol, tuple(notes))
