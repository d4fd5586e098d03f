"""Derivative-free maximisation of the QFI over pure probes, and
classification of probes into entanglement families up to local unitaries.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math
import os

import numpy as np
from scipy import optimize

from .errors import ContractViolation, DivergentQFIError, DomainError
from .qfi import _spectral
from . import states

MAX_DIM = 2**14
GOLDEN = (math.sqrt(5) - 1) / 2
FAMILY_THRESHOLD = 0.999


def worker_count():
    """Worker threads, capped by ``QFI_LAB_THREADS``."""
    env = os.environ.get("QFI_LAB_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


# -- gauge-fixed parameterisation -------------------------------------------

def n_params(dim):
    return 2 * dim - 2


def decode(params, dim):
    """Amplitudes from ``dim - 1`` hyperspherical angles and ``dim - 1`` phases.

    The first amplitude is real and non-negative (global phase fixed) and
    the vector has unit norm by construction.
    """
    params = np.asarray(params, dtype=float)
    angles, phases = params[: dim - 1], params[dim - 1 :]
    mags = np.empty(dim)
    s = 1.0
    for k in range(dim - 1):
        mags[k] = s * math.cos(angles[k])
        s *= math.sin(angles[k])
    mags[dim - 1] = s
    amps = mags.astype(np.complex128)
    amps[1:] *= np.exp(1j * phases)
    return amps


def encode(amplitudes):
    """Inverse of :func:`decode` up to the global phase."""
    v = np.asarray(amplitudes, dtype=np.complex128).ravel()
    v = v / np.linalg.norm(v)
    if abs(v[0]) > 0:
        v = v * (abs(v[0]) / v[0])
    dim = v.size
    mags = np.abs(v)
    angles = np.empty(dim - 1)
    for k in range(dim - 1):
        tail = np.linalg.norm(mags[k:])
        angles[k] = math.acos(min(1.0, mags[k] / tail)) if tail > 0 else 0.0
    phases = np.angle(v[1:])
    return np.concatenate([angles, phases])


@dataclass(frozen=True)
class OptimizationResult:
    best_state: states.PureState
    best_qfi: float
    restarts_used: int
    converged: bool
    seed_label: str
    candidate_qfi: dict

    @property
    def shortfall(self):
        return max(0.0, max(self.candidate_qfi.values(), default=0.0) - self.best_qfi)


def _objective(assembly, p):
    def f(params):
        v = decode(params, assembly.dim)
        rho0 = np.outer(v, v.conj())
        rho, drho = assembly.encode(rho0, p, check=False)
        try:
            return -_spectral(rho, drho).value
        except DivergentQFIError:
            return -1e300
    return f


def golden_polish(f, x, width=1e-3, iters=40):
    """Coordinate-wise golden-section refinement; only accepts improvements."""
    x = np.array(x, dtype=float)
    fx = f(x)
    for i in range(x.size):
        lo, hi = x[i] - width, x[i] + width
        a = hi - GOLDEN * (hi - lo)
        b = lo + GOLDEN * (hi - lo)

        def g(t):
            y = x.copy()
            y[i] = t
            return f(y)

        fa, fb = g(a), g(b)
        for _ in range(iters):
            if fa < fb:
                hi, b, fb = b, a, fa
                a = hi - GOLDEN * (hi - lo)
                fa = g(a)
            else:
                lo, a, fa = a, b, fb
                b = lo + GOLDEN * (hi - lo)
                fb = g(b)
        t, ft = (a, fa) if fa < fb else (b, fb)
        if ft < fx:
            x[i], fx = t, ft
    return x, fx


def candidate_states(local_dims):
    """Built-in probe families for the given dimension signature."""
    dims = tuple(local_dims)
    n, d = len(dims), dims[0]
    out = {"product": states.basis_state(dims, 0)}
    if len(set(dims)) != 1 or n < 2:
        return out
    out["ghz"] = states.ghz(n, d)
    out["w"] = states.w_state(n, d)
    if d == 2 and n >= 3:
        out["biprod"] = states.bell_pairs(1, extra=n - 2)
    if d == 2 and n == 4:
        out["bell_pairs"] = states.bell_pairs(2)
    if n == 2:
        for m in range(2, d + 1):
            out[f"schmidt_m{m}"] = states.schmidt_probe(m, d)
    if dims == (2, 2):
        from .bitflip import optimal_probe_state

        out["bitflip_opt"] = optimal_probe_state(math.pi)
    return out


def maximize_qfi(assembly, p, restarts=32, budget=20000, seed=42, polish=True):
    """Maximise the spectral QFI over pure probes of ``assembly``.

    Every built-in candidate family seeds one Nelder-Mead run; the remaining
    ``restarts`` runs start from Haar-random states. Runs are independent and
    the result is the best of them, so more restarts never lower ``best_qfi``.

    ``converged`` is False when the winning run exhausted ``budget`` function
    evaluations before the simplex contracted.
    """
    dim = assembly.dim
    if dim > MAX_DIM:
        raise DomainError(f"total dimension {dim} exceeds {MAX_DIM}")
    lo, hi = assembly.base.param_range
    if not lo < p < hi:
        raise DomainError(f"p={p!r} must be interior to [{lo}, {hi}]")
    f = _objective(assembly, p)
    cands = candidate_states(assembly.local_dims)
    cand_qfi = {k: -f(encode(v.amplitudes)) for k, v in cands.items()}
    rng = np.random.default_rng(seed)
    starts = [(k, encode(v.amplitudes)) for k, v in cands.items()]
    for i in range(restarts):
        starts.append((f"random{i}", encode(states.haar_random(assembly.local_dims, rng).amplitudes)))

    def run(item):
        label, x0 = item
        res = optimize.minimize(
            f, x0, method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-12, "maxfev": int(budget), "adaptive": True},
        )
        return label, res.x, float(res.fun), bool(res.success)

    workers = min(worker_count(), len(starts))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            runs = list(pool.map(run, starts))
    else:
        runs = [run(s) for s in starts]
    # stable max-reduction: earlier start wins exact ties
    label, x, fx, success = min(runs, key=lambda r: r[2])
    if polish:
        x, fx = golden_polish(f, x)
    best = states.PureState.normalized(assembly.local_dims, decode(x, dim))
    value = -f(encode(best.amplitudes))
    return OptimizationResult(best, value, len(starts), success, label, cand_qfi)


# -- family classification ---------------------------------------------------

def _su2(a, b, c):
    """Unitary ``Rz(a) Ry(b) Rz(c)``."""
    rz = lambda t: np.array([[np.exp(-0.5j * t), 0], [0, np.exp(0.5j * t)]])
    ry = np.array([[math.cos(b / 2), -math.sin(b / 2)], [math.sin(b / 2), math.cos(b / 2)]])
    return rz(a) @ ry @ rz(c)


def _apply_local(params, v, n):
    """``(u_1 (x) ... (x) u_n) v`` by contracting one qubit axis at a time."""
    t = v.reshape((2,) * n)
    for k in range(n):
        u = _su2(*params[3 * k : 3 * k + 3])
        t = np.moveaxis(np.tensordot(u, t, axes=([1], [k])), 0, k)
    return t.ravel()


def family_representatives(n):
    reps = {"product": [states.product_zero(n, 2)]}
    if n >= 2:
        reps["ghz"] = [states.ghz(n)]
    if n >= 3:
        reps["w"] = [states.w_state(n)]
        bis = []
        for i in range(n):
            for j in range(i + 1, n):
                v = np.zeros(2**n, dtype=np.complex128)
                for bit in (0, 1):
                    idx = [0] * n
                    idx[i] = idx[j] = bit
                    v[int(np.ravel_multi_index(tuple(idx), (2,) * n))] = 1.0
                bis.append(states.PureState.normalized((2,) * n, v))
        reps["biprod"] = bis
    return reps


FAMILY_ORDER = ("product", "biprod", "ghz", "w")


def aligned_fidelity(state, target, restarts=4, seed=0):
    """``max_U |<target| U |state>|^2`` over local unitaries, by Nelder-Mead."""
    n = len(state.local_dims)
    v, t = state.amplitudes, target.amplitudes.conj()

    def f(x):
        return -abs(t @ _apply_local(x, v, n)) ** 2

    rng = np.random.default_rng(seed)
    best = -f(np.zeros(3 * n))
    starts = [np.zeros(3 * n)] + [rng.uniform(-math.pi, math.pi, 3 * n) for _ in range(restarts)]
    for x0 in starts:
        if best >= 1 - 1e-12:
            break
        res = optimize.minimize(f, x0, method="Nelder-Mead",
                                options={"xatol": 1e-10, "fatol": 1e-14, "maxfev": 8000, "adaptive": True})
        best = max(best, -float(res.fun))
    return min(best, 1.0)


def classify_probe(state, threshold=FAMILY_THRESHOLD, seed=0):
    """Nearest family among product/bi-product/GHZ/W, or ``"other"``.

    Returns ``(label, score)`` where ``score`` is the best aligned fidelity.
    """
    if any(x != 2 for x in state.local_dims):
        raise ContractViolation("classification is implemented for qubit probes only")
    n = len(state.local_dims)
    scores = {}
    for fam, reps in family_representatives(n).items():
        scores[fam] = max(aligned_fidelity(state, r, seed=seed) for r in reps)
        # distinct families overlap far below the threshold, so a near-exact match settles it
        if scores[fam] >= 1 - 1e-9:
            break
    # max() keeps the first of equal scores, so FAMILY_ORDER breaks ties
    label = max((f for f in FAMILY_ORDER if f in scores), key=scores.get)
    score = scores[label]
    return (label if score >= threshold else "other"), score
