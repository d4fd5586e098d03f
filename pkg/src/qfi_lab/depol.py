"""Local depolarizing noise: closed-form QFI of uniform Schmidt probes,
the rank staircase, three-qubit family crossovers and the high-noise
product-probe check.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import optimize

from .channels import assemble, depolarizing
from .errors import BracketError, ContractViolation, DomainError, EndpointError
from .qfi import qfi
from . import states

P_MAX = 0.75
TIE_TOL = 1e-12
DEFAULT_GRID = np.linspace(0.001, 0.749, 1500)


def _check(p, m, d, open_interval=False):
    if not (isinstance(d, (int, np.integer)) and d >= 1):
        raise DomainError(f"local dimension must be a positive integer, got {d!r}")
    if not 1 <= m <= d:
        raise DomainError(f"Schmidt rank m={m} outside [1, {d}]")
    if not 0.0 <= p <= P_MAX:
        raise DomainError(f"p={p!r} outside [0, 3/4]")
    if open_interval and (p == 0.0 or p == P_MAX):
        raise EndpointError(f"closed-form QFI is not reported at the endpoint p={p!r}")


@dataclass(frozen=True)
class EigenModel:
    """Spectrum of ``Lambda_p (x) Lambda_p (|psi_m><psi_m|)`` as four degenerate levels."""

    p: float
    m: int
    d: int
    rows: tuple  # (eigenvalue, degeneracy, d eigenvalue / dp)

    def spectrum(self):
        vals = [v for v, g, _ in self.rows for _ in range(g)]
        return np.sort(np.array(vals))

    def curves(self):
        """Eigenvalues and derivatives expanded by degeneracy, in row order."""
        vals = np.array([v for v, g, _ in self.rows for _ in range(g)])
        ders = np.array([dv for _, g, dv in self.rows for _ in range(g)])
        return vals, ders


def eigen_model(p, m, d):
    _check(p, m, d)
    e = 1.0 - 4.0 * p / 3.0
    base = (4.0 * p / (3.0 * d)) ** 2
    dbase = 32.0 * p / (9.0 * d * d)
    pair = 8.0 * p / (3.0 * d * m) * e
    dpair = 8.0 / (3.0 * d * m) * (1.0 - 8.0 * p / 3.0)
    rows = (
        (base + pair + e * e, 1, dbase + dpair - 8.0 / 3.0 * e),
        (base + pair, m * m - 1, dbase + dpair),
        (base + pair / 2.0, 2 * m * (d - m), dbase + dpair / 2.0),
        (base, (d - m) ** 2, dbase),
    )
    return EigenModel(float(p), int(m), int(d), rows)


def qfi_closed_form(p, m, d):
    """QFI of the rank-m probe, ``sum_k g_k (dl_k/dp)^2 / l_k`` over the four levels."""
    _check(p, m, d, open_interval=True)
    return float(sum(g * dv * dv / v for v, g, dv in eigen_model(p, m, d).rows if g))


def qfi_compact_form(p, m, d):
    """Same QFI written in ``x = m/d`` and ``eps = 1 - 4p/3``."""
    _check(p, m, d, open_interval=True)
    x = m / d
    e = 1.0 - 4.0 * p / 3.0
    a1 = (1 - (1 + d * d) * e - (1 - 2 * e) / x) ** 2 / (d * d * e * e + (1 - e) ** 2 + 2 * e * (1 - e) / x)
    a2 = (1 - e - (1 - 2 * e) / x) ** 2 / ((1 - e) ** 2 + 2 * e * (1 - e) / x)
    a3 = (1 - e - (1 - 2 * e) / (2 * x)) ** 2 / ((1 - e) ** 2 + e * (1 - e) / x)
    return 64.0 / 9.0 * ((1 - x) ** 2 + a1 / d**2 + (x * x - 1 / d**2) * a2 + 2 * x * (1 - x) * a3)


def qfi_all_ranks(p, d):
    """Vector of closed-form QFIs for m = 1..d (vectorised over m)."""
    _check(p, 1, d, open_interval=True)
    m = np.arange(1, d + 1, dtype=float)
    e = 1.0 - 4.0 * p / 3.0
    base = (4.0 * p / (3.0 * d)) ** 2
    dbase = 32.0 * p / (9.0 * d * d)
    pair = 8.0 * p / (3.0 * d * m) * e
    dpair = 8.0 / (3.0 * d * m) * (1.0 - 8.0 * p / 3.0)
    out = (dbase + dpair - 8.0 / 3.0 * e) ** 2 / (base + pair + e * e)
    out += (m * m - 1) * (dbase + dpair) ** 2 / (base + pair)
    out += 2 * m * (d - m) * (dbase + dpair / 2) ** 2 / (base + pair / 2)
    out += (d - m) ** 2 * dbase**2 / base
    return out


def encoded_state(p, m, d):
    """Explicit ``rho_p(m, d)`` built through the channel machinery."""
    probe = states.schmidt_probe(m, d)
    return assemble(depolarizing(d), 2).apply(probe.density(), p)


def best_rank(values):
    """Index (1-based) of the maximum, smallest rank winning ties."""
    values = np.asarray(values)
    top = values.max()
    return int(np.flatnonzero(values >= top - TIE_TOL * max(1.0, abs(top)))[0]) + 1


@dataclass(frozen=True)
class StaircasePoint:
    p: float
    m_opt: int
    qfi_opt: float
    entanglement: float


def staircase(d, p_grid=DEFAULT_GRID):
    out = []
    for p in np.asarray(p_grid, dtype=float):
        if not 0.0 < p < P_MAX:
            raise DomainError(f"staircase grid point p={p!r} outside (0, 3/4)")
        vals = qfi_all_ranks(float(p), d)
        m = best_rank(vals)
        out.append(StaircasePoint(float(p), m, float(vals[m - 1]), math.log2(m)))
    return out


@dataclass(frozen=True)
class StaircaseSummary:
    d: int
    attained: tuple
    m_star: int
    non_increasing: bool
    single_jump: bool
    transitions: tuple  # (p_left, p_right, m_left, m_right)

    def first_step(self):
        """Midpoint p of the 2 -> 1 transition (m=1 for larger p)."""
        for pl, pr, ml, mr in self.transitions:
            if mr == 1 and ml >= 2:
                return 0.5 * (pl + pr)
        return None


def summarize(points, d):
    ms = [pt.m_opt for pt in points]
    ps = [pt.p for pt in points]
    transitions = tuple(
        (ps[i], ps[i + 1], ms[i], ms[i + 1]) for i in range(len(ms) - 1) if ms[i] != ms[i + 1]
    )
    attained = tuple(sorted(set(ms)))
    below = [m for m in attained if m < d]
    m_star = max(below) if below else d
    order = np.argsort(ps)
    msorted = np.array(ms)[order]
    non_inc = bool(np.all(np.diff(msorted) <= 0))
    jumps = [t for t in transitions if abs(t[2] - t[3]) > 1]
    single = len(jumps) <= 1 and all(t[2] == d and t[3] == m_star for t in jumps)
    return StaircaseSummary(d, attained, m_star, non_inc, single, transitions)


def transition_point(d, m_hi, m_lo, lo=1e-4, hi=P_MAX - 1e-6, xtol=1e-12):
    """Exact p where ranks ``m_hi`` and ``m_lo`` have equal closed-form QFI."""
    f = lambda p: qfi_closed_form(p, m_hi, d) - qfi_closed_form(p, m_lo, d)
    grid = np.linspace(lo, hi, 400)
    vals = [f(p) for p in grid]
    for a, b, fa, fb in zip(grid, grid[1:], vals, vals[1:]):
        if fa > 0 >= fb:
            return optimize.brentq(f, a, b, xtol=xtol)
    raise BracketError(f"no crossing of ranks {m_hi} and {m_lo} for d={d}")


def case_checks(d, large_d_grid=None):
    """Regime checks: weak noise favours m=d, strong noise m=1, and for
    ``d >= 64`` the product probe wins across a moderate-noise grid.

    Returns a dict of ``name -> {"passed", "p", "m_opt", ...}``.
    """
    if d < 2:
        raise ContractViolation("case checks need d >= 2")
    out = {}
    p_small = 0.01
    m = best_rank(qfi_all_ranks(p_small, d))
    # the weak-noise regime is only claimed for moderate d
    out["weak_noise"] = {"passed": m == d, "p": p_small, "m_opt": m, "expected": d, "applicable": d < 64}
    p_large = 0.749
    m = best_rank(qfi_all_ranks(p_large, d))
    out["strong_noise"] = {"passed": m == 1, "p": p_large, "m_opt": m, "expected": 1}
    if d >= 64:
        grid = np.linspace(0.30, 0.74, 45) if large_d_grid is None else np.asarray(large_d_grid)
        bad = [(float(p), best_rank(qfi_all_ranks(float(p), d))) for p in grid]
        bad = [(p, m) for p, m in bad if m != 1]
        out["large_dimension"] = {
            "passed": not bad,
            "p": float(bad[0][0]) if bad else float(grid[-1]),
            "m_opt": bad[0][1] if bad else 1,
            "expected": 1,
            "grid": [float(grid[0]), float(grid[-1])],
            "product_onset": transition_point(d, 2, 1),
        }
    return out


THREE_QUBIT_FAMILIES = ("ghz", "w", "biprod", "prod")


def three_qubit_probes():
    return {
        "ghz": states.ghz(3),
        "w": states.w_state(3),
        "biprod": states.bell_pairs(1, extra=1),
        "prod": states.product_zero(3, 2),
    }


def three_qubit_qfi(p, probes=None):
    probes = probes or three_qubit_probes()
    asm = assemble(depolarizing(2), 3)
    return {k: qfi(asm, v, float(p)).value for k, v in probes.items()}


def three_qubit_sweep(p_grid):
    probes = three_qubit_probes()
    rows = []
    for p in p_grid:
        q = three_qubit_qfi(float(p), probes)
        rows.append((float(p),) + tuple(q[k] for k in THREE_QUBIT_FAMILIES))
    return rows


@dataclass(frozen=True)
class ThreeQubitThresholds:
    ghz_w: float
    w_biprod: float
    biprod_prod: float

    def intervals(self):
        return (
            ("ghz", 0.0, self.ghz_w),
            ("w", self.ghz_w, self.w_biprod),
            ("biprod", self.w_biprod, self.biprod_prod),
            ("prod", self.biprod_prod, P_MAX),
        )

    def roots(self):
        return (self.ghz_w, self.w_biprod, self.biprod_prod)


def three_qubit_thresholds(xtol=1e-5, scan=np.arange(0.01, 0.745, 0.005)):
    """Crossovers GHZ/W, W/bi-product and bi-product/product by bisection."""
    probes = three_qubit_probes()
    asm = assemble(depolarizing(2), 3)
    cache = {}

    def value(name, p):
        key = (name, p)
        if key not in cache:
            cache[key] = qfi(asm, probes[name], p).value
        return cache[key]

    roots = []
    start = scan[0]
    for a, b in (("ghz", "w"), ("w", "biprod"), ("biprod", "prod")):
        f = lambda p, a=a, b=b: value(a, float(p)) - value(b, float(p))
        bracket = None
        grid = [float(p) for p in scan if p >= start]
        for lo, hi in zip(grid, grid[1:]):
            if f(lo) > 0 >= f(hi):
                bracket = (lo, hi)
                break
        if bracket is None:
            raise BracketError(f"no sign change bracketing the {a}/{b} crossover")
        root = optimize.bisect(f, *bracket, xtol=xtol)
        roots.append(float(root))
        start = bracket[0]
    return ThreeQubitThresholds(*roots)


def w_type(n, d):
    return states.w_state(n, d)


def ghz_type(n, d):
    return states.ghz(n, d)


@dataclass(frozen=True)
class HighNoiseReport:
    n: int
    d: int
    p: float
    product_qfi: float
    best_competitor: str
    best_competitor_qfi: float
    margin: float
    trials: int
    random_wins: int
    passed: bool
    candidates: dict


def high_noise_product_check(n, d, p, trials=200, seed=42, strict=True):
    """Compare ``|0...0>`` against GHZ/W-type, Schmidt (n=2) and random pure probes.

    ``passed`` requires the product QFI to exceed every competitor.
    """
    if p < 0.7:
        raise DomainError(f"high-noise check needs p >= 0.7, got {p}")
    if n * math.log2(d) > 14 + 1e-9:
        raise DomainError(f"n log2 d = {n * math.log2(d):.2f} exceeds the cap of 14")
    asm = assemble(depolarizing(d), n)
    prod = qfi(asm, states.product_zero(n, d), p).value
    cands = {"ghz": qfi(asm, ghz_type(n, d), p).value}
    if n >= 2:
        cands["w"] = qfi(asm, w_type(n, d), p).value
    if n == 2:
        for m in range(2, d + 1):
            cands[f"schmidt_m{m}"] = qfi(asm, states.schmidt_probe(m, d), p).value
    if n == 4 and d == 2:
        cands["bell_pairs"] = qfi(asm, states.bell_pairs(2), p).value
    rng = np.random.default_rng(seed)
    rand = [qfi(asm, states.haar_random([d] * n, rng), p).value for _ in range(trials)]
    best_name = max(cands, key=cands.get)
    best_val = cands[best_name]
    if rand and max(rand) > best_val:
        best_name, best_val = "random", max(rand)
    wins = sum(prod > r for r in rand)
    margin = prod - best_val
    passed = margin > 0 if strict else margin >= -1e-12
    return HighNoiseReport(n, d, float(p), prod, best_name, best_val, margin, trials, wins, bool(passed), cands)
