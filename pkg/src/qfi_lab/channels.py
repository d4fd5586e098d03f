"""Vector-encoding channels ``rho -> sum_i f_i(p) M_i rho M_i^dagger`` and
their identical local application to every party of a multipartite probe.
"""

from dataclasses import dataclass
from functools import cached_property
import itertools
import json

import numpy as np

from .errors import ContractViolation, DomainError
from .linalg import check_density, kron_all
from .weights import WeightExpr, product

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

# explicit generator lists are only materialised for small local dimension
MAX_KRAUS_DIM = 3


def gell_mann(d):
    """Generalised Gell-Mann matrices normalised to ``Tr(l_i l_j) = 2 delta_ij``."""
    out = []
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=np.complex128)
            m[j, k] = m[k, j] = 1.0
            out.append(m)
            m = np.zeros((d, d), dtype=np.complex128)
            m[j, k] = -1j
            m[k, j] = 1j
            out.append(m)
    for l in range(1, d):
        m = np.zeros((d, d), dtype=np.complex128)
        m[np.arange(l), np.arange(l)] = 1.0
        m[l, l] = -l
        out.append(m * np.sqrt(2.0 / (l * (l + 1))))
    return out


@dataclass(frozen=True)
class KrausTerm:
    weight: WeightExpr
    operator: np.ndarray


@dataclass(frozen=True, eq=False)
class VectorEncoding:
    """Single-party channel with parameter-dependent weights and fixed operators.

    ``affine`` marks the depolarizing channel, whose action is evaluated from
    its closed affine form instead of the Kraus sum. ``q_check`` says whether
    the explicit Kraus list may be used for the pairwise Q-operator test; see
    :func:`qfi_lab.qfi.check_continuous_commutativity`.
    """

    name: str
    local_dim: int
    kraus_terms: tuple
    param_range: tuple
    affine: bool = False
    q_check: bool = True

    def check_p(self, p):
        lo, hi = self.param_range
        if not (lo - 1e-15 <= p <= hi + 1e-15):
            raise DomainError(f"p={p!r} outside [{lo}, {hi}] for {self.name} channel")

    def is_endpoint(self, p):
        lo, hi = self.param_range
        return abs(p - lo) <= 1e-15 or abs(p - hi) <= 1e-15

    def weights(self, p):
        return np.array([t.weight(p) for t in self.kraus_terms])

    def weight_derivatives(self, p):
        return np.array([t.weight.derivative(p) for t in self.kraus_terms])

    # single-party action on one axis pair of a reshaped operator
    def _act(self, t, axis, n, p, derivative):
        d = self.local_dim
        if self.affine:
            q = 4.0 * p / 3.0
            a, b = (-4.0 / 3.0, 4.0 / 3.0) if derivative else (1.0 - q, q)
            tr = np.trace(t, axis1=axis, axis2=n + axis)
            mixed = np.multiply.outer(tr, np.eye(d) / d)
            mixed = np.moveaxis(mixed, [2 * n - 2, 2 * n - 1], [axis, n + axis])
            return a * t + b * mixed
        coeffs = self.weight_derivatives(p) if derivative else self.weights(p)
        out = np.zeros_like(t)
        for c, term in zip(coeffs, self.kraus_terms):
            if c == 0.0:
                continue
            m = term.operator
            u = np.moveaxis(np.tensordot(m, t, axes=([1], [axis])), 0, axis)
            u = np.moveaxis(np.tensordot(m.conj(), u, axes=([1], [n + axis])), 0, n + axis)
            out += c * u
        return out

    def channel(self, rho, p):
        rho = np.asarray(rho, dtype=np.complex128)
        return self._act(rho, 0, 1, p, False)

    def channel_derivative(self, rho, p):
        rho = np.asarray(rho, dtype=np.complex128)
        return self._act(rho, 0, 1, p, True)

    def completeness_defect(self, p):
        d = self.local_dim
        if not self.kraus_terms:
            return 0.0
        s = sum(t.weight(p) * t.operator.conj().T @ t.operator for t in self.kraus_terms)
        return float(np.max(np.abs(s - np.eye(d))))

    def validate(self, samples=11):
        """Check completeness, weight positivity and derivative consistency."""
        lo, hi = self.param_range
        h = 1e-6 * max(1.0, hi - lo)
        for p in np.linspace(lo, hi, samples):
            if self.completeness_defect(p) > 1e-10:
                raise ContractViolation(f"{self.name}: completeness fails at p={p:.6g}")
            for t in self.kraus_terms:
                if t.weight(p) < -1e-14:
                    raise ContractViolation(f"{self.name}: weight {t.weight.source} negative at p={p:.6g}")
                if lo + h <= p <= hi - h:
                    fd = (t.weight(p + h) - t.weight(p - h)) / (2 * h)
                    if abs(fd - t.weight.derivative(p)) > 1e-6:
                        raise ContractViolation(f"{self.name}: derivative of {t.weight.source} inconsistent")
        return self

    def to_json(self):
        doc = {"type": self.name, "d": self.local_dim}
        if self.name == "custom":
            doc["param_range"] = list(self.param_range)
            doc["kraus"] = [
                {
                    "weight_expr": t.weight.source,
                    "matrix": [[float(z.real), float(z.imag)] for z in t.operator.ravel()],
                }
                for t in self.kraus_terms
            ]
        return doc

    @classmethod
    def from_json(cls, doc):
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        kind = doc.get("type")
        if kind == "depolarizing":
            return depolarizing(int(doc["d"]))
        if kind == "bitflip":
            return bit_flip()
        if kind != "custom":
            raise ContractViolation(f"unknown channel type {kind!r}")
        d = int(doc["d"])
        terms = []
        for entry in doc["kraus"]:
            m = np.array(entry["matrix"], dtype=float)
            if m.shape[-1] != 2:
                raise ContractViolation("matrix entries must be [re, im] pairs")
            m = (m[..., 0] + 1j * m[..., 1]).reshape(d, d)
            terms.append(KrausTerm(WeightExpr.parse(entry["weight_expr"]), m))
        lo, hi = doc.get("param_range", (0.0, 1.0))
        return cls("custom", d, tuple(terms), (float(lo), float(hi))).validate()


def depolarizing(d, generator_set=None):
    """Qudit depolarizing channel ``(1 - 4p/3) rho + (4p/3) Tr(rho) I/d``, p in [0, 3/4].

    For ``d <= 3`` (or when ``generator_set`` is given) an explicit Kraus list
    on the identity plus SU(d) generators is attached. The generators must be
    traceless Hermitian with ``Tr(l_i l_j) = 2 delta_ij``; with that
    normalisation the weights reproducing the affine action are
    ``1 - 4p/3 + 4p/(3 d^2)`` on the identity and ``2p/(3d)`` on each generator.
    """
    d = int(d)
    if d < 2:
        raise ContractViolation(f"depolarizing channel needs d >= 2, got {d}")
    terms = ()
    if generator_set is not None or d <= MAX_KRAUS_DIM:
        gens = gell_mann(d) if generator_set is None else [np.asarray(g, dtype=np.complex128) for g in generator_set]
        if len(gens) != d * d - 1:
            raise ContractViolation(f"need {d * d - 1} generators for SU({d}), got {len(gens)}")
        w_id = WeightExpr.parse(f"1 - 4*p/3 + 4*p/(3*{d * d})")
        w_gen = WeightExpr.parse(f"2*p/(3*{d})")
        terms = (KrausTerm(w_id, np.eye(d, dtype=np.complex128)),) + tuple(KrausTerm(w_gen, g) for g in gens)
    # the literal Q-operator test depends on the generator basis once d > 2
    return VectorEncoding("depolarizing", d, terms, (0.0, 0.75), affine=True, q_check=(d == 2))


def bit_flip():
    """Qubit bit-flip channel ``(1 - p) rho + p X rho X``, p in [0, 1]."""
    terms = (
        KrausTerm(WeightExpr.parse("1 - p"), np.eye(2, dtype=np.complex128)),
        KrausTerm(WeightExpr.parse("p"), PAULI_X.copy()),
    )
    return VectorEncoding("bitflip", 2, terms, (0.0, 1.0))


@dataclass(frozen=True, eq=False)
class LocalChannelAssembly:
    """The same channel applied independently to each of ``n_parties`` qudits."""

    base: VectorEncoding
    n_parties: int

    def __post_init__(self):
        if self.n_parties < 1:
            raise ContractViolation("n_parties must be positive")

    @property
    def dim(self):
        return self.base.local_dim ** self.n_parties

    @property
    def local_dims(self):
        return [self.base.local_dim] * self.n_parties

    def _prepare(self, rho0, p, check):
        rho0 = np.asarray(rho0, dtype=np.complex128)
        if rho0.shape != (self.dim, self.dim):
            raise ContractViolation(f"probe has shape {rho0.shape}, expected {(self.dim, self.dim)}")
        self.base.check_p(p)
        if check:
            check_density(rho0, "rho0")
        d, n = self.base.local_dim, self.n_parties
        return rho0.reshape([d] * (2 * n))

    def apply(self, rho0, p, check=True):
        """Encoded state ``alpha_p^{(x)n}(rho0)``."""
        t = self._prepare(rho0, p, check)
        n = self.n_parties
        for k in range(n):
            t = self.base._act(t, k, n, p, False)
        return t.reshape(self.dim, self.dim)

    def apply_derivative(self, rho0, p, check=True):
        """Exact ``d/dp`` of :meth:`apply` via the product rule over parties."""
        return self.encode(rho0, p, check)[1]

    def encode(self, rho0, p, check=True):
        """Return ``(rho_p, d rho_p / dp)`` sharing intermediate work."""
        t0 = self._prepare(rho0, p, check)
        n = self.n_parties
        # prefix[k]: channel applied to parties < k; carries the running derivative too
        value = t0
        deriv = np.zeros_like(t0)
        for k in range(n):
            deriv = self.base._act(deriv, k, n, p, False) + self.base._act(value, k, n, p, True)
            value = self.base._act(value, k, n, p, False)
        return value.reshape(self.dim, self.dim), deriv.reshape(self.dim, self.dim)

    @cached_property
    def kraus_products(self):
        """All ``(weight, operator)`` pairs of the n-fold product, or ``()``."""
        terms = self.base.kraus_terms
        if not terms:
            return ()
        out = []
        for combo in itertools.product(terms, repeat=self.n_parties):
            w = product([t.weight for t in combo])
            out.append((w, kron_all([t.operator for t in combo])))
        return tuple(out)

    def to_json(self):
        return {"channel": self.base.to_json(), "n": self.n_parties}


def assemble(channel, n):
    return LocalChannelAssembly(channel, int(n))
