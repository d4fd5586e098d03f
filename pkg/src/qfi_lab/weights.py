"""Parameter-dependent Kraus weights written as small expressions in ``p``.

The accepted grammar is rational functions of ``p`` built from numeric
literals, ``+``, ``-``, ``*``, ``/``, parentheses and ``sqrt(...)``. A
non-negative integer power ``x**k`` is also accepted since it is shorthand
for repeated multiplication. Anything else (names, calls, attribute access)
is rejected before sympy ever sees it.
"""

import ast
from dataclasses import dataclass, field
from functools import reduce
import operator

import sympy

from .errors import ContractViolation

P = sympy.Symbol("p", real=True)

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
}


def _to_sympy(node):
    if isinstance(node, ast.Expression):
        return _to_sympy(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return sympy.nsimplify(node.value, rational=True) if isinstance(node.value, float) else sympy.Integer(node.value)
    if isinstance(node, ast.Name):
        if node.id != "p":
            raise ContractViolation(f"unknown name {node.id!r} in weight expression")
        return P
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _to_sympy(node.operand)
        return -inner if isinstance(node.op, ast.USub) else inner
    if isinstance(node, ast.BinOp):
        if type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](_to_sympy(node.left), _to_sympy(node.right))
        if isinstance(node.op, ast.Pow):
            exp = node.right
            if isinstance(exp, ast.Constant) and isinstance(exp.value, int) and exp.value >= 0:
                return _to_sympy(node.left) ** exp.value
            raise ContractViolation("only non-negative integer literal exponents are allowed")
    if isinstance(node, ast.Call):
        if isinstance(node.func, ast.Name) and node.func.id == "sqrt" and len(node.args) == 1 and not node.keywords:
            return sympy.sqrt(_to_sympy(node.args[0]))
    raise ContractViolation(f"unsupported syntax in weight expression: {ast.dump(node)[:60]}")


def canonical_key(expr):
    """String identifying ``expr`` up to algebraic rewriting."""
    return sympy.srepr(sympy.cancel(sympy.expand(expr)))


@dataclass(frozen=True)
class WeightExpr:
    """A weight ``f(p)`` with its exact derivative."""

    source: str
    expr: sympy.Expr = field(repr=False, compare=False)
    key: str = field(repr=False)

    @classmethod
    def parse(cls, text):
        try:
            tree = ast.parse(str(text).replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise ContractViolation(f"cannot parse weight expression {text!r}: {exc.msg}") from None
        expr = _to_sympy(tree)
        return cls.from_sympy(expr, source=str(text))

    @classmethod
    def from_sympy(cls, expr, source=None):
        expr = sympy.sympify(expr)
        return cls(source if source is not None else str(expr), expr, canonical_key(expr))

    def __post_init__(self):
        object.__setattr__(self, "_f", sympy.lambdify(P, self.expr, "numpy"))
        object.__setattr__(self, "_df", sympy.lambdify(P, sympy.diff(self.expr, P), "numpy"))

    def __call__(self, p):
        return float(self._f(float(p)))

    def derivative(self, p):
        return float(self._df(float(p)))

    def __mul__(self, other):
        return WeightExpr.from_sympy(self.expr * other.expr)


def product(weights):
    return reduce(operator.mul, weights)
