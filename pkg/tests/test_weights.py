import pytest
import sympy
from hypothesis import given, strategies as st

from qfi_lab.errors import ContractViolation
from qfi_lab.weights import P, WeightExpr, product


@pytest.mark.parametrize("text,expected", [
    ("1 - p", 0.7),
    ("p/3", 0.1),
    ("(1-p)^2", 0.49),
    ("(1-p)**2", 0.49),
    ("sqrt(p*p)", 0.3),
    ("-p + 1", 0.7),
    ("0.5*p", 0.15),
])
def test_evaluate(text, expected):
    assert WeightExpr.parse(text)(0.3) == pytest.approx(expected)


@pytest.mark.parametrize("text", ["x", "exp(p)", "p.real", "p**-1", "p**q", "p**0.5", "__import__('os')", "1 +", "[p]"])
def test_rejects(text):
    with pytest.raises(ContractViolation):
        WeightExpr.parse(text)


def test_symbolic_equality_keys():
    a = WeightExpr.parse("(1-p)*(1-p)")
    b = WeightExpr.parse("1 - 2*p + p^2")
    c = WeightExpr.parse("p/2")
    assert a.key == b.key
    assert c.key == WeightExpr.parse("0.5*p").key
    assert a.key != c.key


@given(st.floats(0.01, 0.99))
def test_derivative_matches_sympy(p):
    w = WeightExpr.parse("(1 - 4*p/3 + p/3)*sqrt(p + 1)")
    exact = float(sympy.diff(w.expr, P).subs(P, p))
    assert w.derivative(p) == pytest.approx(exact, rel=1e-12)


def test_product():
    w = product([WeightExpr.parse("p"), WeightExpr.parse("1-p"), WeightExpr.parse("2")])
    assert w(0.25) == pytest.approx(2 * 0.25 * 0.75)
    assert w.derivative(0.25) == pytest.approx(2 * (1 - 2 * 0.25))
