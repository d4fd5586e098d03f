import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qfi_lab import states
from qfi_lab.channels import assemble, bit_flip, depolarizing
from qfi_lab.errors import ContractViolation, DivergentQFIError, EigenvalueCrossingError, EndpointError
from qfi_lab.qfi import check_continuous_commutativity, q_operators, qfi, qfi_commuting, qfi_spectral
from helpers import random_density, random_traceless_hermitian, sld_qfi


def test_spectral_matches_sld_oracle(rng):
    for n in (2, 3, 6):
        rho = random_density(n, rng)
        drho = random_traceless_hermitian(n, rng)
        assert qfi_spectral(rho, drho).value == pytest.approx(sld_qfi(rho, drho), rel=1e-9)


def test_pure_state_rotation():
    # |psi(t)> = cos t|0> + sin t|1> has QFI 4
    t = 0.3
    psi = np.array([math.cos(t), math.sin(t)])
    dpsi = np.array([-math.sin(t), math.cos(t)])
    rho = np.outer(psi, psi)
    drho = np.outer(dpsi, psi) + np.outer(psi, dpsi)
    rep = qfi_spectral(rho, drho)
    assert rep.value == pytest.approx(4.0, rel=1e-12)
    assert rep.floor_hits == 1  # the null-null pair


def test_divergent_derivative():
    with pytest.raises(DivergentQFIError):
        qfi_spectral(np.diag([1.0, 0.0]), np.diag([-1.0, 1.0]))


def test_input_contracts(rng):
    rho = random_density(3, rng)
    with pytest.raises(ContractViolation):
        qfi_spectral(rho, np.eye(3))
    with pytest.raises(ContractViolation):
        qfi_spectral(rho, random_traceless_hermitian(2, rng))


def test_commuting_formula():
    f = lambda p: np.array([1 - p, p])
    assert qfi_commuting(f, 0.3).value == pytest.approx(1 / 0.21, rel=1e-8)
    exact = qfi_commuting(f, 0.3, derivative_fn=lambda p: np.array([-1.0, 1.0]))
    assert exact.value == pytest.approx(1 / 0.21, rel=1e-14)


def test_commuting_reorders_then_raises():
    swapped = lambda p: np.array([p, 1 - p]) if p < 0.3 else np.array([1 - p, p])
    rep = qfi_commuting(swapped, 0.3, step=1e-4)
    assert rep.warnings and rep.value == pytest.approx(1 / 0.21, rel=1e-6)
    kink = lambda p: np.array([0.5 + abs(p - 0.3), 0.5 - abs(p - 0.3)])
    with pytest.raises(EigenvalueCrossingError):
        qfi_commuting(kink, 0.3, step=1e-4)


@pytest.mark.parametrize("probe", [states.schmidt_probe(2, 2), states.ghz(3), states.product_zero(2, 3)])
def test_three_methods_agree(probe):
    d, n = probe.local_dims[0], len(probe.local_dims)
    asm = assemble(depolarizing(d), n)
    s = qfi(asm, probe, 0.3).value
    assert qfi(asm, probe, 0.3, method="commuting").value == pytest.approx(s, rel=1e-7)
    assert qfi(asm, probe, 0.3, method="fidelity_fd").value == pytest.approx(s, rel=1e-5)


def test_commuting_is_flagged_when_invalid():
    asm = assemble(depolarizing(2), 2)
    rep = qfi(asm, states.schmidt_state([0.9, 0.1], 2), 0.3, method="commuting")
    assert rep.commutator_residual > 1e-3 and rep.warnings


@pytest.mark.parametrize("ch,p", [(depolarizing(2), 0.0), (depolarizing(2), 0.75), (bit_flip(), 1.0)])
def test_endpoints(ch, p):
    with pytest.raises(EndpointError):
        qfi(assemble(ch, 1), states.product_zero(1, 2), p)


def test_unknown_method():
    with pytest.raises(ValueError):
        qfi(assemble(bit_flip(), 1), states.product_zero(1, 2), 0.3, method="magic")


@given(st.integers(0, 2**31 - 1), st.floats(0.05, 0.7))
def test_unitary_invariance(seed, p):
    rng = np.random.default_rng(seed)
    rho = random_density(4, rng)
    drho = random_traceless_hermitian(4, rng) * 0.1
    u = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    a = qfi_spectral(rho, drho).value
    b = qfi_spectral(u @ rho @ u.conj().T, u @ drho @ u.conj().T).value
    assert b == pytest.approx(a, rel=1e-7)


@given(st.integers(0, 2**31 - 1), st.floats(0.0, 1.0), st.floats(0.05, 0.7))
def test_convexity(seed, lam, p):
    rng = np.random.default_rng(seed)
    asm = assemble(depolarizing(2), 2)
    a = states.haar_random((2, 2), rng).density()
    b = states.haar_random((2, 2), rng).density()
    mix = lam * a + (1 - lam) * b
    lhs = qfi(asm, mix, p).value
    rhs = lam * qfi(asm, a, p).value + (1 - lam) * qfi(asm, b, p).value
    assert lhs <= rhs + 1e-8


@pytest.mark.parametrize("m,d", [(1, 2), (2, 2), (2, 3), (3, 3), (4, 4)])
def test_uniform_schmidt_commutes(m, d):
    rep = check_continuous_commutativity(assemble(depolarizing(d), 2), states.schmidt_probe(m, d), [0.1, 0.4])
    assert rep.passes and rep.rho_residual < 1e-12


def test_non_uniform_schmidt_fails():
    rep = check_continuous_commutativity(
        assemble(depolarizing(2), 2), states.schmidt_state([0.9, 0.1], 2), [0.3]
    )
    assert not rep.passes and rep.rho_residual > 1e-3
    assert rep.q_pair_max > 1e-3


def test_q_test_skipped_for_affine_only_channel():
    rep = check_continuous_commutativity(assemble(depolarizing(4), 2), states.schmidt_probe(2, 4), [0.3])
    assert rep.q_pair_max is None and rep.notes and rep.passes


def test_q_test_is_basis_dependent_for_qutrits():
    # The literal pairwise test rejects a commuting probe in the Gell-Mann basis,
    # although the full state commutes with its derivative; hence q_check is off for d=3.
    ch = dataclasses.replace(depolarizing(3), q_check=True)
    rep = check_continuous_commutativity(assemble(ch, 2), states.schmidt_probe(3, 3), [0.3])
    assert rep.rho_residual < 1e-12
    assert rep.q_pair_max > 1e-3


def test_q_operator_grouping():
    ts, qs, sums = q_operators(assemble(bit_flip(), 2), states.schmidt_probe(2, 2).density())
    # weights (1-p)^2, p(1-p), p(1-p), p^2: only the middle pair shares a weight
    assert len(ts) == 4 and len(sums) == 3
    assert np.allclose(qs[0], 0) and np.allclose(qs[3], 0)
    np.testing.assert_allclose(qs[1], ts[1] + ts[2])


def test_bitflip_optimal_probe_commutes():
    from qfi_lab.bitflip import optimal_probe_state

    rep = check_continuous_commutativity(assemble(bit_flip(), 2), optimal_probe_state(1.1), [0.2, 0.5])
    assert rep.passes
