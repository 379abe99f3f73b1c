import math

import numpy as np
import pytest

from tlchain.utils.errors import DegenerateLoopConstant, IndexOutOfRange, InvalidSpec, PoleAtRapidity
from tlchain.utils.qnum import (
    AlgebraSpec,
    Family,
    Sign,
    bar,
    coupling_sign,
    epsilon_sign,
    loop_constant,
    omega,
    psi_weights,
    q_bracket,
    rapidity_params,
    rho_tuple,
    verify_omega_identity,
)

SO, SP = Family.ORTHOGONAL, Family.SYMPLECTIC

IDENTITY_SPECS = [(SO, 3), (SO, 4), (SO, 5), (SP, 4), (SP, 6)]


def test_q_bracket_values():
    assert q_bracket(2, 1.0) == 2.0
    assert q_bracket(3, 2.0) == pytest.approx(5.25, rel=1e-14)
    assert q_bracket(1, 0.37) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("m", [1, 2, 3, 5, 8])
@pytest.mark.parametrize("q", [0.3, 0.9, 1.7, 4.0])
def test_q_bracket_symmetric_in_q(m, q):
    assert q_bracket(m, q) == pytest.approx(q_bracket(m, 1 / q), rel=1e-12)


def test_q_bracket_at_extreme_q():
    assert q_bracket(2, 1e100) == pytest.approx(1e100, rel=1e-12)
    assert q_bracket(3, 1e-150) == pytest.approx(1e300, rel=1e-12)
    assert q_bracket(-2, 1e100) == pytest.approx(-1e100, rel=1e-12)
    assert q_bracket(0, 1e100) == 0.0
    with pytest.raises(InvalidSpec):
        q_bracket(5, 1e100)
    with pytest.raises(InvalidSpec):
        loop_constant(AlgebraSpec(SP, 8, 1e-80))


def test_loop_constant_examples():
    assert loop_constant(AlgebraSpec(SO, 3, 1.0)) == pytest.approx(3.0)
    assert loop_constant(AlgebraSpec(SO, 3, 2.0)) == pytest.approx(0.5 + 1 + 2)
    assert loop_constant(AlgebraSpec(SP, 2, 1.0)) == pytest.approx(2.0)


@pytest.mark.parametrize("family,n", [(SO, 3), (SO, 4), (SO, 7), (SP, 2), (SP, 4), (SP, 6)])
@pytest.mark.parametrize("q", [0.25, 0.8, 1.0, 1.9, 3.0])
def test_loop_constant_invariant_under_inversion_and_equals_psi_norm(family, n, q):
    spec = AlgebraSpec(family, n, q)
    k = loop_constant(spec)
    assert k == pytest.approx(loop_constant(spec.with_q(1 / q)), rel=1e-12)
    assert k == pytest.approx(float(np.sum(psi_weights(spec) ** 2)), rel=1e-12)


def test_rapidity_params_so3_plus():
    params = rapidity_params(AlgebraSpec(SO, 3, 1.0), Sign.PLUS)
    assert params.k == pytest.approx(3.0)
    assert params.sinh_eta > 0
    assert math.cosh(params.eta) == pytest.approx(1.5)
    assert params.lam == pytest.approx(-2 / math.sqrt(5))


def test_rapidity_params_so4_minus():
    params = rapidity_params(AlgebraSpec(SO, 4, 1.0), Sign.MINUS)
    assert params.k == pytest.approx(4.0)
    assert params.sinh_eta == pytest.approx(-math.sqrt(3))
    assert math.sinh(params.eta) == pytest.approx(params.sinh_eta)
    assert params.lam == pytest.approx(2 / math.sqrt(12))


def test_rapidity_params_degenerate_sp2():
    with pytest.raises(DegenerateLoopConstant):
        rapidity_params(AlgebraSpec(SP, 2, 1.0))


@pytest.mark.parametrize("family,n,q", [(SO, 3, 1.3), (SO, 5, 0.6), (SP, 4, 2.0)])
def test_sign_branches_flip_lambda(family, n, q):
    spec = AlgebraSpec(family, n, q)
    plus = rapidity_params(spec, Sign.PLUS)
    minus = rapidity_params(spec, Sign.MINUS)
    assert plus.k == minus.k
    assert plus.lam == pytest.approx(-minus.lam)


def test_omega_special_points():
    eta = rapidity_params(AlgebraSpec(SO, 3, 1.0)).eta
    assert omega(0.0, eta) == 0.0
    assert omega(eta, eta) == pytest.approx(-1.0)
    with pytest.raises(PoleAtRapidity):
        omega(-eta, eta)


def test_omega_complex_argument_stays_complex():
    eta = rapidity_params(AlgebraSpec(SO, 4, 2.0)).eta
    value = omega(complex(0.0, 1.2), eta)
    assert isinstance(value, complex)
    assert abs(value + 1) == pytest.approx(1.0, abs=1e-14)


def test_omega_identity_examples():
    eta = rapidity_params(AlgebraSpec(SO, 3, 1.0)).eta
    assert verify_omega_identity(0.0, 0.0, eta) == 0.0
    assert verify_omega_identity(0.7, -0.2, rapidity_params(AlgebraSpec(SO, 3, 1.5)).eta) < 1e-12
    assert verify_omega_identity(0.4, 0.9, rapidity_params(AlgebraSpec(SP, 4, 2.0)).eta) < 1e-12


@pytest.mark.parametrize("family,n", IDENTITY_SPECS)
@pytest.mark.parametrize("q", [0.5, 1.0, 1.7])
def test_omega_identity_on_random_pairs(family, n, q):
    eta = rapidity_params(AlgebraSpec(family, n, q)).eta
    rng = np.random.default_rng(11)
    for theta, theta_prime in rng.uniform(-0.4, 0.4, size=(100, 2)):
        assert verify_omega_identity(theta, theta_prime, eta) < 1e-12


def test_rho_tuples():
    assert rho_tuple(AlgebraSpec(SO, 3)) == (0.5, 0.0, -0.5)
    assert rho_tuple(AlgebraSpec(SO, 4)) == (1.0, 0.0, 0.0, -1.0)
    assert rho_tuple(AlgebraSpec(SP, 4)) == (2.0, 1.0, -1.0, -2.0)
    assert rho_tuple(AlgebraSpec(SO, 5)) == (1.5, 0.5, 0.0, -0.5, -1.5)


def test_epsilon_signs():
    assert epsilon_sign(AlgebraSpec(SP, 4), 2) == 1
    assert epsilon_sign(AlgebraSpec(SP, 4), 3) == -1
    assert epsilon_sign(AlgebraSpec(SO, 5), 4) == 1
    with pytest.raises(IndexOutOfRange):
        epsilon_sign(AlgebraSpec(SO, 3), 4)


def test_bar_examples():
    assert bar(1, 3) == 3
    assert bar(2, 3) == 2
    assert bar(4, 4) == 1
    with pytest.raises(IndexOutOfRange):
        bar(0, 3)


def test_bar_is_involution():
    for n in range(1, 13):
        for i in range(1, n + 1):
            assert bar(bar(i, n), n) == i


def test_coupling_sign():
    assert coupling_sign(AlgebraSpec(SO, 5, 1.4)) == 1
    assert coupling_sign(AlgebraSpec(SP, 6, 1.4)) == -1
    weights = psi_weights(AlgebraSpec(SP, 6, 1.4))
    np.testing.assert_allclose(weights * weights[::-1], -1.0, atol=1e-12)


@pytest.mark.parametrize("family,n,q", [(SO, 2, 1.0), (SP, 3, 1.0), (SP, 0, 1.0), (SO, 3, -1.0), (SO, 3, 0.0)])
def test_invalid_specs(family, n, q):
    with pytest.raises(InvalidSpec):
        AlgebraSpec(family, n, q)


def test_from_label():
    assert AlgebraSpec.from_label("SO(4)", 2.0) == AlgebraSpec(SO, 4, 2.0)
    assert AlgebraSpec.from_label("sp6").family is SP
    with pytest.raises(InvalidSpec):
        AlgebraSpec.from_label("su3")
