import math

import numpy as np
import pytest

from tlchain.utils.chain import Boundary, ChainSpec, StateVector, build_hamiltonian, expectation, h_prime
from tlchain.utils.errors import DegenerateLoopConstant, DimensionCapExceeded, InvalidSpec, SiteOutOfRange
from tlchain.utils.evolution import (
    H4_BASIS_PAIRED,
    H4_BASIS_UNPAIRED,
    ExactPropagator,
    Parity,
    block_propagator,
    evolve_exact,
    evolve_series,
    h3_power_closed_form,
    h4_pattern_states,
    h4_power_action,
    loop_phase,
    series_norm_drift,
    wavefront_multiplicities,
)
from tlchain.utils.projector import psi_vector
from tlchain.utils.qnum import AlgebraSpec, Family, Sign, bar, coupling_sign, loop_constant

SO, SP = Family.ORTHOGONAL, Family.SYMPLECTIC


def chain_of(family, n, q, length, boundary=Boundary.OPEN, sign=Sign.PLUS):
    return ChainSpec(AlgebraSpec(family, n, q), length, boundary, sign)


def random_state(chain, seed):
    rng = np.random.default_rng(seed)
    vector = rng.standard_normal(chain.dim) + 1j * rng.standard_normal(chain.dim)
    return StateVector(chain, vector).normalized()


def test_series_at_zero_time_is_identity():
    chain = chain_of(SO, 3, 1.3, 4)
    state = random_state(chain, 1)
    for order in (0, 3, 7):
        np.testing.assert_array_equal(evolve_series(chain, state, 0.0, order).amplitudes, state.amplitudes)


@pytest.mark.parametrize("family,n,q,length", [(SO, 3, 1.3, 4), (SP, 4, 1.1, 3), (SO, 4, 0.9, 3)])
@pytest.mark.parametrize("sign", [Sign.PLUS, Sign.MINUS])
def test_series_converges_to_exact(family, n, q, length, sign):
    chain = chain_of(family, n, q, length, sign=sign)
    state = random_state(chain, 2)
    t = 0.05
    series = evolve_series(chain, state, t, order=30)
    exact = evolve_exact(chain, state, t)
    np.testing.assert_allclose(series.amplitudes, exact.amplitudes, atol=1e-10)


@pytest.mark.parametrize("t", [0.02, 0.1])
def test_twelfth_order_series_on_six_site_chain(t):
    chain = chain_of(SO, 3, 1.0, 6)
    state = random_state(chain, 6)
    series = evolve_series(chain, state, t, order=12)
    exact = evolve_exact(chain, state, t)
    np.testing.assert_allclose(series.amplitudes, exact.amplitudes, atol=1e-10)


@pytest.mark.parametrize("boundary", [Boundary.OPEN, Boundary.CLOSED])
def test_exact_evolution_conserves_norm_and_energy(boundary):
    chain = chain_of(SO, 3, 1.5, 4, boundary)
    state = random_state(chain, 3)
    hamiltonian = build_hamiltonian(chain)
    propagator = ExactPropagator(chain)
    energy = expectation(hamiltonian, state).real

    for t in (0.3, 1.0, 4.5):
        evolved = propagator.evolve(state, t)
        assert evolved.norm() == pytest.approx(1.0, abs=1e-12)
        assert expectation(hamiltonian, evolved).real == pytest.approx(energy, abs=1e-10)


def test_exact_propagator_respects_dense_cap():
    with pytest.raises(DimensionCapExceeded):
        ExactPropagator(chain_of(SO, 3, 1.0, 5), dense_cap=100)


def test_series_requires_rapidity_and_order():
    chain = chain_of(SP, 2, 1.0, 3)
    with pytest.raises(DegenerateLoopConstant):
        evolve_series(chain, StateVector.basis(chain, (1, 2, 1)), 0.1)
    with pytest.raises(InvalidSpec):
        evolve_series(chain_of(SO, 3, 1.0, 3), StateVector.basis(chain_of(SO, 3, 1.0, 3), (1, 1, 1)), 0.1, -1)


def test_series_norm_drift_small_at_short_time():
    chain = chain_of(SO, 3, 1.2, 4)
    state = StateVector.basis(chain, (3, 1, 1, 1))
    drift, next_term = series_norm_drift(chain, state, 0.01, order=5)
    assert drift < 1e-8
    assert next_term < 1e-8


def test_loop_phase_on_psi_eigenline():
    chain = chain_of(SO, 3, 1.4, 2)
    psi = StateVector(chain, psi_vector(chain.spec)).normalized()
    evolved = evolve_exact(chain, psi, 0.8)
    np.testing.assert_allclose(evolved.amplitudes, loop_phase(chain, 0.8) * psi.amplitudes, atol=1e-12)


def _psi_then_site(chain, i):
    n = chain.n
    return np.kron(psi_vector(chain.spec), np.eye(n)[i - 1])


def _site_then_psi(chain, i):
    n = chain.n
    return np.kron(np.eye(n)[i - 1], psi_vector(chain.spec))


@pytest.mark.parametrize("family,n,q", [(SO, 3, 1.4), (SP, 4, 1.2)])
@pytest.mark.parametrize("i", [1, 2])
def test_three_site_power_closed_form(family, n, q, i):
    chain = chain_of(family, n, q, 3)
    k = loop_constant(chain.spec)
    s = coupling_sign(chain.spec)
    operator = h_prime(chain)
    vector = _psi_then_site(chain, i).astype(complex)

    for p in range(1, 9):
        vector = operator.matvec(vector)
        a_p, b_p = h3_power_closed_form(p, k, s)
        expected = a_p * _psi_then_site(chain, i) + b_p * _site_then_psi(chain, i)
        np.testing.assert_allclose(vector, expected, rtol=1e-12, atol=1e-12 * k ** p)


def test_three_site_closed_form_so3_values():
    k = 3.0
    assert h3_power_closed_form(1, k) == (3.0, 1.0)
    assert h3_power_closed_form(2, k) == (10.0, 6.0)
    assert h3_power_closed_form(0, k) == (1.0, 0.0)


def _power_of_shifted(chain, vector, power):
    k = loop_constant(chain.spec)
    operator = h_prime(chain)
    for _ in range(power):
        vector = operator.matvec(vector) - k * vector
    return vector


@pytest.mark.parametrize("family,n,q,i,j", [(SO, 3, 1.3, 1, 1), (SO, 3, 0.8, 2, 1), (SP, 4, 1.2, 1, 2)])
def test_four_site_unpaired_power_laws(family, n, q, i, j):
    chain = chain_of(family, n, q, 4)
    u, sandwich = h4_pattern_states(chain, i, j)

    for order in range(1, 4):
        for parity in (Parity.EVEN, Parity.ODD):
            action = h4_power_action(order, parity, loop_constant(chain.spec), coupling_sign(chain.spec))
            assert action.basis == H4_BASIS_UNPAIRED
            expected = action.coefficients[0] * u.amplitudes + action.coefficients[1] * sandwich.amplitudes
            result = _power_of_shifted(chain, u.amplitudes, action.power)
            np.testing.assert_allclose(result, expected, atol=1e-10)


def test_four_site_unpaired_coefficients():
    assert h4_power_action(1, Parity.EVEN, 3.0).coefficients == (2.0, 0.0)
    assert h4_power_action(3, Parity.EVEN, 3.0).coefficients == (8.0, 0.0)
    assert h4_power_action(2, Parity.ODD, 3.0, coupling=-1).coefficients == (0.0, -2.0)
    assert h4_power_action(2, Parity.ODD, 3.0).power == 3


@pytest.mark.parametrize("family,n,q,i", [(SO, 3, 1.3, 1), (SO, 3, 1.0, 2), (SP, 4, 1.2, 1), (SP, 4, 0.9, 2)])
def test_four_site_paired_closure(family, n, q, i):
    chain = chain_of(family, n, q, 4)
    j = bar(i, chain.n)
    states = h4_pattern_states(chain, i, j)
    assert len(states) == 4
    k = loop_constant(chain.spec)
    s = coupling_sign(chain.spec)
    weight = chain.weights[i - 1]

    for order in range(1, 4):
        for parity in (Parity.EVEN, Parity.ODD):
            action = h4_power_action(order, parity, k, s, paired=True, weight=weight)
            assert action.basis == H4_BASIS_PAIRED
            expected = sum(c * state.amplitudes for c, state in zip(action.coefficients, states))
            result = _power_of_shifted(chain, states[0].amplitudes, action.power)
            np.testing.assert_allclose(result, expected, rtol=1e-10, atol=1e-10 * k ** action.power)


@pytest.mark.parametrize(
    "family,n,q,i,j",
    [(SO, 3, 1.3, 1, 1), (SO, 3, 1.3, 1, 3), (SO, 3, 0.7, 2, 2), (SP, 4, 1.2, 1, 2), (SP, 4, 1.2, 1, 4)],
)
@pytest.mark.parametrize("sign", [Sign.PLUS, Sign.MINUS])
def test_block_propagator_matches_exact(family, n, q, i, j, sign):
    chain = chain_of(family, n, q, 4, sign=sign)
    initial = h4_pattern_states(chain, i, j)[0]
    for t in (0.2, 1.1):
        fast = block_propagator(chain, i, j, t)
        exact = evolve_exact(chain, initial, t)
        np.testing.assert_allclose(fast.amplitudes, exact.amplitudes, atol=1e-10)


def test_block_propagator_needs_open_four_site_chain():
    with pytest.raises(InvalidSpec):
        block_propagator(chain_of(SO, 3, 1.3, 5), 1, 1, 0.1)
    with pytest.raises(InvalidSpec):
        block_propagator(chain_of(SO, 3, 1.3, 4, Boundary.CLOSED), 1, 1, 0.1)


def test_block_propagator_unpaired_trigonometric_form():
    chain = chain_of(SO, 3, 1.0, 4)
    u, sandwich = h4_pattern_states(chain, 1, 1)
    lam = build_hamiltonian(chain).lam
    t = 0.4
    mu = lam * t
    expected = np.exp(-1j * lam * 3.0 * t) * (
        math.cos(math.sqrt(2) * mu) * u.amplitudes
        - 1j * math.sin(math.sqrt(2) * mu) / math.sqrt(2) * sandwich.amplitudes
    )
    np.testing.assert_allclose(block_propagator(chain, 1, 1, t).amplitudes, expected, atol=1e-12)


def test_wavefront_multiplicities():
    assert wavefront_multiplicities(10, 1) == (1,)
    assert wavefront_multiplicities(10, 2) == (1, 2, 1)
    assert wavefront_multiplicities(10, 3) == (1, 3, 5, 3, 1)
    assert wavefront_multiplicities(10, 4) == (1, 3, 6, 8, 6, 3, 1)


def test_wavefront_clipped_by_chain_end():
    assert wavefront_multiplicities(1, 3, chain_length=6) == (4, 3, 1)
    with pytest.raises(SiteOutOfRange):
        wavefront_multiplicities(6, 3, chain_length=6)
    with pytest.raises(InvalidSpec):
        wavefront_multiplicities(3, 0)
