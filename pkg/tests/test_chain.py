from itertools import product

import numpy as np
import pytest

from tlchain.utils.chain import (
    Boundary,
    ChainOperator,
    ChainSpec,
    OperatorKind,
    StateVector,
    apply_generator,
    apply_h_prime_product,
    build_hamiltonian,
    commutator_residual,
    decode_index,
    dense_export_frame,
    dense_generator,
    dense_h_prime,
    dense_hamiltonian,
    encode_index,
    expectation,
    h_prime,
    h_prime_product_coefficients,
    verify_tl_relations,
)
from tlchain.utils.errors import DimensionCapExceeded, IndexOutOfRange, InvalidSpec, SiteOutOfRange
from tlchain.utils.qnum import AlgebraSpec, Family, Sign, loop_constant

SO, SP = Family.ORTHOGONAL, Family.SYMPLECTIC

SMALL_SPECS = [(SO, 3), (SO, 4), (SP, 2), (SP, 4)]


def chain_of(family, n, q, length, boundary=Boundary.OPEN, sign=Sign.PLUS):
    return ChainSpec(AlgebraSpec(family, n, q), length, boundary, sign)


def test_encode_index_examples():
    assert encode_index((1, 1, 1, 1), 3) == 0
    assert encode_index((1, 1, 1, 3), 3) == 2
    assert encode_index((2, 1), 3) == 3


def test_index_codec_round_trip():
    for index in range(4 ** 3):
        assert encode_index(decode_index(index, 4, 3), 4) == index
    for labels in product(range(1, 4), repeat=4):
        assert decode_index(encode_index(labels, 3), 3, 4) == labels


def test_index_codec_rejects_out_of_range():
    with pytest.raises(IndexOutOfRange):
        encode_index((1, 4), 3)
    with pytest.raises(IndexOutOfRange):
        decode_index(81, 3, 4)


def test_generator_annihilates_unpaired_state():
    chain = chain_of(SO, 3, 1.4, 2)
    result = apply_generator(chain, 1, StateVector.basis(chain, (1, 2)), primed=True)
    assert not np.any(result.amplitudes)


def test_primed_generator_on_paired_state():
    q = 1.4
    chain = chain_of(SO, 3, q, 2)
    result = apply_generator(chain, 1, StateVector.basis(chain, (1, 3)), primed=True)
    scale = q ** -0.5
    assert result.amplitude((1, 3)) == pytest.approx(scale * q ** -0.5)
    assert result.amplitude((2, 2)) == pytest.approx(scale * 1.0)
    assert result.amplitude((3, 1)) == pytest.approx(scale * q ** 0.5)
    assert np.count_nonzero(result.amplitudes) == 3


@pytest.mark.parametrize("family,n", SMALL_SPECS)
@pytest.mark.parametrize("length", [2, 3, 4])
@pytest.mark.parametrize("boundary", [Boundary.OPEN, Boundary.CLOSED])
def test_matrix_free_matches_kronecker(family, n, length, boundary):
    if boundary is Boundary.CLOSED and length == 2:
        pytest.skip("замкнутая цепочка из двух узлов дублирует пару")
    chain = chain_of(family, n, 1.3, length, boundary)
    sweep = np.eye(chain.dim)

    for site in chain.sites:
        for primed in (False, True):
            kind = OperatorKind.X_PRIME if primed else OperatorKind.X
            matrix_free = ChainOperator(chain, kind, site).matmat(sweep)
            dense = dense_generator(chain, site, primed).toarray()
            np.testing.assert_allclose(matrix_free, dense, atol=1e-12)

    np.testing.assert_allclose(h_prime(chain).matmat(sweep), dense_h_prime(chain).toarray(), atol=1e-12)


def test_matrix_free_matches_kronecker_so4_r4_all_basis_vectors():
    chain = chain_of(SO, 4, 2.0, 4)
    dense = dense_h_prime(chain).toarray()
    operator = h_prime(chain)
    for index in range(chain.dim):
        basis = np.zeros(chain.dim)
        basis[index] = 1.0
        np.testing.assert_allclose(operator.matvec(basis), dense[:, index], atol=1e-12)


@pytest.mark.parametrize("family,n,q", [(SO, 3, 1.0), (SP, 4, 2.0), (SO, 4, 0.7)])
@pytest.mark.parametrize("boundary", [Boundary.OPEN, Boundary.CLOSED])
def test_tl_relations(family, n, q, boundary):
    chain = chain_of(family, n, q, 3, boundary)
    k = loop_constant(chain.spec)
    for name, residual in verify_tl_relations(chain).items():
        tolerance = 1e-12 * (max(1.0, k) ** 2 if "'" in name else 1.0)
        assert residual < tolerance, name


@pytest.mark.parametrize("length", [3, 4, 5, 6])
def test_tl_relations_longer_so3_chains(length):
    chain = chain_of(SO, 3, 1.25, length)
    k = loop_constant(chain.spec)
    for name, residual in verify_tl_relations(chain).items():
        tolerance = 1e-12 * (k ** 2 if "'" in name else 1.0)
        assert residual < tolerance, name


@pytest.mark.parametrize("family,n,q", [(SO, 4, 1.6), (SP, 4, 0.8)])
def test_tl_relations_four_site_n4(family, n, q):
    chain = chain_of(family, n, q, 4)
    k = loop_constant(chain.spec)
    for name, residual in verify_tl_relations(chain).items():
        tolerance = 1e-12 * (k ** 2 if "'" in name else 1.0)
        assert residual < tolerance, name


def test_distant_generators_commute():
    chain = chain_of(SO, 3, 1.0, 4)
    assert commutator_residual(chain, 1, 3) == pytest.approx(0.0, abs=1e-15)


def test_h_prime_spectrum_two_sites():
    chain = chain_of(SO, 3, 1.0, 2)
    eigenvalues = np.linalg.eigvalsh(dense_h_prime(chain).toarray())
    np.testing.assert_allclose(eigenvalues, [0.0] * 8 + [3.0], atol=1e-12)


@pytest.mark.parametrize("family,n", [(SO, 3), (SP, 4)])
def test_hamiltonian_symmetric_and_sign_regimes(family, n):
    plus = dense_hamiltonian(chain_of(family, n, 1.2, 3, sign=Sign.PLUS)).toarray()
    minus = dense_hamiltonian(chain_of(family, n, 1.2, 3, sign=Sign.MINUS)).toarray()
    np.testing.assert_allclose(plus, plus.T, atol=1e-14)
    np.testing.assert_allclose(
        np.linalg.eigvalsh(plus), -np.linalg.eigvalsh(minus)[::-1], atol=1e-12
    )


@pytest.mark.parametrize("boundary", [Boundary.OPEN, Boundary.CLOSED])
def test_hamiltonian_hermitian_on_random_states(boundary):
    chain = chain_of(SO, 3, 1.7, 5, boundary)
    hamiltonian = build_hamiltonian(chain)
    rng = np.random.default_rng(9)
    u = rng.standard_normal(chain.dim) + 1j * rng.standard_normal(chain.dim)
    v = rng.standard_normal(chain.dim) + 1j * rng.standard_normal(chain.dim)
    lhs = np.vdot(u, hamiltonian.matvec(v))
    rhs = np.conj(np.vdot(v, hamiltonian.matvec(u)))
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))

    state = StateVector(chain, u).normalized()
    assert abs(expectation(hamiltonian, state).imag) < 1e-12


def test_hamiltonian_is_lambda_times_h_prime():
    chain = chain_of(SO, 4, 1.1, 3)
    hamiltonian = build_hamiltonian(chain)
    sweep = np.eye(chain.dim)
    np.testing.assert_allclose(
        hamiltonian.matmat(sweep), hamiltonian.lam * hamiltonian.prime().matmat(sweep), atol=1e-14
    )


def test_h_prime_on_product_state_three_terms():
    q = 1.6
    chain = chain_of(SO, 3, q, 4)
    rng = np.random.default_rng(4)
    a, b, c, d = (rng.standard_normal(3) for _ in range(4))

    coefficients = h_prime_product_coefficients(chain, [a, b, c, d])
    s = q ** 0.5

    def f(x, y):
        return x[0] * y[2] / s + x[1] * y[1] + s * x[2] * y[0]

    np.testing.assert_allclose(coefficients, [f(a, b), f(b, c), f(c, d)], atol=1e-12)

    expected = h_prime(chain).apply(StateVector.product(chain, [a, b, c, d]))
    np.testing.assert_allclose(apply_h_prime_product(chain, [a, b, c, d]).amplitudes, expected.amplitudes, atol=1e-12)


@pytest.mark.parametrize("boundary", [Boundary.OPEN, Boundary.CLOSED])
def test_h_prime_product_random_factors_r5(boundary):
    chain = chain_of(SO, 3, 0.8, 5, boundary)
    rng = np.random.default_rng(21)
    factors = [rng.standard_normal(3) + 1j * rng.standard_normal(3) for _ in range(5)]
    dense = dense_h_prime(chain) @ StateVector.product(chain, factors).amplitudes
    np.testing.assert_allclose(apply_h_prime_product(chain, factors).amplitudes, dense, atol=1e-12)


def test_h_prime_product_all_spin_up_vanishes():
    chain = chain_of(SO, 3, 1.3, 4)
    up = np.array([1.0, 0.0, 0.0])
    assert not np.any(apply_h_prime_product(chain, [up] * 4).amplitudes)


def test_state_records_round_trip():
    chain = chain_of(SO, 3, 1.0, 3)
    state = StateVector(chain, np.zeros(27)).amplitudes
    state[encode_index((3, 1, 1), 3)] = 0.6
    state[encode_index((1, 2, 2), 3)] = 0.8j
    vector = StateVector(chain, state)

    records = vector.to_records()
    assert records == [
        {"labels": [1, 2, 2], "re": 0.0, "im": 0.8},
        {"labels": [3, 1, 1], "re": 0.6, "im": 0.0},
    ]
    restored = StateVector.from_records(chain, records)
    np.testing.assert_array_equal(restored.amplitudes, vector.amplitudes)
    assert restored.is_normalized()


def test_chain_limits():
    with pytest.raises(DimensionCapExceeded):
        ChainSpec(AlgebraSpec(SO, 3), 20, dim_cap=10 ** 6)
    with pytest.raises(InvalidSpec):
        ChainSpec(AlgebraSpec(SO, 3), 1)
    with pytest.raises(SiteOutOfRange):
        apply_generator(chain_of(SO, 3, 1.0, 3), 3, StateVector.basis(chain_of(SO, 3, 1.0, 3), (1, 1, 1)))
    with pytest.raises(InvalidSpec):
        StateVector(chain_of(SO, 3, 1.0, 2), np.zeros(8))


def test_closed_chain_has_wrap_generator():
    chain = chain_of(SO, 3, 1.0, 3, Boundary.CLOSED)
    assert chain.sites == [1, 2, 3]
    assert chain.pair(3) == (3, 1)
    result = apply_generator(chain, 3, StateVector.basis(chain, (1, 2, 3)), primed=True)
    assert result.amplitude((1, 2, 3)) == pytest.approx(1.0)
    assert result.amplitude((2, 2, 2)) == pytest.approx(1.0)
    assert result.amplitude((3, 2, 1)) == pytest.approx(1.0)


def test_dense_export():
    chain = chain_of(SO, 3, 1.0, 2)
    frame = dense_export_frame(chain)
    assert list(frame.columns) == ["row", "col", "re", "im"]
    assert len(frame) == 9
    with pytest.raises(DimensionCapExceeded):
        dense_export_frame(chain_of(SO, 3, 1.0, 5))
