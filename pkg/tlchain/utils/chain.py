"""
tlchain - Цепочки Темперли-Либа
Генераторы Xₗ/X′ₗ, гамильтониан открытой и замкнутой цепочки
на пространстве N^r и их безматричное применение к состояниям
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Iterable, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from tlchain.utils.errors import (
    DimensionCapExceeded,
    IndexOutOfRange,
    InvalidSpec,
    SiteOutOfRange,
)
from tlchain.utils.projector import build_p0_prime, operator_to_frame
from tlchain.utils.qnum import (
    AlgebraSpec,
    Sign,
    bar,
    loop_constant,
    psi_weights,
    rapidity_params,
)

logger = logging.getLogger(__name__)

# Лимиты по умолчанию (переопределяются конфигурацией)
DEFAULT_DIM_CAP = 20_000_000
DEFAULT_DENSE_CAP = 4096
# Плотный экспорт операторов цепочки
DENSE_EXPORT_MAX_LENGTH = 4


class Boundary(str, Enum):
    OPEN = "open"
    CLOSED = "closed"


class OperatorKind(str, Enum):
    X = "X"
    X_PRIME = "X_prime"
    H = "H"
    H_PRIME = "H_prime"


@dataclass(frozen=True)
class ChainSpec:
    """
    Цепочка длины r над алгеброй spec

    Raises:
        InvalidSpec: r < 2
        DimensionCapExceeded: N^r больше dim_cap
    """
    spec: AlgebraSpec
    length: int
    boundary: Boundary = Boundary.OPEN
    sign: Sign = Sign.PLUS
    dim_cap: int = field(default=DEFAULT_DIM_CAP, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        object.__setattr__(self, "sign", Sign(self.sign))
        if self.length < 2:
            raise InvalidSpec(f"Длина цепочки должна быть ≥ 2, получено {self.length}")
        if self.dim > self.dim_cap:
            raise DimensionCapExceeded(
                f"N^r = {self.spec.n}^{self.length} = {self.dim} превышает лимит {self.dim_cap}"
            )

    @property
    def n(self) -> int:
        return self.spec.n

    @property
    def dim(self) -> int:
        return self.spec.n ** self.length

    @property
    def closed(self) -> bool:
        return self.boundary is Boundary.CLOSED

    @property
    def sites(self) -> list[int]:
        """Номера генераторов: 1..r−1, для замкнутой цепочки ещё r (пара (r, 1))"""
        last = self.length if self.closed else self.length - 1
        return list(range(1, last + 1))

    @property
    def weights(self) -> np.ndarray:
        return psi_weights(self.spec)

    def pair(self, site: int) -> tuple[int, int]:
        """Пара узлов, на которую действует генератор site"""
        self.check_site(site)
        return (site, site % self.length + 1)

    def check_site(self, site: int) -> None:
        if site not in self.sites:
            raise SiteOutOfRange(
                f"Узел {site} вне диапазона генераторов {self.sites[0]}..{self.sites[-1]} "
                f"({self.boundary.value} цепочка длины {self.length})"
            )


def encode_index(labels: Sequence[int], n: int) -> int:
    """
    Метки (i₁, …, i_r) → индекс в базисе N^r (старший разряд: первый узел)

    Raises:
        IndexOutOfRange: Метка вне 1..N
    """
    index = 0
    for label in labels:
        if not 1 <= label <= n:
            raise IndexOutOfRange(f"Метка {label} вне диапазона 1..{n}")
        index = index * n + (label - 1)
    return index


def decode_index(index: int, n: int, length: int) -> tuple[int, ...]:
    """Обратное преобразование к encode_index"""
    if not 0 <= index < n ** length:
        raise IndexOutOfRange(f"Индекс {index} вне диапазона 0..{n ** length - 1}")
    labels = []
    for _ in range(length):
        index, digit = divmod(index, n)
        labels.append(digit + 1)
    return tuple(reversed(labels))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Амплитуды по базису |i₁…i_r⟩"""
    chain: ChainSpec
    amplitudes: np.ndarray

    def __post_init__(self):
        amplitudes = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amplitudes.size != self.chain.dim:
            raise InvalidSpec(
                f"Длина вектора {amplitudes.size} не равна N^r = {self.chain.dim}"
            )
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def zeros(cls, chain: ChainSpec) -> "StateVector":
        return cls(chain, np.zeros(chain.dim, dtype=np.complex128))

    @classmethod
    def basis(cls, chain: ChainSpec, labels: Sequence[int]) -> "StateVector":
        if len(labels) != chain.length:
            raise InvalidSpec(f"Ожидалось {chain.length} меток, получено {len(labels)}")
        amplitudes = np.zeros(chain.dim, dtype=np.complex128)
        amplitudes[encode_index(labels, chain.n)] = 1.0
        return cls(chain, amplitudes)

    @classmethod
    def product(cls, chain: ChainSpec, factors: Sequence[np.ndarray]) -> "StateVector":
        """|x⟩₁⊗…⊗|x⟩_r"""
        if len(factors) != chain.length:
            raise InvalidSpec(f"Ожидалось {chain.length} сомножителей, получено {len(factors)}")
        return cls(chain, reduce(np.kron, [np.asarray(f, dtype=np.complex128) for f in factors]))

    @classmethod
    def from_records(cls, chain: ChainSpec, records: Iterable[dict]) -> "StateVector":
        amplitudes = np.zeros(chain.dim, dtype=np.complex128)
        for record in records:
            labels = record["labels"]
            if len(labels) != chain.length:
                raise InvalidSpec(f"Запись {record!r}: ожидалось {chain.length} меток")
            amplitudes[encode_index(labels, chain.n)] += complex(record["re"], record["im"])
        return cls(chain, amplitudes)

    def to_records(self) -> list[dict]:
        """Список {labels, re, im} без нулевых амплитуд, в порядке индексов"""
        records = []
        for index in np.flatnonzero(self.amplitudes):
            value = self.amplitudes[index]
            records.append({
                "labels": list(decode_index(int(index), self.chain.n, self.chain.length)),
                "re": float(value.real),
                "im": float(value.imag),
            })
        return records

    def amplitude(self, labels: Sequence[int]) -> complex:
        return complex(self.amplitudes[encode_index(labels, self.chain.n)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = 1e-10) -> bool:
        return abs(self.norm() ** 2 - 1.0) < tol

    def normalized(self) -> "StateVector":
        return StateVector(self.chain, self.amplitudes / self.norm())


def _accumulate_pair(
    chain: ChainSpec,
    site: int,
    block: np.ndarray,
    out: np.ndarray,
    coeff: float
) -> None:
    """
    out += coeff·P₀′ₗ·block для блока столбцов формы (N^r, B)

    P₀′ ненулевой только на парах (i, ī): w = Σ a_i v[…, i, ī, …],
    затем w разносится по |j j̄⟩ с весами a_j.
    """
    n = chain.n
    a = chain.weights
    idx = np.arange(n)
    bar_idx = idx[::-1]

    if site < chain.length:
        v = block.reshape(n ** (site - 1), n, n, -1)
        o = out.reshape(v.shape)
        w = np.einsum("i,lir->lr", a, v[:, idx, bar_idx, :])
        o[:, idx, bar_idx, :] += coeff * np.einsum("j,lr->ljr", a, w)
    else:
        # Пара (r, 1): первый сомножитель |Ψ⟩ стоит на узле r
        v = block.reshape(n, n ** (chain.length - 2), n, -1)
        o = out.reshape(v.shape)
        w = np.einsum("i,imr->mr", a, v[bar_idx, :, idx, :])
        o[bar_idx, :, idx, :] += coeff * np.einsum("j,mr->jmr", a, w)


class ChainOperator(LinearOperator):
    """
    Безматричный оператор цепочки: Xₗ, X′ₗ, H = λH′ или H′

    Все варианты вещественно-симметричны, поэтому сопряжённый совпадает с самим оператором.
    """

    def __init__(self, chain: ChainSpec, kind: OperatorKind, site: Optional[int] = None):
        self.chain = chain
        self.kind = OperatorKind(kind)
        self.site = site
        self.lam = None

        if self.kind in (OperatorKind.X, OperatorKind.X_PRIME):
            if site is None:
                raise SiteOutOfRange("Для генератора нужно указать узел")
            chain.check_site(site)
            scale = 1.0 if self.kind is OperatorKind.X_PRIME else 1.0 / loop_constant(chain.spec)
            self._terms = [(site, scale)]
        else:
            scale = 1.0
            if self.kind is OperatorKind.H:
                self.lam = rapidity_params(chain.spec, chain.sign).lam
                scale = self.lam
            self._terms = [(s, scale) for s in chain.sites]

        super().__init__(dtype=np.complex128, shape=(chain.dim, chain.dim))

    def _matmat(self, block: np.ndarray) -> np.ndarray:
        block = np.asarray(block, dtype=np.complex128).reshape(self.chain.dim, -1)
        out = np.zeros_like(block)
        for site, coeff in self._terms:
            _accumulate_pair(self.chain, site, block, out, coeff)
        return out

    def _matvec(self, vector: np.ndarray) -> np.ndarray:
        return self._matmat(np.asarray(vector).reshape(-1, 1)).reshape(-1)

    def _adjoint(self) -> "ChainOperator":
        return self

    def prime(self) -> "ChainOperator":
        """H′ для гамильтониана H"""
        return ChainOperator(self.chain, OperatorKind.H_PRIME)

    def apply(self, state: StateVector) -> StateVector:
        return StateVector(self.chain, self.matvec(state.amplitudes))


def apply_generator(
    chain: ChainSpec,
    site: int,
    state: StateVector,
    primed: bool = False
) -> StateVector:
    """
    Xₗ|state⟩ (или X′ₗ при primed) без построения матрицы

    Raises:
        SiteOutOfRange: Узел вне 1..r−1 (1..r для замкнутой цепочки)
    """
    kind = OperatorKind.X_PRIME if primed else OperatorKind.X
    return ChainOperator(chain, kind, site).apply(state)


def build_hamiltonian(chain: ChainSpec) -> ChainOperator:
    """
    H = λ Σₗ X′ₗ; для замкнутой цепочки добавляется член пары (r, 1)

    Raises:
        DegenerateLoopConstant: k ≤ 2
    """
    hamiltonian = ChainOperator(chain, OperatorKind.H)
    logger.debug(
        f"Гамильтониан {chain.spec.label}, r={chain.length}, {chain.boundary.value}: "
        f"dim={chain.dim}, λ={hamiltonian.lam:.6g}"
    )
    return hamiltonian


def h_prime(chain: ChainSpec) -> ChainOperator:
    return ChainOperator(chain, OperatorKind.H_PRIME)


def expectation(operator: LinearOperator, state: StateVector) -> complex:
    """⟨ψ|A|ψ⟩"""
    return complex(np.vdot(state.amplitudes, operator.matvec(state.amplitudes)))


def _unit(n: int, i: int, j: int) -> sp.csr_matrix:
    return sp.csr_matrix(([1.0], ([i - 1], [j - 1])), shape=(n, n))


def dense_generator(chain: ChainSpec, site: int, primed: bool = False) -> sp.csr_matrix:
    """
    Явное кронекерово произведение I⊗…⊗P₀⊗…⊗I (разреженная матрица)
    """
    chain.check_site(site)
    n = chain.n
    scale = 1.0 if primed else 1.0 / loop_constant(chain.spec)

    if site < chain.length:
        pair = sp.csr_matrix(build_p0_prime(chain.spec) * scale)
        left = sp.identity(n ** (site - 1), format="csr")
        right = sp.identity(n ** (chain.length - site - 1), format="csr")
        return sp.kron(sp.kron(left, pair), right, format="csr")

    a = chain.weights
    middle = sp.identity(n ** (chain.length - 2), format="csr")
    total = sp.csr_matrix((chain.dim, chain.dim))
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            # a_i a_j |j̄⟩⟨ī|₁ ⊗ I ⊗ |j⟩⟨i|_r
            first = _unit(n, bar(j, n), bar(i, n))
            last = _unit(n, j, i)
            total = total + a[i - 1] * a[j - 1] * scale * sp.kron(sp.kron(first, middle), last)
    return total.tocsr()


def dense_h_prime(chain: ChainSpec) -> sp.csr_matrix:
    return reduce(lambda acc, s: acc + dense_generator(chain, s, primed=True),
                  chain.sites, sp.csr_matrix((chain.dim, chain.dim)))


def dense_hamiltonian(chain: ChainSpec) -> sp.csr_matrix:
    return rapidity_params(chain.spec, chain.sign).lam * dense_h_prime(chain)


def dense_export_frame(chain: ChainSpec, primed: bool = True):
    """Таблица (row, col, re, im) для H′ (или H) при r ≤ 4"""
    if chain.length > DENSE_EXPORT_MAX_LENGTH:
        raise DimensionCapExceeded(
            f"Плотный экспорт поддерживается для r ≤ {DENSE_EXPORT_MAX_LENGTH}, получено r={chain.length}"
        )
    matrix = dense_h_prime(chain) if primed else dense_hamiltonian(chain)
    return operator_to_frame(matrix.toarray())


def _apply_sequence(operators: Sequence[LinearOperator], block: np.ndarray) -> np.ndarray:
    for operator in reversed(operators):
        block = operator.matmat(block)
    return block


def _max_abs(block: np.ndarray) -> float:
    return float(np.max(np.abs(block))) if block.size else 0.0


def commutator_residual(chain: ChainSpec, l: int, m: int) -> float:
    """‖[Xₗ, Xₘ]‖_max по полному базису"""
    sweep = np.eye(chain.dim, dtype=np.complex128)
    xl = ChainOperator(chain, OperatorKind.X, l)
    xm = ChainOperator(chain, OperatorKind.X, m)
    return _max_abs(_apply_sequence([xl, xm], sweep) - _apply_sequence([xm, xl], sweep))


def _adjacent(chain: ChainSpec, l: int, m: int) -> bool:
    return m == chain.pair(l)[1] or l == chain.pair(m)[1]


def verify_tl_relations(chain: ChainSpec) -> dict[str, float]:
    """
    Невязки соотношений Темперли-Либа по полному базисному перебору

    Returns:
        Словарь {соотношение: максимальная невязка по всем узлам}
    """
    k = loop_constant(chain.spec)
    sweep = np.eye(chain.dim, dtype=np.complex128)
    x = {s: ChainOperator(chain, OperatorKind.X, s) for s in chain.sites}
    xp = {s: ChainOperator(chain, OperatorKind.X_PRIME, s) for s in chain.sites}
    single = {s: x[s].matmat(sweep) for s in chain.sites}
    single_p = {s: xp[s].matmat(sweep) for s in chain.sites}

    report = {
        "X_l X_{l+1} X_l - k^-2 X_l": 0.0,
        "X_{l+1} X_l X_{l+1} - k^-2 X_{l+1}": 0.0,
        "X_l^2 - X_l": 0.0,
        "[X_l, X_m], |l-m|>1": 0.0,
        "X'_l X'_{l+1} X'_l - X'_l": 0.0,
        "X'_l^2 - k X'_l": 0.0,
    }

    for s in chain.sites:
        report["X_l^2 - X_l"] = max(report["X_l^2 - X_l"], _max_abs(x[s].matmat(single[s]) - single[s]))
        report["X'_l^2 - k X'_l"] = max(
            report["X'_l^2 - k X'_l"], _max_abs(xp[s].matmat(single_p[s]) - k * single_p[s])
        )

    neighbours = [(s, chain.pair(s)[1]) for s in chain.sites if chain.pair(s)[1] in x]
    if chain.length >= 3:
        for l, m in neighbours:
            triple = _apply_sequence([x[l], x[m], x[l]], sweep)
            mirrored = _apply_sequence([x[m], x[l], x[m]], sweep)
            triple_p = _apply_sequence([xp[l], xp[m], xp[l]], sweep)
            report["X_l X_{l+1} X_l - k^-2 X_l"] = max(
                report["X_l X_{l+1} X_l - k^-2 X_l"], _max_abs(triple - single[l] / k**2)
            )
            report["X_{l+1} X_l X_{l+1} - k^-2 X_{l+1}"] = max(
                report["X_{l+1} X_l X_{l+1} - k^-2 X_{l+1}"], _max_abs(mirrored - single[m] / k**2)
            )
            report["X'_l X'_{l+1} X'_l - X'_l"] = max(
                report["X'_l X'_{l+1} X'_l - X'_l"], _max_abs(triple_p - single_p[l])
            )

    for l in chain.sites:
        for m in chain.sites:
            if m > l and not _adjacent(chain, l, m):
                commutator = _max_abs(x[l].matmat(single[m]) - x[m].matmat(single[l]))
                report["[X_l, X_m], |l-m|>1"] = max(report["[X_l, X_m], |l-m|>1"], commutator)

    logger.debug(f"Соотношения ТЛ для {chain.spec.label}, r={chain.length}: {report}")
    return report


def h_prime_product_coefficients(chain: ChainSpec, factors: Sequence[np.ndarray]) -> list[complex]:
    """fₗ = Σ_i a_i x_i^{(l)} x_ī^{(l+1)} для каждого генератора"""
    if len(factors) != chain.length:
        raise InvalidSpec(f"Ожидалось {chain.length} сомножителей, получено {len(factors)}")
    a = chain.weights
    coefficients = []
    for site in chain.sites:
        first, second = chain.pair(site)
        x = np.asarray(factors[first - 1])
        y = np.asarray(factors[second - 1])
        coefficients.append(complex(np.sum(a * x * y[::-1])))
    return coefficients


def apply_h_prime_product(chain: ChainSpec, factors: Sequence[np.ndarray]) -> StateVector:
    """
    H′ на произведении |x⟩₁…|x⟩_r: Σₗ fₗ |x⟩₁…|Ψ⟩ₗ,ₗ₊₁…|x⟩_r
    """
    coefficients = h_prime_product_coefficients(chain, factors)
    psi = np.zeros(chain.n * chain.n)
    n = chain.n
    for i in range(1, n + 1):
        psi[(i - 1) * n + bar(i, n) - 1] = chain.weights[i - 1]

    factors = [np.asarray(f, dtype=np.complex128) for f in factors]
    total = np.zeros(chain.dim, dtype=np.complex128)
    for site, f in zip(chain.sites, coefficients):
        if f == 0:
            continue
        if site < chain.length:
            parts = factors[:site - 1] + [psi] + factors[site + 1:]
            total += f * reduce(np.kron, parts)
        else:
            middle = reduce(np.kron, factors[1:-1], np.ones(1))
            for j in range(1, n + 1):
                first = np.eye(n)[bar(j, n) - 1]
                last = np.eye(n)[j - 1]
                total += f * chain.weights[j - 1] * np.kron(np.kron(first, middle), last)
    return StateVector(chain, total)
