"""
tlchain - Эволюция во времени
Пропагатор e^{−iHt} усечённым рядом и точной диагонализацией,
замкнутые формы степеней H′ на 3- и 4-узельных блоках,
ускоренный пропагатор 4-узельного блока и учёт фронта волны Ψ
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
import scipy.linalg

from tlchain.utils.chain import (
    DEFAULT_DENSE_CAP,
    Boundary,
    ChainSpec,
    StateVector,
    dense_hamiltonian,
    h_prime,
)
from tlchain.utils.errors import DimensionCapExceeded, InvalidSpec, SiteOutOfRange
from tlchain.utils.qnum import bar, coupling_sign, loop_constant, rapidity_params

logger = logging.getLogger(__name__)

# Коэффициенты ниже порога считаются нулевыми при подсчёте фронта
WAVEFRONT_ZERO = 1e-14


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"


# Базисы замкнутых подпространств 4-узельного блока
H4_BASIS_UNPAIRED = ("iΨj", "Ψij+ijΨ")
H4_BASIS_PAIRED = ("iΨī", "iīΨ+Ψiī", "ΨΨ", "Σa_j·jΨj̄")


@dataclass(frozen=True)
class H4PowerAction:
    """(H′₍₄₎ − k)^power |iΨj⟩ в базисе замкнутого подпространства"""
    power: int
    basis: tuple[str, ...]
    coefficients: tuple[float, ...]


def evolve_series(chain: ChainSpec, state: StateVector, t: float, order: int = 5) -> StateVector:
    """
    Σ_{p≤order} (−iλt)^p/p! (H′)^p |state⟩ повторным безматричным применением H′

    Raises:
        DegenerateLoopConstant: k ≤ 2
        InvalidSpec: order < 0
    """
    if order < 0:
        raise InvalidSpec(f"Порядок ряда должен быть ≥ 0, получено {order}")

    lam = rapidity_params(chain.spec, chain.sign).lam
    operator = h_prime(chain)
    step = -1j * lam * t

    term = state.amplitudes.copy()
    total = term.copy()
    for p in range(1, order + 1):
        term = operator.matvec(term) * (step / p)
        total += term
    return StateVector(chain, total)


class ExactPropagator:
    """
    V e^{−iΛt} V† из разложения вещественно-симметричной H

    Raises:
        DimensionCapExceeded: N^r больше dense_cap
    """

    def __init__(self, chain: ChainSpec, dense_cap: int = DEFAULT_DENSE_CAP):
        if chain.dim > dense_cap:
            raise DimensionCapExceeded(
                f"Точная диагонализация: dim={chain.dim} превышает лимит {dense_cap}"
            )
        self.chain = chain
        hamiltonian = dense_hamiltonian(chain).toarray().real
        self.energies, self.vectors = scipy.linalg.eigh(hamiltonian)
        logger.debug(f"Диагонализация H: dim={chain.dim}, спектр [{self.energies[0]:.6g}, {self.energies[-1]:.6g}]")

    def evolve(self, state: StateVector, t: float) -> StateVector:
        overlaps = self.vectors.T @ state.amplitudes
        return StateVector(self.chain, self.vectors @ (np.exp(-1j * self.energies * t) * overlaps))


def evolve_exact(
    chain: ChainSpec,
    state: StateVector,
    t: float,
    dense_cap: int = DEFAULT_DENSE_CAP
) -> StateVector:
    """Эталонный пропагатор через точную диагонализацию"""
    return ExactPropagator(chain, dense_cap).evolve(state, t)


def h3_power_closed_form(p: int, k: float, coupling: int = 1) -> tuple[float, float]:
    """
    (H′₍₃₎)^p |Ψ⟩|i⟩ = A_p|Ψ⟩|i⟩ + B_p|i⟩|Ψ⟩

    A_p = ½((k+s)^p + (k−s)^p), B_p = ½((k+s)^p − (k−s)^p),
    s: знак связи (+1 для SÔ, −1 для Sp̂).
    """
    if p < 0:
        raise InvalidSpec(f"Степень должна быть ≥ 0, получено {p}")
    plus = (k + coupling) ** p
    minus = (k - coupling) ** p
    return 0.5 * (plus + minus), 0.5 * (plus - minus)


def _h4_paired_matrix(k: float, coupling: int, weight: float) -> np.ndarray:
    # Столбцы: образы iΨī, S, ΨΨ, W под действием (H′₍₄₎ − k)
    s = coupling
    return np.array([
        [0.0, 2 * s, 0.0, 0.0],
        [s, 0.0, 0.0, 0.0],
        [0.0, 2 * weight, k, 2 * s],
        [0.0, 0.0, s, 0.0],
    ])


def h4_power_action(
    n: int,
    parity: Parity,
    k: float,
    coupling: int = 1,
    paired: bool = False,
    weight: float = 1.0
) -> H4PowerAction:
    """
    Степени (H′₍₄₎ − k) на |i⟩|Ψ⟩|j⟩

    Для j ≠ ī: чётная степень 2n даёт 2ⁿ|iΨj⟩,
    нечётная 2n−1 даёт 2^{n−1}·s(|Ψij⟩ + |ijΨ⟩).
    Для j = ī (paired) подпространство расширяется состояниями |ΨΨ⟩
    и Σ_j a_j|jΨj̄⟩; weight: коэффициент a_i.

    Args:
        n: Номер степени (n ≥ 1)
        parity: even для степени 2n, odd для 2n−1
        k: Константа петли
        coupling: Знак связи s
        paired: Случай j = ī
        weight: a_i для случая j = ī

    Returns:
        H4PowerAction
    """
    if n < 1:
        raise InvalidSpec(f"n должно быть ≥ 1, получено {n}")
    parity = Parity(parity)
    power = 2 * n if parity is Parity.EVEN else 2 * n - 1

    if not paired:
        if parity is Parity.EVEN:
            coefficients = (float(2 ** n), 0.0)
        else:
            coefficients = (0.0, float(coupling * 2 ** (n - 1)))
        return H4PowerAction(power=power, basis=H4_BASIS_UNPAIRED, coefficients=coefficients)

    matrix = _h4_paired_matrix(k, coupling, weight)
    vector = np.linalg.matrix_power(matrix, power) @ np.array([1.0, 0.0, 0.0, 0.0])
    return H4PowerAction(
        power=power,
        basis=H4_BASIS_PAIRED,
        coefficients=tuple(float(c) for c in vector),
    )


def _embed(chain: ChainSpec, parts: list[np.ndarray]) -> StateVector:
    vector = parts[0]
    for part in parts[1:]:
        vector = np.kron(vector, part)
    return StateVector(chain, vector)


def h4_pattern_states(chain: ChainSpec, i: int, j: int) -> list[StateVector]:
    """
    Базисные состояния замкнутого подпространства 4-узельного блока для |iΨj⟩

    Returns:
        [iΨj, Ψij+ijΨ] при j ≠ ī, иначе [iΨī, iīΨ+Ψiī, ΨΨ, Σa_j·jΨj̄]
    """
    _check_block(chain)
    n = chain.n
    unit = np.eye(n)
    psi = np.zeros(n * n)
    for m in range(1, n + 1):
        psi[(m - 1) * n + bar(m, n) - 1] = chain.weights[m - 1]

    first = _embed(chain, [unit[i - 1], psi, unit[j - 1]])
    sandwich = _embed(chain, [psi, unit[i - 1], unit[j - 1]]).amplitudes + \
        _embed(chain, [unit[i - 1], unit[j - 1], psi]).amplitudes
    states = [first, StateVector(chain, sandwich)]
    if j != bar(i, n):
        return states

    double = _embed(chain, [psi, psi])
    wrapped = sum(
        chain.weights[m - 1] * _embed(chain, [unit[m - 1], psi, unit[bar(m, n) - 1]]).amplitudes
        for m in range(1, n + 1)
    )
    return states + [double, StateVector(chain, wrapped)]


def _check_block(chain: ChainSpec) -> None:
    if chain.length != 4 or chain.boundary is not Boundary.OPEN:
        raise InvalidSpec("Ускоренный пропагатор определён только для открытого 4-узельного блока")


def block_propagator(chain: ChainSpec, i: int, j: int, t: float) -> StateVector:
    """
    e^{−iHt}|iΨj⟩ на 4-узельном блоке через e^{−iHt} = e^{−iλkt}e^{−iλt(H′−k)}

    Для j ≠ ī: e^{−iλkt}[cos(√2μ)|iΨj⟩ − i sin(√2μ)/√2 · (H′−k)|iΨj⟩], μ = λt.
    Для j = ī экспонента берётся от 4×4 матрицы действия на замкнутом подпространстве.
    """
    _check_block(chain)
    params = rapidity_params(chain.spec, chain.sign)
    k = params.k
    s = coupling_sign(chain.spec)
    mu = params.lam * t
    phase = np.exp(-1j * params.lam * k * t)
    states = h4_pattern_states(chain, i, j)

    if j != bar(i, chain.n):
        root = math.sqrt(2.0)
        coefficients = np.array([
            math.cos(root * mu),
            -1j * s * math.sin(root * mu) / root,
        ])
    else:
        matrix = _h4_paired_matrix(k, s, chain.weights[i - 1])
        coefficients = scipy.linalg.expm(-1j * mu * matrix)[:, 0]

    total = sum(c * state.amplitudes for c, state in zip(coefficients, states))
    return StateVector(chain, phase * total)


def wavefront_multiplicities(
    p_site: int,
    order: int,
    k: float = 3.0,
    chain_length: Optional[int] = None
) -> tuple[int, ...]:
    """
    Число ненулевых вкладов по позициям Ψ (l, l+1), накопленное по порядкам n ≤ order

    Первое применение H к доменной стенке рождает Ψ на стенке; дальше
    каждый порядок переносит коэффициенты матрицей tridiag(1, k, 1).
    Вклад: ненулевое слагаемое T_{j,j′}c_{j′}.

    Args:
        p_site: Положение стенки
        order: Максимальный порядок ряда (≥ 1)
        k: Константа петли
        chain_length: Длина цепочки r (позиции 1..r−1); None без границ

    Returns:
        Кратности по возрастанию позиции
    """
    if order < 1:
        raise InvalidSpec(f"Порядок должен быть ≥ 1, получено {order}")
    if chain_length is not None and not 1 <= p_site <= chain_length - 1:
        raise SiteOutOfRange(f"Стенка {p_site} вне диапазона 1..{chain_length - 1}")

    def inside(position: int) -> bool:
        return chain_length is None or 1 <= position <= chain_length - 1

    counts: dict[int, int] = defaultdict(int)
    counts[p_site] = 1
    coefficients = {p_site: 1.0}

    for _ in range(2, order + 1):
        updated: dict[int, float] = defaultdict(float)
        for source, value in coefficients.items():
            for target, weight in ((source - 1, 1.0), (source, k), (source + 1, 1.0)):
                if not inside(target):
                    continue
                contribution = weight * value
                if abs(contribution) > WAVEFRONT_ZERO:
                    counts[target] += 1
                    updated[target] += contribution
        coefficients = dict(updated)

    return tuple(counts[position] for position in sorted(counts))


def series_norm_drift(chain: ChainSpec, state: StateVector, t: float, order: int) -> tuple[float, float]:
    """
    (|‖ψ_series(t)‖ − ‖ψ(0)‖|, величина следующего члена ряда)
    """
    lam = rapidity_params(chain.spec, chain.sign).lam
    operator = h_prime(chain)
    term = state.amplitudes.copy()
    for _ in range(order + 1):
        term = operator.matvec(term)
    next_term = abs(lam * t) ** (order + 1) / math.factorial(order + 1) * float(np.linalg.norm(term))
    drift = abs(evolve_series(chain, state, t, order).norm() - state.norm())
    return drift, next_term


def loop_phase(chain: ChainSpec, t: float) -> complex:
    """e^{−iλkt}, фаза собственной линии |Ψ⟩"""
    params = rapidity_params(chain.spec, chain.sign)
    return complex(np.exp(-1j * params.lam * loop_constant(chain.spec) * t))
