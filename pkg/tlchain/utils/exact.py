"""
tlchain - Точная рациональная арифметика
Веса |Ψ⟩, P₀′ и степени H′ в дробях при рациональном √q (эталонные таблицы)
"""

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from tlchain.utils.errors import InvalidSpec
from tlchain.utils.qnum import AlgebraSpec, Family, bar, epsilon_sign, psi_weight_exponents

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]
ExactState = dict[tuple[int, ...], Fraction]

SIXCHAIN_BACKGROUND = 1
SIXCHAIN_LENGTH = 6
SIXCHAIN_X = {"X1": (3, 1, 1, 1, 1, 1), "X2": (1, 3, 1, 1, 1, 1)}
SIXCHAIN_ENDPOINTS = {"x": (1, 1, 1, 1, 3, 1), "y": (1, 1, 1, 1, 1, 3), "z": (1, 1, 1, 1, 2, 2)}


def exact_sqrt(q: Rational) -> Fraction:
    """
    Точный √q для рационального q

    Raises:
        InvalidSpec: q ≤ 0 или q не является квадратом рационального числа
    """
    q = Fraction(q)
    if q <= 0:
        raise InvalidSpec(f"q должно быть положительным, получено {q}")
    num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if num * num != q.numerator or den * den != q.denominator:
        raise InvalidSpec(f"√q нерационален при q = {q}")
    return Fraction(num, den)


def exact_weights(family: Family, n: int, root: Fraction) -> tuple[Fraction, ...]:
    """a_i = ε_i·root^{e_i}, root = √q"""
    spec = AlgebraSpec(family, n, float(root) ** 2)
    return tuple(
        epsilon_sign(spec, i) * Fraction(root) ** e
        for i, e in enumerate(psi_weight_exponents(spec), start=1)
    )


def exact_loop_constant(family: Family, n: int, root: Fraction) -> Fraction:
    """k = Σ a_i²"""
    return sum((a * a for a in exact_weights(family, n, root)), Fraction(0))


def exact_p0_prime(family: Family, n: int, root: Fraction) -> list[list[Fraction]]:
    """P₀′ как N²×N² таблица дробей (построчный порядок пар)"""
    weights = exact_weights(family, n, root)
    matrix = [[Fraction(0)] * (n * n) for _ in range(n * n)]
    for i in range(1, n + 1):
        row = (i - 1) * n + bar(i, n) - 1
        for j in range(1, n + 1):
            col = (j - 1) * n + bar(j, n) - 1
            matrix[row][col] = weights[i - 1] * weights[j - 1]
    return matrix


def apply_h_prime_exact(
    state: ExactState,
    weights: tuple[Fraction, ...],
    length: int,
    closed: bool = False
) -> ExactState:
    """
    H′ на разреженном состоянии {метки: амплитуда}

    Работает с любыми числами (Fraction, float): P₀′ на паре (i, ī)
    разносит a_i·amp по |j j̄⟩ с весами a_j.
    """
    n = len(weights)
    result: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
    last = length if closed else length - 1

    for labels, amplitude in state.items():
        for site in range(1, last + 1):
            first, second = site - 1, site % length
            i = labels[first]
            if labels[second] != bar(i, n):
                continue
            weight = weights[i - 1] * amplitude
            for j in range(1, n + 1):
                target = list(labels)
                target[first] = j
                target[second] = bar(j, n)
                result[tuple(target)] += weights[j - 1] * weight

    return {labels: value for labels, value in result.items() if value != 0}


def _psi_on(site: int, weights: tuple[Fraction, ...], length: int) -> ExactState:
    n = len(weights)
    state = {}
    for j in range(1, n + 1):
        labels = [SIXCHAIN_BACKGROUND] * length
        labels[site - 1] = j
        labels[site] = bar(j, n)
        state[tuple(labels)] = weights[j - 1]
    return state


@dataclass(frozen=True)
class ExactPowerTable:
    """
    Точные степени H′ на 6-цепочке SÔ(3)

    psi[initial][p−1]: коэффициенты (c₁, …, c₅) при Ψ_l в (H′)^p|initial⟩,
    endpoints[initial][name][p]: амплитуды x, y, z на правом конце,
    closed: (H′)^p|initial⟩ целиком лежит в линейной оболочке Ψ_l.
    """
    root: Fraction
    k: Fraction
    order: int
    psi: dict
    endpoints: dict
    closed: bool


def sixchain_exact_table(root: Rational, order: int = 5) -> ExactPowerTable:
    """
    Таблица (H′)^p|x⟩₁,₂ для p ≤ order в точной арифметике

    Args:
        root: Рациональный √q (например 2 для q = 4)
        order: Максимальная степень
    """
    root = Fraction(root)
    weights = exact_weights(Family.ORTHOGONAL, 3, root)
    k = sum((a * a for a in weights), Fraction(0))
    positions = range(1, SIXCHAIN_LENGTH)
    closed = True
    psi_table = {}
    endpoint_table = {}

    for initial, labels in SIXCHAIN_X.items():
        state: ExactState = {labels: Fraction(1)}
        rows = []
        ends = {name: [] for name in SIXCHAIN_ENDPOINTS}
        for p in range(order + 1):
            for name, end in SIXCHAIN_ENDPOINTS.items():
                ends[name].append(state.get(end, Fraction(0)))
            if p > 0:
                coefficients = []
                for l in positions:
                    marker = [SIXCHAIN_BACKGROUND] * SIXCHAIN_LENGTH
                    marker[l - 1] = marker[l] = 2
                    coefficients.append(state.get(tuple(marker), Fraction(0)) / weights[1])
                rows.append(tuple(coefficients))

                rebuilt: dict[tuple[int, ...], Fraction] = defaultdict(Fraction)
                for l, c in zip(positions, coefficients):
                    for key, value in _psi_on(l, weights, SIXCHAIN_LENGTH).items():
                        rebuilt[key] += c * value
                rebuilt = {key: value for key, value in rebuilt.items() if value != 0}
                closed = closed and rebuilt == state
            state = apply_h_prime_exact(state, weights, SIXCHAIN_LENGTH)
        psi_table[initial] = rows
        endpoint_table[initial] = ends

    logger.debug(f"Точная таблица 6-цепочки: √q={root}, k={k}, замкнутость={closed}")
    return ExactPowerTable(root=root, k=k, order=order, psi=psi_table, endpoints=endpoint_table, closed=closed)
