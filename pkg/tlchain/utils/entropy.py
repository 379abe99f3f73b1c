"""
tlchain - Энтропия запутанности
Энтропия фон Неймана нормированного |Ψ⟩: прямой расчёт по Шмидту,
замкнутые формулы для SÔ(3), SÔ(4), Sp̂(4), кривые S(q) и разложение около q = 1
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd
from scipy.optimize import brentq
from scipy.special import entr, softmax

from tlchain.utils.errors import InvalidSpec, UnsupportedSpec
from tlchain.utils.projector import psi_state
from tlchain.utils.qnum import AlgebraSpec, Family, rho_tuple

logger = logging.getLogger(__name__)

DEFAULT_Q_MIN = 0.01
DEFAULT_Q_MAX = 100.0
DEFAULT_POINTS = 201
MAX_EXPANSION_EPSILON = 0.05


@dataclass(frozen=True, eq=False)
class EntropyCurve:
    """Выборка (q, S) для семейства и N; натуральный логарифм"""
    family: Family
    n: int
    samples: tuple[tuple[float, float], ...]

    def to_frame(self) -> pd.DataFrame:
        """Колонки в порядке q, S, family, N"""
        return pd.DataFrame({
            "q": [q for q, _ in self.samples],
            "S": [s for _, s in self.samples],
            "family": self.family.value,
            "N": self.n,
        })


def schmidt_weights(spec: AlgebraSpec) -> np.ndarray:
    """
    |a_i|² нормированного |Ψ⟩, посчитанные через softmax(−2ρ ln q)
    (без переполнения при больших q)
    """
    rho = np.array(rho_tuple(spec))
    return softmax(-2.0 * rho * math.log(spec.q))


def schmidt_coefficients(spec: AlgebraSpec) -> np.ndarray:
    """Квадраты сингулярных чисел матрицы коэффициентов |Ψ⟩, по убыванию"""
    matrix = psi_state(spec, normalized=True).coefficient_matrix()
    singular = np.linalg.svd(matrix, compute_uv=False)
    return singular ** 2


def entropy_direct(spec: AlgebraSpec) -> float:
    """
    S = −Σ|a_i|² ln|a_i|², 0·ln 0 = 0
    """
    return float(np.sum(entr(schmidt_weights(spec))))


def entropy_closed_form(spec: AlgebraSpec) -> float:
    """
    Замкнутые формулы для SÔ(3), SÔ(4) и Sp̂(4)

    S(q) = S(1/q), поэтому формулы записаны через a = |ln q| и u = e^{−a} (или e^{−2a}),
    без степеней q: значение конечно при любом q > 0.

    Raises:
        UnsupportedSpec: Для остальных (семейство, N)
    """
    a = abs(math.log(spec.q))
    key = (spec.family, spec.n)

    if key == (Family.ORTHOGONAL, 3):
        # ln(q + 1 + 1/q) − (q − 1/q)·ln q / (q + 1 + 1/q)
        u = math.exp(-a)
        return math.log1p(u + u**2) + a * (u + 2 * u**2) / (1 + u + u**2)
    if key == (Family.ORTHOGONAL, 4):
        # 2 ln(q + 1/q) − 2(q − 1/q)·ln q / (q + 1/q)
        u = math.exp(-2 * a)
        return 2 * math.log1p(u) + 4 * a * u / (1 + u)
    if key == (Family.SYMPLECTIC, 4):
        # ln k − (4(q⁴ − q⁻⁴) + 2(q² − q⁻²))·ln q / k, k = q⁴ + q² + q⁻² + q⁻⁴
        u = math.exp(-2 * a)
        tail = u + u**3 + u**4
        return math.log1p(tail) + a * (2 * u + 6 * u**3 + 8 * u**4) / (1 + tail)

    raise UnsupportedSpec(f"Нет замкнутой формулы энтропии для {spec.label}")


def entropy_curve(
    family: Family,
    n: int,
    q_min: float = DEFAULT_Q_MIN,
    q_max: float = DEFAULT_Q_MAX,
    points: int = DEFAULT_POINTS,
    log_spacing: bool = True
) -> EntropyCurve:
    """
    Кривая S(q) на сетке [q_min, q_max]

    Raises:
        InvalidSpec: q_min ≤ 0, q_min ≥ q_max или points < 2
    """
    if not 0 < q_min < q_max:
        raise InvalidSpec(f"Нужно 0 < q_min < q_max, получено [{q_min}, {q_max}]")
    if points < 2:
        raise InvalidSpec(f"Нужно ≥ 2 точек, получено {points}")

    grid = np.geomspace(q_min, q_max, points) if log_spacing else np.linspace(q_min, q_max, points)
    base = AlgebraSpec(Family(family), n)
    samples = tuple((float(q), entropy_direct(base.with_q(float(q)))) for q in grid)
    logger.debug(f"Кривая энтропии {base.label}: {points} точек на [{q_min:g}, {q_max:g}]")
    return EntropyCurve(family=base.family, n=n, samples=samples)


def expansion_coefficient(spec: AlgebraSpec) -> float:
    """c = 2·Var(ρ): S(q) = ln N − c (ln q)² + O((ln q)⁴)"""
    return 2.0 * float(np.var(np.array(rho_tuple(spec))))


def entropy_expansion_check(
    spec: AlgebraSpec,
    epsilon: float,
    side: str = "minus",
    coefficient: Optional[float] = None
) -> tuple[float, float, float]:
    """
    Сравнение S(1∓ε) с ln N ± c·ε·ln(1∓ε)

    Args:
        spec: Параметры алгебры (q не используется)
        epsilon: 0 < ε ≤ 0.05
        side: "minus" для q = 1−ε, "plus" для q = 1+ε
        coefficient: c; по умолчанию 2·Var(ρ)

    Returns:
        (S, приближение, |разность|)
    """
    if not 0 < epsilon <= MAX_EXPANSION_EPSILON:
        raise InvalidSpec(f"Нужно 0 < ε ≤ {MAX_EXPANSION_EPSILON}, получено {epsilon}")
    if side not in ("minus", "plus"):
        raise InvalidSpec(f"side должно быть 'minus' или 'plus', получено {side!r}")

    c = expansion_coefficient(spec) if coefficient is None else coefficient
    if side == "minus":
        q = 1.0 - epsilon
        approximation = math.log(spec.n) + c * epsilon * math.log(1.0 - epsilon)
    else:
        q = 1.0 + epsilon
        approximation = math.log(spec.n) - c * epsilon * math.log(1.0 + epsilon)

    lhs = entropy_direct(spec.with_q(q))
    return lhs, approximation, abs(lhs - approximation)


def is_entangled(vector: np.ndarray, n: int) -> bool:
    """Ранг матрицы коэффициентов N×N больше 1"""
    matrix = np.asarray(vector).reshape(n, n)
    return int(np.linalg.matrix_rank(matrix)) > 1


def product_state_witness(spec: AlgebraSpec, vector: Optional[np.ndarray] = None) -> bool:
    """
    True, если |Ψ⟩ (или переданный двухузельный вектор) не является произведением состояний
    """
    if vector is None:
        vector = psi_state(spec).vector()
    return is_entangled(vector, spec.n)


def threshold_q(spec: AlgebraSpec, tolerance: float = 1e-3) -> float:
    """Наименьшее q > 1, при котором S(q) = tolerance (S монотонно убывает при q > 1)"""
    def excess(log_q: float) -> float:
        return entropy_direct(spec.with_q(math.exp(log_q))) - tolerance

    upper = 1.0
    while excess(upper) > 0:
        upper *= 2.0
    return math.exp(brentq(excess, 0.0, upper, xtol=1e-12))
