"""
tlchain - q-арифметика
q-скобки, константа петли k, параметры быстроты η/λ, коэффициент ω(θ),
ρ-наборы, ε-знаки и сопряжение индексов
"""

import cmath
import logging
import math
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Union

import numpy as np

from tlchain.utils.errors import (
    DegenerateLoopConstant,
    IndexOutOfRange,
    InvalidSpec,
    PoleAtRapidity,
)

logger = logging.getLogger(__name__)

Scalar = Union[float, complex]

# Порог полюса sinh(η + θ)
POLE_TOLERANCE = 1e-300


class Family(str, Enum):
    """Семейство алгебры: SÔ(N) или Sp̂(N)"""
    ORTHOGONAL = "so"
    SYMPLECTIC = "sp"


class Sign(str, Enum):
    """Ветвь η: plus выбирает sinh η > 0"""
    PLUS = "plus"
    MINUS = "minus"

    @property
    def factor(self) -> int:
        return 1 if self is Sign.PLUS else -1


# Человекочитаемые имена семейств
FAMILY_NAMES = {
    Family.ORTHOGONAL: "SÔ",
    Family.SYMPLECTIC: "Sp̂",
}

_LABEL_RE = re.compile(r"^\s*(so|sp)\s*\(?\s*(\d+)\s*\)?\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class AlgebraSpec:
    """
    Точка параметров (семейство, N, q), из которой выводится всё остальное

    Raises:
        InvalidSpec: SÔ с N < 3, Sp̂ с нечётным N или N < 2, q ≤ 0
    """
    family: Family
    n: int
    q: float = 1.0

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)

        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise InvalidSpec(f"N должно быть целым, получено {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

        if family is Family.ORTHOGONAL and self.n < 3:
            raise InvalidSpec(f"SÔ(N) требует N ≥ 3, получено N={self.n}")
        if family is Family.SYMPLECTIC and (self.n < 2 or self.n % 2):
            raise InvalidSpec(f"Sp̂(N) требует чётное N ≥ 2, получено N={self.n}")

        q = float(self.q)
        if not math.isfinite(q) or q <= 0:
            raise InvalidSpec(f"q должно быть положительным вещественным, получено {self.q!r}")
        object.__setattr__(self, "q", q)

    @classmethod
    def from_label(cls, label: str, q: float = 1.0) -> "AlgebraSpec":
        """Разбирает метки вида "so3", "SO(4)", "sp4" """
        match = _LABEL_RE.match(label)
        if not match:
            raise InvalidSpec(f"Не удалось разобрать метку алгебры: {label!r}")
        return cls(Family(match.group(1).lower()), int(match.group(2)), q)

    @property
    def epsilon(self) -> int:
        """Знак семейства: +1 для SÔ, −1 для Sp̂"""
        return 1 if self.family is Family.ORTHOGONAL else -1

    @property
    def label(self) -> str:
        return f"{FAMILY_NAMES[self.family]}({self.n})"

    def with_q(self, q: float) -> "AlgebraSpec":
        return replace(self, q=q)


@dataclass(frozen=True)
class RapidityParams:
    """Константа петли k, быстрота η, коэффициент λ и выбранная ветвь"""
    k: float
    eta: float
    sinh_eta: float
    lam: float
    sign: Sign


def q_bracket(m: int, q: float) -> float:
    """
    q-скобка [m] = (q^m − q^{−m})/(q − q^{−1})

    Считается как e^{(|m|−1)a}·(1 − e^{−2|m|a})/(1 − e^{−2a}), a = |ln q|;
    при q = 1 возвращает предел m.

    Raises:
        InvalidSpec: Значение не представимо в float
    """
    a = abs(math.log(q))
    if a == 0.0:
        return float(m)
    size = abs(m)
    try:
        value = math.exp((size - 1) * a) * math.expm1(-2 * size * a) / math.expm1(-2 * a)
    except OverflowError:
        value = math.inf
    if math.isinf(value):
        raise InvalidSpec(f"[{m}] при q = {q:g} выходит за пределы float")
    return math.copysign(value, m) if m else 0.0


def loop_constant(spec: AlgebraSpec) -> float:
    """
    Константа петли k: [N−1]+1 для SÔ(N), [N+1]−1 для Sp̂(N)
    """
    if spec.family is Family.ORTHOGONAL:
        return q_bracket(spec.n - 1, spec.q) + 1.0
    return q_bracket(spec.n + 1, spec.q) - 1.0


def rapidity_params(spec: AlgebraSpec, sign: Sign = Sign.PLUS) -> RapidityParams:
    """
    Параметры быстроты: cosh η = k/2, λ = −1/sinh η = ∓2/√(k²−4)

    Args:
        spec: Параметры алгебры
        sign: Ветвь η (plus: sinh η > 0)

    Returns:
        RapidityParams

    Raises:
        DegenerateLoopConstant: Если k ≤ 2
    """
    sign = Sign(sign)
    k = loop_constant(spec)
    if k <= 2.0:
        raise DegenerateLoopConstant(
            f"{spec.label} при q={spec.q:g}: k={k:.12g} ≤ 2, быстрота η не определена"
        )

    root = math.sqrt(k * k - 4.0)
    eta = sign.factor * math.acosh(k / 2.0)
    sinh_eta = sign.factor * root / 2.0
    lam = -1.0 / sinh_eta

    logger.debug(f"{spec.label}, q={spec.q:g}: k={k:.6g}, η={eta:.6g}, λ={lam:.6g}")
    return RapidityParams(k=k, eta=eta, sinh_eta=sinh_eta, lam=lam, sign=sign)


def omega(theta: Scalar, eta: float) -> Scalar:
    """
    Коэффициент матрицы кос ω(θ) = sinh(η−θ)/sinh(η+θ) − 1

    Для комплексного θ результат комплексный.

    Raises:
        PoleAtRapidity: Если |sinh(η+θ)| < POLE_TOLERANCE
    """
    if isinstance(theta, complex):
        denominator = cmath.sinh(eta + theta)
        numerator = cmath.sinh(eta - theta)
    else:
        denominator = math.sinh(eta + theta)
        numerator = math.sinh(eta - theta)

    if abs(denominator) < POLE_TOLERANCE:
        raise PoleAtRapidity(f"Полюс ω: sinh(η+θ)=0 при η={eta:g}, θ={theta}")
    return numerator / denominator - 1


def verify_omega_identity(theta: float, theta_prime: float, eta: float) -> float:
    """
    Невязка функционального уравнения ω + ω′ + ωω′ − ω″ + k^{−2}ωω′ω″,
    где ω″ = ω(θ+θ′) и k = 2 cosh η
    """
    k = 2.0 * math.cosh(eta)
    w = omega(theta, eta)
    w_prime = omega(theta_prime, eta)
    w_double = omega(theta + theta_prime, eta)
    return abs(w + w_prime + w * w_prime - w_double + w * w_prime * w_double / k**2)


def rho_tuple(spec: AlgebraSpec) -> tuple[float, ...]:
    """
    ρ-набор:
    SO(2n+1): (n−½, …, ½, 0, −½, …, −n+½)
    SO(2n):   (n−1, …, 1, 0, 0, −1, …, −n+1)
    Sp(2n):   (n, …, 1, −1, …, −n)
    """
    half = spec.n // 2
    if spec.family is Family.SYMPLECTIC:
        upper = [float(half - i) for i in range(half)]
        return tuple(upper + [-r for r in reversed(upper)])

    if spec.n % 2:
        upper = [half - i - 0.5 for i in range(half)]
        return tuple(upper + [0.0] + [-r for r in reversed(upper)])

    upper = [float(half - 1 - i) for i in range(half)]
    return tuple(upper + [-r for r in reversed(upper)])


def epsilon_sign(spec: AlgebraSpec, i: int) -> int:
    """
    ε_i: всегда +1 для SÔ; для Sp̂ +1 при i ≤ N/2, иначе −1

    Raises:
        IndexOutOfRange: Если i вне 1..N
    """
    _check_index(i, spec.n)
    if spec.family is Family.ORTHOGONAL:
        return 1
    return 1 if i <= spec.n // 2 else -1


def bar(i: int, n: int) -> int:
    """Сопряжённый индекс ī = N − i + 1"""
    _check_index(i, n)
    return n - i + 1


def psi_weight_exponents(spec: AlgebraSpec) -> tuple[int, ...]:
    """Целые показатели e_i, для которых вес |i ī⟩ в |Ψ⟩ равен ε_i·(√q)^{e_i}"""
    return tuple(int(round(-2 * rho)) for rho in rho_tuple(spec))


def psi_weights(spec: AlgebraSpec) -> np.ndarray:
    """Ненормированные веса a_i = ε_i q^{−ρ_i} при |i ī⟩ в |Ψ⟩"""
    signs = np.array([epsilon_sign(spec, i) for i in range(1, spec.n + 1)], dtype=float)
    rho = np.array(rho_tuple(spec))
    return signs * spec.q ** (-rho)


def coupling_sign(spec: AlgebraSpec) -> int:
    """s = a_i a_ī: +1 для SÔ, −1 для Sp̂ (одинаково для всех i)"""
    return spec.epsilon


def _check_index(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise IndexOutOfRange(f"Индекс {i} вне диапазона 1..{n}")
