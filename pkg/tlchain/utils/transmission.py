"""
tlchain - Передача данных по цепочке
Таблица ряда 6-цепочки SÔ(3), прямое моделирование и восстановление
начальных параметров (c₁, c₂) и (a, b, c) по коэффициентам амплитуд на правом конце
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from tlchain.utils.chain import Boundary, ChainSpec, StateVector, h_prime
from tlchain.utils.errors import IllConditionedFit, InvalidSpec
from tlchain.utils.evolution import evolve_series
from tlchain.utils.qnum import AlgebraSpec, Family, Sign, rapidity_params

logger = logging.getLogger(__name__)

SIXCHAIN_LENGTH = 6
DEFAULT_ORDER = 5
# t = 0.01·j, j = 10, 20, …, 80
DEFAULT_T_SAMPLES = tuple(round(0.01 * j, 2) for j in range(10, 81, 10))
# Порог числа обусловленности матрицы Вандермонда
MAX_FIT_CONDITION = 1e12
# Порог относительного сингулярного числа системы (a, b, c)
MIN_DECODE_SINGULAR_RATIO = 1e-9
MAX_DECODE_DELTA = 0.1

# Начальные состояния |x⟩₁ = |1̄1⟩|1111⟩, |x⟩₂ = |11̄⟩|1111⟩ и |22⟩|1111⟩
INITIAL_LABELS = {
    "X1": (3, 1, 1, 1, 1, 1),
    "X2": (1, 3, 1, 1, 1, 1),
    "22": (2, 2, 1, 1, 1, 1),
}

# Состояния, между которыми распределяется эволюция; Psi@lm: |Ψ⟩ на узлах (l, m) на фоне единиц
PATTERNS = (
    "X1", "X2", "Psi@12", "Psi@23", "Psi@34",
    "1b@4", "22@45", "1b@5", "22@56", "1b@6",
)
PATTERN_BASIS = {
    "X1": (3, 1, 1, 1, 1, 1),
    "X2": (1, 3, 1, 1, 1, 1),
    "1b@4": (1, 1, 1, 3, 1, 1),
    "22@45": (1, 1, 1, 2, 2, 1),
    "1b@5": (1, 1, 1, 1, 3, 1),
    "22@56": (1, 1, 1, 1, 2, 2),
    "1b@6": (1, 1, 1, 1, 1, 3),
}
PATTERN_PSI_SITE = {"Psi@12": 1, "Psi@23": 2, "Psi@34": 3}

# Наблюдаемые на правом конце: d₁ при |1111⟩|1̄1⟩, d₂ при |1111⟩|11̄⟩
ENDPOINTS = {"x": "1b@5", "y": "1b@6", "z": "22@56"}
D1_LABELS = PATTERN_BASIS["1b@5"]
D2_LABELS = PATTERN_BASIS["1b@6"]


@dataclass(frozen=True, eq=False)
class SeriesTable:
    """
    Коэффициенты ряда по t: entries[начальное состояние][шаблон][p]: коэффициент при t^p
    """
    order: int
    entries: dict

    def coefficient(self, initial: str, pattern: str, power: int) -> complex:
        return self.entries[initial][pattern][power]

    def endpoints(self) -> dict[str, tuple[complex, ...]]:
        """x₁, y₁, z₁, x₂, y₂, z₂ как последовательности коэффициентов по степеням t"""
        table = {}
        for suffix, initial in (("1", "X1"), ("2", "X2")):
            for name, pattern in ENDPOINTS.items():
                table[f"{name}{suffix}"] = self.entries[initial][pattern]
        return table


@dataclass(frozen=True, eq=False)
class PowerTable:
    """⟨шаблон|(H′)^p|начальное⟩ в разложении по шаблонам; closure_residual: невязка разложения"""
    q: float
    order: int
    coefficients: dict
    closure_residual: float


@dataclass(frozen=True, eq=False)
class TransmissionResult:
    c1: complex
    c2: complex
    q: float
    lam: float
    order: int
    t_samples: tuple[float, ...]
    d1_samples: tuple[complex, ...]
    d2_samples: tuple[complex, ...]
    d1: tuple[complex, ...]
    d2: tuple[complex, ...]
    fit_condition: float
    recovered_c1: complex
    recovered_c2: complex

    @property
    def error(self) -> float:
        return max(abs(self.recovered_c1 - self.c1), abs(self.recovered_c2 - self.c2))


@dataclass(frozen=True, eq=False)
class ThreeParamSample:
    """Наблюдение при q = 1 + δ: коэффициенты d₁(t), d₂(t) по степеням t"""
    delta: float
    sign: Sign
    order: int
    d1: tuple[complex, ...]
    d2: tuple[complex, ...]


def sixchain(q: float, sign: Sign = Sign.PLUS) -> ChainSpec:
    """Открытая 6-цепочка SÔ(3)"""
    return ChainSpec(AlgebraSpec(Family.ORTHOGONAL, 3, q), SIXCHAIN_LENGTH, Boundary.OPEN, sign)


def _pattern_vector(chain: ChainSpec, label: str) -> np.ndarray:
    if label in PATTERN_BASIS:
        return StateVector.basis(chain, PATTERN_BASIS[label]).amplitudes

    site = PATTERN_PSI_SITE[label]
    background = np.eye(3)[0]
    psi = np.zeros(9)
    for i, weight in enumerate(chain.weights, start=1):
        psi[(i - 1) * 3 + (3 - i)] = weight
    parts = [background] * (site - 1) + [psi] + [background] * (SIXCHAIN_LENGTH - site - 1)
    vector = parts[0]
    for part in parts[1:]:
        vector = np.kron(vector, part)
    return vector.astype(np.complex128)


def pattern_matrix(chain: ChainSpec) -> np.ndarray:
    """Столбцы: векторы шаблонов в порядке PATTERNS"""
    return np.column_stack([_pattern_vector(chain, label) for label in PATTERNS])


@lru_cache(maxsize=64)
def sixchain_power_table(q: float, order: int = DEFAULT_ORDER) -> PowerTable:
    """
    Разложение (H′)^p|x⟩₁,₂ по шаблонам для p ≤ order

    Returns:
        PowerTable с массивами формы (order+1, len(PATTERNS))
    """
    chain = sixchain(q)
    operator = h_prime(chain)
    basis = pattern_matrix(chain)
    coefficients = {}
    residual = 0.0

    for initial in ("X1", "X2"):
        vector = StateVector.basis(chain, INITIAL_LABELS[initial]).amplitudes
        rows = []
        for _ in range(order + 1):
            solution, *_ = np.linalg.lstsq(basis, vector, rcond=None)
            scale = max(float(np.linalg.norm(vector)), 1.0)
            residual = max(residual, float(np.linalg.norm(basis @ solution - vector)) / scale)
            rows.append(solution.real)
            vector = operator.matvec(vector)
        coefficients[initial] = np.array(rows)

    logger.debug(f"Таблица степеней 6-цепочки: q={q:g}, порядок {order}, невязка {residual:.2e}")
    return PowerTable(q=q, order=order, coefficients=coefficients, closure_residual=residual)


def _series_factor(lam: float, power: int) -> complex:
    return (-1j * lam) ** power / math.factorial(power)


def sixchain_series(q: float, lam: float, order: int = DEFAULT_ORDER) -> SeriesTable:
    """
    Коэффициенты при t^p амплитуд шаблонов для e^{−iλtH′}|x⟩₁,₂

    Args:
        q: Параметр деформации
        lam: Коэффициент λ
        order: Порядок усечения ряда

    Returns:
        SeriesTable
    """
    table = sixchain_power_table(float(q), order)
    entries = {}
    for initial, rows in table.coefficients.items():
        entries[initial] = {
            pattern: tuple(_series_factor(lam, p) * rows[p, column] for p in range(order + 1))
            for column, pattern in enumerate(PATTERNS)
        }
    return SeriesTable(order=order, entries=entries)


def sixchain_closure_residual(q: float, max_power: int = 8) -> dict[str, float]:
    """
    Проверка замкнутости набора шаблонов под действием H′

    Returns:
        {"span_residual": невязка разложения, "outside_support": максимум |амплитуды| вне носителя шаблонов}
    """
    chain = sixchain(q)
    operator = h_prime(chain)
    basis = pattern_matrix(chain)
    support = np.any(basis != 0, axis=1)
    span_residual = 0.0
    outside = 0.0

    for initial in ("X1", "X2"):
        vector = StateVector.basis(chain, INITIAL_LABELS[initial]).amplitudes
        for _ in range(max_power + 1):
            solution, *_ = np.linalg.lstsq(basis, vector, rcond=None)
            scale = max(float(np.linalg.norm(vector)), 1.0)
            span_residual = max(span_residual, float(np.linalg.norm(basis @ solution - vector)) / scale)
            outside = max(outside, float(np.max(np.abs(vector[~support]))))
            vector = operator.matvec(vector)

    return {"span_residual": span_residual, "outside_support": outside}


def fit_polynomial(
    t: Sequence[float],
    values: Sequence[complex],
    degree: int
) -> tuple[np.ndarray, float]:
    """
    Подгонка полинома степени degree методом наименьших квадратов

    Матрица Вандермонда строится по t/max|t|.

    Returns:
        (коэффициенты по возрастанию степени, число обусловленности)

    Raises:
        IllConditionedFit: Меньше degree+1 различных точек или cond > MAX_FIT_CONDITION
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=np.complex128)
    distinct = np.unique(t).size
    if distinct < degree + 1:
        raise IllConditionedFit(
            f"Для полинома степени {degree} нужно ≥ {degree + 1} различных t, получено {distinct}"
        )

    scale = float(np.max(np.abs(t)))
    vandermonde = np.vander(t / scale, degree + 1, increasing=True)
    cond = float(np.linalg.cond(vandermonde))
    if not np.isfinite(cond) or cond > MAX_FIT_CONDITION:
        raise IllConditionedFit(f"Число обусловленности матрицы Вандермонда {cond:.3e} > {MAX_FIT_CONDITION:.0e}")

    scaled, *_ = np.linalg.lstsq(vandermonde, values, rcond=None)
    return scaled / scale ** np.arange(degree + 1), cond


def _observe(
    chain: ChainSpec,
    initial: StateVector,
    t_samples: Sequence[float],
    order: int
) -> tuple[list[complex], list[complex]]:
    d1, d2 = [], []
    for t in t_samples:
        state = evolve_series(chain, initial, t, order)
        d1.append(state.amplitude(D1_LABELS))
        d2.append(state.amplitude(D2_LABELS))
    return d1, d2


def transmit_roundtrip(
    q: float,
    sign: Sign,
    c1: complex,
    c2: complex,
    t_samples: Sequence[float] = DEFAULT_T_SAMPLES,
    order: int = DEFAULT_ORDER
) -> TransmissionResult:
    """
    Кодирование (c₁|1̄1⟩ + c₂|11̄⟩)|1111⟩, эволюция и восстановление (c₁, c₂)

    c₂ берётся из коэффициента при t³ в d₁ (делением на x₂ при t³),
    затем c₁ из коэффициента при t⁴.

    Raises:
        InvalidSpec: order < 4
        IllConditionedFit: Плохая подгонка по t
    """
    if order < 4:
        raise InvalidSpec(f"Для восстановления нужен порядок ≥ 4, получено {order}")

    chain = sixchain(q, sign)
    lam = rapidity_params(chain.spec, sign).lam
    initial = StateVector(
        chain,
        c1 * StateVector.basis(chain, INITIAL_LABELS["X1"]).amplitudes
        + c2 * StateVector.basis(chain, INITIAL_LABELS["X2"]).amplitudes,
    )

    d1_samples, d2_samples = _observe(chain, initial, t_samples, order)
    d1, cond = fit_polynomial(t_samples, d1_samples, order)
    d2, _ = fit_polynomial(t_samples, d2_samples, order)

    endpoints = sixchain_series(q, lam, order).endpoints()
    x1, x2 = endpoints["x1"], endpoints["x2"]
    recovered_c2 = d1[3] / x2[3]
    recovered_c1 = (d1[4] - recovered_c2 * x2[4]) / x1[4]

    logger.debug(
        f"Передача q={q:g}: c=({c1}, {c2}) → ({recovered_c1:.12g}, {recovered_c2:.12g}), cond={cond:.2e}"
    )
    return TransmissionResult(
        c1=complex(c1),
        c2=complex(c2),
        q=q,
        lam=lam,
        order=order,
        t_samples=tuple(float(t) for t in t_samples),
        d1_samples=tuple(d1_samples),
        d2_samples=tuple(d2_samples),
        d1=tuple(complex(v) for v in d1),
        d2=tuple(complex(v) for v in d2),
        fit_condition=cond,
        recovered_c1=complex(recovered_c1),
        recovered_c2=complex(recovered_c2),
    )


def simulate_three_param(
    a: complex,
    b: complex,
    c: complex,
    delta: float,
    sign: Sign = Sign.PLUS,
    t_samples: Sequence[float] = DEFAULT_T_SAMPLES,
    order: int = DEFAULT_ORDER
) -> ThreeParamSample:
    """Эволюция (a|1̄1⟩ + b|22⟩ + c|11̄⟩)|1111⟩ при q = 1 + δ и подгонка d₁(t), d₂(t)"""
    chain = sixchain(1.0 + delta, sign)
    initial = sum(
        coeff * StateVector.basis(chain, INITIAL_LABELS[label]).amplitudes
        for coeff, label in ((a, "X1"), (b, "22"), (c, "X2"))
    )
    d1_samples, d2_samples = _observe(chain, StateVector(chain, initial), t_samples, order)
    d1, _ = fit_polynomial(t_samples, d1_samples, order)
    d2, _ = fit_polynomial(t_samples, d2_samples, order)
    return ThreeParamSample(
        delta=delta,
        sign=Sign(sign),
        order=order,
        d1=tuple(complex(v) for v in d1),
        d2=tuple(complex(v) for v in d2),
    )


@lru_cache(maxsize=64)
def _endpoint_responses(q: float, order: int) -> np.ndarray:
    """R[end, p, m] = ⟨end|(H′)^p|m⟩ для m ∈ (X1, 22, X2), end ∈ (d₁, d₂)"""
    chain = sixchain(q)
    operator = h_prime(chain)
    ends = [D1_LABELS, D2_LABELS]
    responses = np.zeros((2, order + 1, 3))
    for column, label in enumerate(("X1", "22", "X2")):
        vector = StateVector.basis(chain, INITIAL_LABELS[label]).amplitudes
        for p in range(order + 1):
            state = StateVector(chain, vector)
            for row, end in enumerate(ends):
                responses[row, p, column] = state.amplitude(end).real
            vector = operator.matvec(vector)
    return responses


def decode_three_param(samples: Sequence[ThreeParamSample]) -> tuple[complex, complex, complex]:
    """
    Восстановление (a, b, c) по наблюдениям при нескольких q = 1 + δ

    При одном q наблюдаемы только √q·a + b + c/√q и c, поэтому нужны ≥ 2 различных δ.

    Raises:
        InvalidSpec: |δ| > 0.1
        IllConditionedFit: Система вырождена (например, только δ = 0)
    """
    rows, rhs = [], []
    for sample in samples:
        if abs(sample.delta) > MAX_DECODE_DELTA:
            raise InvalidSpec(f"|δ| = {abs(sample.delta):g} > {MAX_DECODE_DELTA}")
        q = 1.0 + sample.delta
        lam = rapidity_params(sixchain(q).spec, sample.sign).lam
        responses = _endpoint_responses(q, sample.order)
        for end, observed in enumerate((sample.d1, sample.d2)):
            for p in range(1, sample.order + 1):
                rows.append(responses[end, p])
                rhs.append(observed[p] / _series_factor(lam, p))

    if not rows:
        raise IllConditionedFit("Нет наблюдений для восстановления (a, b, c)")

    system = np.array(rows)
    singular = np.linalg.svd(system, compute_uv=False)
    if singular[0] == 0 or singular[-1] / singular[0] < MIN_DECODE_SINGULAR_RATIO:
        deltas = sorted({s.delta for s in samples})
        raise IllConditionedFit(
            f"Система для (a, b, c) вырождена при δ ∈ {deltas}: нужны наблюдения при двух различных δ"
        )

    solution, *_ = np.linalg.lstsq(system.astype(np.complex128), np.array(rhs), rcond=None)
    a, b, c = (complex(v) for v in solution)
    return a, b, c
