"""
tlchain - Проекторы P₀ и P₀′
Построение N²×N² проекторов, собственного состояния |Ψ⟩
и действия P₀′ на произведения состояний
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from tlchain.utils.qnum import AlgebraSpec, bar, loop_constant, psi_weights

logger = logging.getLogger(__name__)

# Допуск проверки ранга
RANK_TOLERANCE = 1e-10


@dataclass(frozen=True)
class PsiState:
    """Коэффициенты a_i при |i ī⟩ в |Ψ⟩"""
    n: int
    coeffs: tuple[float, ...]
    normalized: bool = False

    def vector(self) -> np.ndarray:
        """Вектор длины N² в построчном порядке индексов (i, j)"""
        return psi_vector_from_coeffs(np.asarray(self.coeffs), self.n)

    def coefficient_matrix(self) -> np.ndarray:
        """Матрица N×N коэффициентов C[i, ī] = a_i"""
        return self.vector().reshape(self.n, self.n)


def pair_index(i: int, j: int, n: int) -> int:
    """Индекс базисного вектора |i j⟩ (метки с 1) в N²-пространстве"""
    return (i - 1) * n + (j - 1)


def psi_vector_from_coeffs(coeffs: np.ndarray, n: int) -> np.ndarray:
    vec = np.zeros(n * n, dtype=np.result_type(coeffs, float))
    for i in range(1, n + 1):
        vec[pair_index(i, bar(i, n), n)] = coeffs[i - 1]
    return vec


def psi_state(spec: AlgebraSpec, normalized: bool = False) -> PsiState:
    """
    Собственное состояние |Ψ⟩ = Σ a_i |i ī⟩

    Args:
        spec: Параметры алгебры
        normalized: Делить ли на √k, чтобы Σ|a_i|² = 1

    Returns:
        PsiState
    """
    coeffs = psi_weights(spec)
    if normalized:
        coeffs = coeffs / np.sqrt(loop_constant(spec))
    return PsiState(n=spec.n, coeffs=tuple(float(c) for c in coeffs), normalized=normalized)


def psi_vector(spec: AlgebraSpec) -> np.ndarray:
    """Ненормированный |Ψ⟩ как вектор длины N²"""
    return psi_state(spec).vector()


def build_p0_prime(spec: AlgebraSpec) -> np.ndarray:
    """
    P₀′ = |Ψ⟩⟨Ψ|: элемент ((i,ī),(j,j̄)) равен a_i a_j, остальные нули

    Returns:
        Вещественная матрица N²×N²
    """
    psi = psi_vector(spec)
    logger.debug(f"P₀′ для {spec.label}, q={spec.q:g}: размер {psi.size}×{psi.size}")
    return np.outer(psi, psi)


def build_p0(spec: AlgebraSpec) -> np.ndarray:
    """P₀ = P₀′/k, проектор ранга 1 на |Ψ⟩"""
    return build_p0_prime(spec) / loop_constant(spec)


def apply_p0_prime_product(
    spec: AlgebraSpec,
    x: np.ndarray,
    y: np.ndarray
) -> tuple[complex, PsiState]:
    """
    Действие P₀′ на |x⟩⊗|y⟩ без построения матрицы

    Args:
        spec: Параметры алгебры
        x: Коэффициенты первого сомножителя (длина N)
        y: Коэффициенты второго сомножителя (длина N)

    Returns:
        (Σ a_i x_i y_ī, |Ψ⟩), т.е. P₀′(x⊗y) = scalar·|Ψ⟩
    """
    psi = psi_state(spec)
    x = np.asarray(x)
    y = np.asarray(y)
    scalar = sum(
        psi.coeffs[i - 1] * x[i - 1] * y[bar(i, spec.n) - 1]
        for i in range(1, spec.n + 1)
    )
    return scalar, psi


def kernel_combinations(spec: AlgebraSpec) -> list[np.ndarray]:
    """
    N−1 векторов вида a_i^{−1}|i ī⟩ − a_{i+1}^{−1}|(i+1)(i+1)̄⟩, лежащих в ядре P₀

    Для SÔ(3): q^{1/2}|11̄⟩ − |22⟩ и |22⟩ − q^{−1/2}|1̄1⟩.
    """
    coeffs = psi_state(spec).coeffs
    n = spec.n
    vectors = []
    for i in range(1, n):
        vec = np.zeros(n * n)
        vec[pair_index(i, bar(i, n), n)] = 1.0 / coeffs[i - 1]
        vec[pair_index(i + 1, bar(i + 1, n), n)] = -1.0 / coeffs[i]
        vectors.append(vec)
    return vectors


def is_rank_one(matrix: np.ndarray, tol: float = RANK_TOLERANCE) -> bool:
    return int(np.linalg.matrix_rank(matrix, tol=tol)) == 1


def random_projector(dim: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    """Случайный ортогональный проектор заданного ранга (для отрицательного контроля)"""
    basis, _ = np.linalg.qr(rng.standard_normal((dim, rank)))
    return basis @ basis.T


def operator_to_frame(matrix: np.ndarray) -> pd.DataFrame:
    """Ненулевые элементы оператора в виде таблицы (row, col, re, im), индексы с 1"""
    rows, cols = np.nonzero(matrix)
    values = matrix[rows, cols]
    return pd.DataFrame({
        "row": rows + 1,
        "col": cols + 1,
        "re": np.real(values).astype(float),
        "im": np.imag(values).astype(float),
    })


def frame_to_records(frame: pd.DataFrame, dim: int) -> dict:
    """JSON-форма таблицы (row, col, re, im): размер и ненулевые элементы"""
    return {
        "dim": int(dim),
        "entries": [
            {"row": int(r.row), "col": int(r.col), "re": float(r.re), "im": float(r.im)}
            for r in frame.itertuples(index=False)
        ],
    }


def operator_to_records(matrix: np.ndarray) -> dict:
    """Документированная JSON-форма матрицы: размер и ненулевые элементы"""
    return frame_to_records(operator_to_frame(matrix), matrix.shape[0])
