"""
tlchain - Матрицы кос
R̂(θ) = I⊗I + ω(θ)P₀, проверка уравнения кос и тождества обращения,
унитарный вариант при мнимой быстроте
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from tlchain.utils.projector import build_p0
from tlchain.utils.qnum import AlgebraSpec, Sign, omega, rapidity_params

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class BraidMatrix:
    """R̂(θ) для точки (семейство, N, q); imaginary: быстрота iθ"""
    spec: AlgebraSpec
    theta: float
    imaginary: bool
    omega: complex
    matrix: np.ndarray


@dataclass(frozen=True)
class BraidResidual:
    """Невязка ‖B̂₁ − B̂₂‖ в max- и фробениусовой нормах"""
    max_abs: float
    frobenius: float


def _braid_from_projector(projector: np.ndarray, w: complex) -> np.ndarray:
    dtype = np.complex128 if isinstance(w, complex) else np.float64
    return np.eye(projector.shape[0], dtype=dtype) + w * projector


def build_braid(spec: AlgebraSpec, theta: float, sign: Sign = Sign.PLUS) -> BraidMatrix:
    """
    Матрица кос при вещественной быстроте

    Raises:
        DegenerateLoopConstant: k ≤ 2
        PoleAtRapidity: sinh(η+θ) = 0
    """
    params = rapidity_params(spec, sign)
    w = omega(theta, params.eta)
    matrix = _braid_from_projector(build_p0(spec), w)
    return BraidMatrix(spec=spec, theta=theta, imaginary=False, omega=w, matrix=matrix)


def build_unitary_braid(spec: AlgebraSpec, theta: float, sign: Sign = Sign.PLUS) -> BraidMatrix:
    """
    Унитарная матрица кос I⊗I + ω(iθ)P₀

    |1 + ω(iθ)| = 1 при вещественных η и θ, поэтому U†U = I.
    """
    params = rapidity_params(spec, sign)
    w = omega(complex(0.0, theta), params.eta)
    matrix = _braid_from_projector(build_p0(spec), complex(w))
    return BraidMatrix(spec=spec, theta=theta, imaginary=True, omega=complex(w), matrix=matrix)


def braid_residuals(
    spec: AlgebraSpec,
    theta: float,
    theta_prime: float,
    sign: Sign = Sign.PLUS,
    projector: Optional[np.ndarray] = None
) -> BraidResidual:
    """
    Невязка R̂₁₂(θ)R̂₂₃(θ+θ′)R̂₁₂(θ′) − R̂₂₃(θ′)R̂₁₂(θ+θ′)R̂₂₃(θ)
    на плотных матрицах N³×N³

    Args:
        spec: Параметры алгебры
        theta: Быстрота θ
        theta_prime: Быстрота θ′
        sign: Ветвь η
        projector: Подставной проектор вместо P₀ (отрицательный контроль)
    """
    params = rapidity_params(spec, sign)
    p0 = build_p0(spec) if projector is None else projector
    identity = np.eye(spec.n)

    def r12(t: float) -> np.ndarray:
        return np.kron(_braid_from_projector(p0, omega(t, params.eta)), identity)

    def r23(t: float) -> np.ndarray:
        return np.kron(identity, _braid_from_projector(p0, omega(t, params.eta)))

    left = r12(theta) @ r23(theta + theta_prime) @ r12(theta_prime)
    right = r23(theta_prime) @ r12(theta + theta_prime) @ r23(theta)
    diff = left - right
    return BraidResidual(
        max_abs=float(np.max(np.abs(diff))),
        frobenius=float(np.linalg.norm(diff)),
    )


def verify_braid_equation(
    spec: AlgebraSpec,
    theta: float,
    theta_prime: float,
    sign: Sign = Sign.PLUS,
    projector: Optional[np.ndarray] = None
) -> float:
    """Max-норма невязки уравнения кос"""
    return braid_residuals(spec, theta, theta_prime, sign, projector).max_abs


def verify_inversion(spec: AlgebraSpec, theta: float, sign: Sign = Sign.PLUS) -> float:
    """‖R̂(θ)R̂(−θ) − I⊗I‖_max"""
    forward = build_braid(spec, theta, sign).matrix
    backward = build_braid(spec, -theta, sign).matrix
    return float(np.max(np.abs(forward @ backward - np.eye(forward.shape[0]))))


def unitarity_residual(braid: BraidMatrix) -> float:
    """‖U†U − I‖_max"""
    u = braid.matrix
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
