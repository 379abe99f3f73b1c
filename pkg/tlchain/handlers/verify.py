"""
tlchain - Подкоманда verify
Проверка проектора, ядра Темперли-Либа, уравнения кос и соотношений на цепочке
"""

import logging
import sys

import numpy as np
import pandas as pd

from tlchain.config import RunConfig
from tlchain.formatters.serialize import dumps, frame_to_csv
from tlchain.formatters.tables import render_report
from tlchain.utils.artifacts import emit, run_in_executor
from tlchain.utils.braid import (
    braid_residuals,
    build_unitary_braid,
    unitarity_residual,
    verify_braid_equation,
    verify_inversion,
)
from tlchain.utils.chain import build_hamiltonian, verify_tl_relations
from tlchain.utils.errors import VerificationFailed
from tlchain.utils.projector import build_p0, build_p0_prime, psi_vector, random_projector
from tlchain.utils.qnum import loop_constant, rapidity_params, verify_omega_identity

logger = logging.getLogger(__name__)

# Допуски проверок
IDENTITY_TOLERANCE = 1e-12
BRAID_TOLERANCE = 1e-10
NEGATIVE_CONTROL_THRESHOLD = 1e-3
# Диапазон случайных быстрот
THETA_RANGE = 0.4
# Быстроты отрицательного контроля
CONTROL_THETAS = (0.3, 0.5)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "verify",
        parents=parents,
        help="проверка тождеств проектора, кос и цепочки",
    )
    parser.add_argument("--chain-length", dest="chain_length", help="длина цепочки r (по умолчанию 3)")
    parser.add_argument("--boundary", choices=["open", "closed"], help="граничные условия")
    parser.add_argument("--theta-pairs", dest="theta_pairs", help="число случайных пар (θ, θ′)")
    parser.add_argument("--seed", help="зерно генератора случайных чисел")
    parser.set_defaults(handler=handle)


def _check(name: str, residual: float, tolerance: float, exceed: bool = False) -> dict:
    passed = residual > tolerance if exceed else residual < tolerance
    return {"check": name, "residual": float(residual), "tolerance": tolerance, "passed": bool(passed)}


def run_suite(config: RunConfig) -> list[dict]:
    """
    Полный набор проверок для точки (семейство, N, q)

    Returns:
        Список записей {check, residual, tolerance, passed}

    Raises:
        DegenerateLoopConstant: Если k ≤ 2 (нет быстроты и гамильтониана)
    """
    spec = config.spec
    rng = np.random.default_rng(config.seed)
    checks = []

    # Проектор
    k = loop_constant(spec)
    p0 = build_p0(spec)
    p0_prime = build_p0_prime(spec)
    psi = psi_vector(spec)
    unit_psi = psi / np.linalg.norm(psi)
    identity = np.eye(spec.n)
    p1 = np.kron(p0, identity)
    p2 = np.kron(identity, p0)

    checks.append(_check("P0^2 = P0", np.max(np.abs(p0 @ p0 - p0)), IDENTITY_TOLERANCE))
    checks.append(_check("tr P0 = 1", abs(np.trace(p0) - 1.0), IDENTITY_TOLERANCE))
    checks.append(_check("P0|Ψ⟩ = |Ψ⟩", np.linalg.norm(p0 @ unit_psi - unit_psi), IDENTITY_TOLERANCE))
    checks.append(_check("P0'|ij⟩ = 0, j ≠ ī", np.max(np.abs(p0_prime[:, psi == 0])), IDENTITY_TOLERANCE))
    checks.append(_check("P1 P2 P1 = k^-2 P1", np.max(np.abs(p1 @ p2 @ p1 - p1 / k**2)), IDENTITY_TOLERANCE))
    checks.append(_check("P2 P1 P2 = k^-2 P2", np.max(np.abs(p2 @ p1 @ p2 - p2 / k**2)), IDENTITY_TOLERANCE))

    # Быстрота и матрицы кос
    params = rapidity_params(spec, config.sign)
    pairs = rng.uniform(-THETA_RANGE, THETA_RANGE, size=(config.theta_pairs, 2))

    omega_residual = max(verify_omega_identity(t, tp, params.eta) for t, tp in pairs)
    checks.append(_check("ω-identity", omega_residual, IDENTITY_TOLERANCE))

    inversion = max(verify_inversion(spec, t, config.sign) for t, _ in pairs)
    checks.append(_check("R(θ)R(−θ) = I", inversion, IDENTITY_TOLERANCE))

    braid = [braid_residuals(spec, t, tp, config.sign) for t, tp in pairs]
    worst = int(np.argmax([residual.max_abs for residual in braid]))
    record = _check("braid equation", braid[worst].max_abs, BRAID_TOLERANCE)
    record["frobenius"] = braid[worst].frobenius
    record["theta"], record["theta_prime"] = float(pairs[worst][0]), float(pairs[worst][1])
    checks.append(record)

    control = random_projector(spec.n ** 2, 1, rng)
    negative = verify_braid_equation(spec, *CONTROL_THETAS, config.sign, projector=control)
    checks.append(_check("negative control (random projector)", negative, NEGATIVE_CONTROL_THRESHOLD, exceed=True))

    unitarity = max(unitarity_residual(build_unitary_braid(spec, t, config.sign)) for t, _ in pairs)
    checks.append(_check("U†U = I (iθ)", unitarity, IDENTITY_TOLERANCE))

    # Цепочка
    chain = config.chain()
    scale = max(1.0, k) ** 2
    for name, residual in verify_tl_relations(chain).items():
        tolerance = IDENTITY_TOLERANCE * (scale if "'" in name else 1.0)
        checks.append(_check(f"chain r={chain.length}: {name}", residual, tolerance))

    hamiltonian = build_hamiltonian(chain)
    u = rng.standard_normal(chain.dim) + 1j * rng.standard_normal(chain.dim)
    v = rng.standard_normal(chain.dim) + 1j * rng.standard_normal(chain.dim)
    u /= np.linalg.norm(u)
    v /= np.linalg.norm(v)
    hermiticity = abs(np.vdot(u, hamiltonian.matvec(v)) - np.conj(np.vdot(v, hamiltonian.matvec(u))))
    checks.append(_check("⟨u|Hv⟩ = conj⟨v|Hu⟩", hermiticity, IDENTITY_TOLERANCE * scale))

    return checks


async def handle(config: RunConfig) -> int:
    """
    Запускает набор проверок: таблица в stderr, отчёт JSON (или CSV) в stdout либо в --out

    Raises:
        VerificationFailed: Первая проверка вне допуска (код завершения 1)
    """
    spec = config.spec
    logger.info(f"🔍 Проверка {spec.label}, q={spec.q:g}, ветвь {config.sign.value}")

    checks = await run_in_executor(run_suite, config)
    print(render_report(checks), file=sys.stderr)

    if config.format == "csv":
        text = frame_to_csv(pd.DataFrame(checks))
    else:
        text = dumps({
            "family": spec.family,
            "n": spec.n,
            "q": spec.q,
            "sign": config.sign,
            "chain_length": config.chain_length,
            "passed": all(c["passed"] for c in checks),
            "checks": checks,
        })
    await emit(text, config.out)

    failed = [c for c in checks if not c["passed"]]
    if failed:
        first = failed[0]
        raise VerificationFailed(first["check"], first["residual"], first["tolerance"])

    logger.info(f"✅ Все проверки пройдены ({len(checks)})")
    return 0
