"""
tlchain - Подкоманда transmit
Кодирование (c₁, c₂) на левом конце 6-цепочки SÔ(3) и восстановление по правому концу
"""

import logging

import numpy as np

from tlchain.config import RunConfig
from tlchain.formatters.serialize import dumps
from tlchain.formatters.tables import render_mapping
from tlchain.utils.artifacts import emit, gather_in_executor, run_in_executor
from tlchain.utils.transmission import TransmissionResult, transmit_roundtrip

logger = logging.getLogger(__name__)

# Допуск восстановления
DECODE_TOLERANCE = 1e-8


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "transmit",
        parents=parents,
        help="передача (c₁, c₂) через 6-цепочку SÔ(3)",
    )
    parser.add_argument("--c1", help="комплексный c₁, например 0.6 или 0.8i")
    parser.add_argument("--c2", help="комплексный c₂")
    parser.add_argument("--order", help="порядок усечения ряда (≥ 4, по умолчанию 5)")
    parser.add_argument("--t-samples", "--t", dest="t_samples", help="моменты времени через запятую")
    parser.add_argument("--draws", help="число случайных пар (c₁, c₂) вместо одной")
    parser.add_argument("--seed", help="зерно генератора случайных чисел")
    parser.set_defaults(handler=handle)


def result_payload(result: TransmissionResult) -> dict:
    return {
        "c1": result.c1,
        "c2": result.c2,
        "q": result.q,
        "lambda": result.lam,
        "order": result.order,
        "t_samples": result.t_samples,
        "d1_samples": result.d1_samples,
        "d2_samples": result.d2_samples,
        "d1": result.d1,
        "d2": result.d2,
        "fit_condition": result.fit_condition,
        "recovered_c1": result.recovered_c1,
        "recovered_c2": result.recovered_c2,
        "error": result.error,
    }


def random_pairs(seed: int, draws: int) -> list[tuple[complex, complex]]:
    """Случайные нормированные пары (c₁, c₂)"""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((draws, 2)) + 1j * rng.standard_normal((draws, 2))
    raw /= np.linalg.norm(raw, axis=1, keepdims=True)
    return [(complex(a), complex(b)) for a, b in raw]


async def handle(config: RunConfig) -> int:
    """
    Returns:
        0 если ошибка восстановления ≤ 1e-8, иначе 1
    """
    logger.info(f"📡 Передача через 6-цепочку SÔ(3), q={config.q:g}, ветвь {config.sign.value}")

    def roundtrip(pair: tuple[complex, complex]) -> TransmissionResult:
        return transmit_roundtrip(config.q, config.sign, pair[0], pair[1], config.t_samples, config.order)

    if config.draws:
        results = await gather_in_executor(roundtrip, random_pairs(config.seed, config.draws))
        max_error = max(result.error for result in results)
        payload = {
            "q": config.q,
            "sign": config.sign,
            "order": config.order,
            "seed": config.seed,
            "draws": config.draws,
            "max_error": max_error,
            "results": [result_payload(result) for result in results],
        }
    else:
        result = await run_in_executor(roundtrip, (config.c1, config.c2))
        max_error = result.error
        payload = result_payload(result)
        payload["sign"] = config.sign
        logger.debug("\n" + render_mapping({
            "c1": result.c1,
            "c2": result.c2,
            "recovered c1": result.recovered_c1,
            "recovered c2": result.recovered_c2,
            "fit condition": result.fit_condition,
        }))

    await emit(dumps(payload), config.out)

    if max_error > DECODE_TOLERANCE:
        logger.error(f"❌ Ошибка восстановления {max_error:.3e} больше {DECODE_TOLERANCE:.0e}")
        return 1
    logger.info(f"✅ Восстановлено с ошибкой {max_error:.3e}")
    return 0
