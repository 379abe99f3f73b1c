"""
tlchain - Подкоманда info
Параметры точки (семейство, N, q): k, η, λ, ρ, ε и сопряжение индексов
"""

import logging

from tlchain.config import RunConfig
from tlchain.formatters.serialize import dumps, frame_to_csv
from tlchain.formatters.tables import render_mapping
from tlchain.utils.artifacts import emit, run_in_executor
from tlchain.utils.chain import dense_export_frame
from tlchain.utils.errors import DegenerateLoopConstant
from tlchain.utils.projector import build_p0_prime, frame_to_records, operator_to_frame
from tlchain.utils.qnum import (
    AlgebraSpec,
    Sign,
    bar,
    coupling_sign,
    epsilon_sign,
    loop_constant,
    psi_weights,
    rapidity_params,
    rho_tuple,
)

logger = logging.getLogger(__name__)

# Заглушка для величин, не определённых при k ≤ 2
UNDEFINED = "—"


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "info",
        parents=parents,
        help="параметры алгебры: k, η, λ, ρ, ε",
    )
    parser.add_argument(
        "--operator",
        dest="operator",
        action="store_true",
        default=None,
        help="вывести P₀′ (JSON-матрица или CSV row,col,re,im) вместо параметров",
    )
    parser.add_argument(
        "--chain-length",
        dest="operator_length",
        help="вместе с --operator: плотный H′ цепочки длины r ≤ 4",
    )
    parser.add_argument("--boundary", choices=["open", "closed"], help="граничные условия цепочки")
    parser.set_defaults(handler=handle)


def describe(spec: AlgebraSpec, sign: Sign) -> dict:
    """Параметры точки; η, sinh η и λ равны None при k ≤ 2"""
    values = {
        "family": spec.family.value,
        "n": spec.n,
        "q": spec.q,
        "k": loop_constant(spec),
        "eta": None,
        "sinh_eta": None,
        "lambda": None,
        "sign": sign.value,
        "rho": rho_tuple(spec),
        "epsilon": tuple(epsilon_sign(spec, i) for i in range(1, spec.n + 1)),
        "bar": {str(i): bar(i, spec.n) for i in range(1, spec.n + 1)},
        "coupling": coupling_sign(spec),
        "psi_weights": tuple(float(a) for a in psi_weights(spec)),
    }
    try:
        params = rapidity_params(spec, sign)
    except DegenerateLoopConstant as e:
        logger.warning(f"⚠️ {e}")
    else:
        values.update(eta=params.eta, sinh_eta=params.sinh_eta, **{"lambda": params.lam})
    return values


async def handle(config: RunConfig) -> int:
    spec = config.spec

    if config.operator:
        if config.operator_length:
            chain = config.chain(config.operator_length)
            logger.info(f"🧮 Плотный H′ для {spec.label}, r={chain.length}, {chain.boundary.value}")
            frame = await run_in_executor(dense_export_frame, chain)
            dim = chain.dim
        else:
            frame = operator_to_frame(build_p0_prime(spec))
            dim = spec.n ** 2
        if config.format == "csv":
            text = frame_to_csv(frame)
        else:
            text = dumps(frame_to_records(frame, dim))
        await emit(text, config.out)
        return 0

    values = describe(spec, config.sign)
    if config.format == "json" or config.out:
        await emit(dumps(values), config.out)
    else:
        table = {key: UNDEFINED if value is None else value for key, value in values.items()}
        print(render_mapping(table))
    return 0
