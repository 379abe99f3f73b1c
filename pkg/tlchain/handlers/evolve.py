"""
tlchain - Подкоманда evolve
Временной ряд амплитуд e^{−iHt}|ψ₀⟩ в JSON или CSV
"""

import json
import logging

import numpy as np
import pandas as pd

from tlchain.config import RunConfig
from tlchain.formatters.serialize import dumps, frame_to_csv
from tlchain.utils.artifacts import emit, gather_in_executor, read_text, run_in_executor
from tlchain.utils.chain import ChainSpec, StateVector, build_hamiltonian, expectation
from tlchain.utils.evolution import ExactPropagator, evolve_series

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "evolve",
        parents=parents,
        help="эволюция состояния цепочки",
    )
    parser.add_argument("--chain-length", dest="chain_length", help="длина цепочки r")
    parser.add_argument("--boundary", choices=["open", "closed"], help="граничные условия")
    parser.add_argument("--order", help="порядок усечения ряда (по умолчанию 5)")
    parser.add_argument("--t-samples", "--t", dest="t_samples", help="моменты времени через запятую")
    parser.add_argument("--initial", help="метки начального базисного состояния, например 3,1,1")
    parser.add_argument("--initial-file", dest="initial_file", help="JSON-файл состояния [{labels, re, im}]")
    parser.add_argument("--method", choices=["series", "exact"], help="ряд или точная диагонализация")
    parser.set_defaults(handler=handle)


async def load_initial(config: RunConfig, chain: ChainSpec) -> StateVector:
    """Начальное состояние: файл, явные метки или |N 1 … 1⟩"""
    if config.initial_file:
        records = json.loads(await read_text(config.initial_file))
        return StateVector.from_records(chain, records)
    labels = config.initial or (chain.n,) + (1,) * (chain.length - 1)
    return StateVector.basis(chain, labels)


def evolution_frame(times, states) -> pd.DataFrame:
    rows = []
    for t, state in zip(times, states):
        for record in state.to_records():
            rows.append({
                "t": t,
                "labels": " ".join(str(label) for label in record["labels"]),
                "re": record["re"],
                "im": record["im"],
            })
    return pd.DataFrame(rows, columns=["t", "labels", "re", "im"])


async def handle(config: RunConfig) -> int:
    chain = config.chain()
    initial = await load_initial(config, chain)
    times = list(config.t_samples)
    logger.info(
        f"⏱️ Эволюция {chain.spec.label}, r={chain.length}, {chain.boundary.value}, "
        f"метод {config.method}, {len(times)} моментов"
    )

    if config.method == "exact":
        propagator = await run_in_executor(ExactPropagator, chain, config.dense_cap)
        states = await gather_in_executor(lambda t: propagator.evolve(initial, t), times)
    else:
        states = await gather_in_executor(
            lambda t: evolve_series(chain, initial, t, config.order), times
        )

    hamiltonian = build_hamiltonian(chain)
    if config.format == "csv":
        text = frame_to_csv(evolution_frame(times, states))
    else:
        text = dumps({
            "family": chain.spec.family,
            "n": chain.n,
            "q": chain.spec.q,
            "sign": chain.sign,
            "chain_length": chain.length,
            "boundary": chain.boundary,
            "method": config.method,
            "order": config.order,
            "lambda": hamiltonian.lam,
            "initial": initial.to_records(),
            "series": [
                {
                    "t": t,
                    "norm": state.norm(),
                    "energy": float(np.real(expectation(hamiltonian, state))),
                    "amplitudes": state.to_records(),
                }
                for t, state in zip(times, states)
            ],
        })

    await emit(text, config.out)
    return 0
