"""
tlchain - Подкоманда entropy-curve
Кривая S(q) в CSV и, по желанию, SVG-график
"""

import logging

import pandas as pd

from tlchain.config import RunConfig
from tlchain.formatters.plots import render_entropy_svg
from tlchain.formatters.serialize import dumps, frame_to_csv
from tlchain.utils.artifacts import emit, run_in_executor, save_bytes
from tlchain.utils.entropy import EntropyCurve, entropy_curve

logger = logging.getLogger(__name__)


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser(
        "entropy-curve",
        parents=parents,
        help="энтропия запутанности |Ψ⟩ как функция q",
    )
    parser.add_argument("--q-min", dest="q_min", help="левая граница по q (по умолчанию 0.01)")
    parser.add_argument("--q-max", dest="q_max", help="правая граница по q (по умолчанию 100)")
    parser.add_argument("--points", help="число точек (по умолчанию 201)")
    parser.add_argument(
        "--linear",
        dest="log_spacing",
        action="store_const",
        const=False,
        help="равномерная сетка вместо логарифмической",
    )
    parser.add_argument("--svg", help="путь для SVG-графика")
    parser.set_defaults(handler=handle)


def curve_payload(curve: EntropyCurve) -> dict:
    return {
        "family": curve.family,
        "n": curve.n,
        "samples": [{"q": q, "S": s} for q, s in curve.samples],
    }


async def handle(config: RunConfig) -> int:
    logger.info(
        f"📈 Кривая энтропии {config.spec.label}: q ∈ [{config.q_min:g}, {config.q_max:g}], "
        f"{config.points} точек"
    )
    curve = await run_in_executor(
        entropy_curve,
        config.family,
        config.n,
        config.q_min,
        config.q_max,
        config.points,
        config.log_spacing,
    )

    frame: pd.DataFrame = curve.to_frame()
    peak = frame.loc[frame["S"].idxmax()]
    logger.info(f"Максимум S = {peak['S']:.12g} при q = {peak['q']:.6g}")

    if config.format == "json":
        text = dumps(curve_payload(curve))
    else:
        text = frame_to_csv(frame)
    await emit(text, config.out)

    if config.svg:
        svg = await run_in_executor(render_entropy_svg, [curve], config.log_spacing)
        await save_bytes(svg, config.svg)
        logger.info(f"🖼️ График сохранён: {config.svg}")

    return 0
