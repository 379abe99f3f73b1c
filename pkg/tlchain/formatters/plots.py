"""
tlchain - Графики
SVG-кривые энтропии S(q)
"""

import io
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "tlchain"
matplotlib.rcParams["svg.fonttype"] = "none"

import matplotlib.pyplot as plt  # noqa: E402

from tlchain.utils.entropy import EntropyCurve  # noqa: E402
from tlchain.utils.qnum import FAMILY_NAMES  # noqa: E402


def render_entropy_svg(curves: Sequence[EntropyCurve], log_axis: bool = True) -> bytes:
    """
    Самодостаточный SVG с кривыми S(q)

    Returns:
        Содержимое SVG-файла
    """
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for curve in curves:
        qs = [q for q, _ in curve.samples]
        entropies = [s for _, s in curve.samples]
        ax.plot(qs, entropies, label=f"{FAMILY_NAMES[curve.family]}({curve.n})")

    if log_axis:
        ax.set_xscale("log")
    ax.set_xlabel("q")
    ax.set_ylabel("S(q, N)")
    ax.grid(True, alpha=0.3)
    ax.legend()

    buffer = io.BytesIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buffer.getvalue()
