"""
tlchain - Машиночитаемый вывод
Детерминированный JSON (17 значащих цифр) и CSV
"""

import json
import math
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np
import pandas as pd

# 17 значащих цифр: double восстанавливается точно
JSON_FLOAT_FORMAT = ".17g"
CSV_FLOAT_FORMAT = "%.17g"


def _float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"JSON не допускает значение {value}")
    text = format(value, JSON_FLOAT_FORMAT)
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def _encode(value: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    close = "\n" + " " * (indent * level)

    if value is None or isinstance(value, (bool, np.bool_)):
        return json.dumps(bool(value) if value is not None else None)
    if isinstance(value, Enum):
        return json.dumps(value.value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _float(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return _encode({"re": value.real, "im": value.imag}, indent, level)
    if isinstance(value, Fraction):
        return json.dumps(str(value))
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, np.ndarray):
        return _encode(value.tolist(), indent, level)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}"
            for k, v in value.items()
        ]
        return "{" + pad + ("," + pad).join(items) + close + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [_encode(v, indent, level + 1) for v in value]
        return "[" + pad + ("," + pad).join(items) + close + "]"
    raise TypeError(f"Тип {type(value).__name__} не сериализуется в JSON")


def dumps(value: Any, indent: int = 2) -> str:
    """
    JSON с фиксированным форматом чисел и порядком ключей как во входных словарях

    Комплексные числа записываются как {"re": …, "im": …}.
    """
    return _encode(value, indent, 0) + "\n"


def frame_to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
