"""
tlchain - Таблицы для человека
Отчёты проверок, параметры алгебры и результаты передачи (12 значащих цифр)
"""

from typing import Iterable, Mapping

import pandas as pd

# Колонки отчёта проверок
REPORT_COLUMNS = ["check", "residual", "tolerance", "status"]

# Маркеры статуса
STATUS_MARKS = {
    True: "✅",
    False: "❌",
}


def _float12(value: float) -> str:
    return format(value, ".12g")


def render_frame(frame: pd.DataFrame) -> str:
    """DataFrame → текст с 12 значащими цифрами"""
    if frame.empty:
        return "(пусто)"
    return frame.to_string(index=False, float_format=_float12)


def render_report(checks: Iterable[Mapping]) -> str:
    """
    Таблица проверок

    Args:
        checks: Записи с полями check, residual, tolerance, passed
    """
    frame = pd.DataFrame([
        {
            "check": c["check"],
            "residual": c["residual"],
            "tolerance": c["tolerance"],
            "status": STATUS_MARKS[bool(c["passed"])],
        }
        for c in checks
    ], columns=REPORT_COLUMNS)
    return render_frame(frame)


def render_mapping(values: Mapping[str, object]) -> str:
    """Двухколоночная таблица «параметр: значение»"""
    frame = pd.DataFrame(
        [{"parameter": key, "value": _format_value(value)} for key, value in values.items()]
    )
    return render_frame(frame)


def _format_value(value: object) -> str:
    if isinstance(value, float):
        return _float12(value)
    if isinstance(value, complex):
        return f"{_float12(value.real)}{'+' if value.imag >= 0 else '-'}{_float12(abs(value.imag))}j"
    if isinstance(value, (list, tuple)):
        return "(" + ", ".join(_format_value(v) for v in value) + ")"
    if isinstance(value, dict):
        return ", ".join(f"{k}→{_format_value(v)}" for k, v in value.items())
    return str(value)
