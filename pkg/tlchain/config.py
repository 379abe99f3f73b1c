"""
tlchain - Конфигурация запуска
Сборка RunConfig из флагов, файла key=value, переменных окружения и значений по умолчанию
"""

import logging
import math
import os
from dataclasses import dataclass, fields, replace
from typing import Any, Callable, Optional

from dotenv import dotenv_values

from tlchain.utils.chain import DEFAULT_DENSE_CAP, DEFAULT_DIM_CAP, DENSE_EXPORT_MAX_LENGTH, Boundary, ChainSpec
from tlchain.utils.entropy import DEFAULT_POINTS, DEFAULT_Q_MAX, DEFAULT_Q_MIN
from tlchain.utils.errors import ConfigError, TLChainError
from tlchain.utils.qnum import AlgebraSpec, Family, Sign
from tlchain.utils.transmission import DEFAULT_ORDER, DEFAULT_T_SAMPLES

logger = logging.getLogger(__name__)

ENV_PREFIX = "TLCHAIN_"
FORMATS = ("json", "csv")
METHODS = ("series", "exact")


@dataclass(frozen=True)
class RunConfig:
    """Параметры одного запуска; проверяются целиком до начала вычислений"""
    command: str = "info"
    family: Family = Family.ORTHOGONAL
    n: int = 3
    q: float = 1.0
    sign: Sign = Sign.PLUS
    chain_length: int = 3
    boundary: Boundary = Boundary.OPEN
    order: int = DEFAULT_ORDER
    t_samples: tuple[float, ...] = DEFAULT_T_SAMPLES
    out: Optional[str] = None
    format: Optional[str] = None
    seed: int = 7
    dim_cap: int = DEFAULT_DIM_CAP
    dense_cap: int = DEFAULT_DENSE_CAP
    log_level: str = "INFO"
    theta_pairs: int = 10
    initial: Optional[tuple[int, ...]] = None
    initial_file: Optional[str] = None
    method: str = "series"
    c1: complex = 1 + 0j
    c2: complex = 0j
    draws: int = 0
    q_min: float = DEFAULT_Q_MIN
    q_max: float = DEFAULT_Q_MAX
    points: int = DEFAULT_POINTS
    log_spacing: bool = True
    svg: Optional[str] = None
    operator: bool = False
    operator_length: Optional[int] = None

    @property
    def spec(self) -> AlgebraSpec:
        return AlgebraSpec(self.family, self.n, self.q)

    def chain(self, length: Optional[int] = None) -> ChainSpec:
        return ChainSpec(
            self.spec,
            length or self.chain_length,
            self.boundary,
            self.sign,
            dim_cap=self.dim_cap,
        )


def _parse_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"не булево значение: {value!r}")


def _parse_floats(value: Any) -> tuple[float, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    return tuple(float(part) for part in str(value).replace(";", ",").split(",") if part.strip())


def _parse_labels(value: Any) -> tuple[int, ...]:
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    return tuple(int(part) for part in str(value).replace(" ", ",").split(",") if part.strip())


def _parse_complex(value: Any) -> complex:
    if isinstance(value, (int, float, complex)):
        return complex(value)
    return complex(str(value).replace(" ", "").replace("i", "j"))


def _parse_int(value: Any) -> int:
    number = float(value)
    if number != int(number):
        raise ValueError(f"не целое значение: {value!r}")
    return int(number)


def _optional_str(value: Any) -> Optional[str]:
    text = str(value).strip()
    return text or None


# Преобразователи строковых значений по полям RunConfig
CONVERTERS: dict[str, Callable[[Any], Any]] = {
    "command": str,
    "family": lambda v: Family(str(v).strip().lower()),
    "n": _parse_int,
    "q": float,
    "sign": lambda v: Sign(str(v).strip().lower()),
    "chain_length": _parse_int,
    "boundary": lambda v: Boundary(str(v).strip().lower()),
    "order": _parse_int,
    "t_samples": _parse_floats,
    "out": _optional_str,
    "format": lambda v: str(v).strip().lower(),
    "seed": _parse_int,
    "dim_cap": _parse_int,
    "dense_cap": _parse_int,
    "log_level": lambda v: str(v).strip().upper(),
    "theta_pairs": _parse_int,
    "initial": _parse_labels,
    "initial_file": _optional_str,
    "method": lambda v: str(v).strip().lower(),
    "c1": _parse_complex,
    "c2": _parse_complex,
    "draws": _parse_int,
    "q_min": float,
    "q_max": float,
    "points": _parse_int,
    "log_spacing": _parse_bool,
    "svg": _optional_str,
    "operator": _parse_bool,
    "operator_length": _parse_int,
}

FIELD_NAMES = tuple(f.name for f in fields(RunConfig))


def _convert(layer: str, raw: dict[str, Any]) -> dict[str, Any]:
    converted = {}
    for key, value in raw.items():
        if key not in CONVERTERS:
            raise ConfigError(f"{layer}: неизвестный параметр '{key}'")
        try:
            converted[key] = CONVERTERS[key](value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{layer}: недопустимое значение {key}={value!r} ({e})")
    return converted


def env_layer(environ: Optional[dict[str, str]] = None) -> dict[str, Any]:
    """Значения из переменных окружения TLCHAIN_*"""
    environ = os.environ if environ is None else environ
    raw = {}
    for name in FIELD_NAMES:
        value = environ.get(f"{ENV_PREFIX}{name.upper()}")
        if value is not None and name != "command":
            raw[name] = value
    return _convert("окружение", raw)


def file_layer(path: Optional[str]) -> dict[str, Any]:
    """
    Значения из файла key=value (формат .env)

    Ключи допускаются в виде q, Q или TLCHAIN_Q.
    """
    if not path:
        return {}
    if not os.path.isfile(path):
        raise ConfigError(f"Файл конфигурации не найден: {path}")

    raw = {}
    for key, value in dotenv_values(path).items():
        name = key.lower()
        if name.startswith(ENV_PREFIX.lower()):
            name = name[len(ENV_PREFIX):]
        name = name.replace("-", "_")
        if value is not None:
            raw[name] = value
    return _convert(f"файл {path}", raw)


def load_config(
    flags: dict[str, Any],
    config_path: Optional[str] = None,
    environ: Optional[dict[str, str]] = None
) -> RunConfig:
    """
    Собирает RunConfig: флаги > файл конфигурации > окружение > значения по умолчанию

    Args:
        flags: Явно заданные флаги (None означает «не задан»)
        config_path: Путь к файлу key=value
        environ: Окружение (по умолчанию os.environ)

    Raises:
        ConfigError: При недопустимых значениях
    """
    merged: dict[str, Any] = {}
    merged.update(env_layer(environ))
    merged.update(file_layer(config_path))
    merged.update(_convert("флаги", {k: v for k, v in flags.items() if v is not None}))

    config = replace(RunConfig(), **merged)
    validate(config)
    return config


def validate(config: RunConfig) -> None:
    """
    Проверяет все поля до начала вычислений

    Raises:
        ConfigError: Первое найденное нарушение
    """
    try:
        spec = config.spec
    except TLChainError as e:
        raise ConfigError(str(e))

    if not math.isfinite(config.q):
        raise ConfigError(f"q должно быть конечным, получено {config.q}")
    if config.order < 0:
        raise ConfigError(f"Порядок ряда должен быть ≥ 0, получено {config.order}")
    if not config.t_samples or not all(math.isfinite(t) for t in config.t_samples):
        raise ConfigError("t-samples: нужен непустой список конечных чисел")
    if config.chain_length < 2:
        raise ConfigError(f"Длина цепочки должна быть ≥ 2, получено {config.chain_length}")
    if config.dim_cap < 1 or config.dense_cap < 1:
        raise ConfigError("Лимиты размерности должны быть положительными")
    if spec.n ** config.chain_length > config.dim_cap:
        raise ConfigError(
            f"N^r = {spec.n}^{config.chain_length} превышает лимит TLCHAIN_DIM_CAP={config.dim_cap}"
        )
    if config.format is not None and config.format not in FORMATS:
        raise ConfigError(f"Формат должен быть одним из {FORMATS}, получено {config.format!r}")
    if config.method not in METHODS:
        raise ConfigError(f"Метод должен быть одним из {METHODS}, получено {config.method!r}")
    if config.command == "evolve" and config.method == "exact" and spec.n ** config.chain_length > config.dense_cap:
        raise ConfigError(
            f"method=exact: N^r = {spec.n}^{config.chain_length} превышает лимит "
            f"TLCHAIN_DENSE_CAP={config.dense_cap}"
        )
    if config.operator_length is not None:
        if not config.operator:
            raise ConfigError("Длина цепочки для экспорта оператора задаётся только вместе с --operator")
        if not 2 <= config.operator_length <= DENSE_EXPORT_MAX_LENGTH:
            raise ConfigError(
                f"Плотный экспорт H′ поддерживается для 2 ≤ r ≤ {DENSE_EXPORT_MAX_LENGTH}, "
                f"получено r={config.operator_length}"
            )
    if config.theta_pairs < 1:
        raise ConfigError(f"theta-pairs должно быть ≥ 1, получено {config.theta_pairs}")
    if config.draws < 0:
        raise ConfigError(f"draws должно быть ≥ 0, получено {config.draws}")
    if not 0 < config.q_min < config.q_max:
        raise ConfigError(f"Нужно 0 < q-min < q-max, получено [{config.q_min}, {config.q_max}]")
    if config.points < 2:
        raise ConfigError(f"points должно быть ≥ 2, получено {config.points}")
    if config.log_level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise ConfigError(f"Неизвестный уровень логирования {config.log_level!r}")
    if config.initial is not None:
        if len(config.initial) != config.chain_length:
            raise ConfigError(
                f"initial: ожидалось {config.chain_length} меток, получено {len(config.initial)}"
            )
        if not all(1 <= label <= spec.n for label in config.initial):
            raise ConfigError(f"initial: метки должны лежать в 1..{spec.n}")
