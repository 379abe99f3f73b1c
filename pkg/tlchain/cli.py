"""
tlchain - Точка входа
Командная строка: проверки, эволюция цепочки, передача данных и кривые энтропии
"""

import argparse
import asyncio
import logging
import os
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

from tlchain.config import ENV_PREFIX, load_config
from tlchain.utils.errors import ConfigError, TLChainError

# Импортируем обработчики подкоманд
from tlchain.handlers import entropy_curve, evolve, info, transmit, verify

logger = logging.getLogger("tlchain")

# Коды завершения
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

# Флаги, которые не относятся к RunConfig
_NON_CONFIG_KEYS = ("handler", "config")


def setup_logging(level: str = "INFO") -> None:
    """
    Настройка системы логирования
    Логи идут в stderr, stdout остаётся для машиночитаемого вывода
    """
    log_format = (
        "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
    )

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=log_format,
        datefmt="%Y-%m-%d %H:%M:%S",
        handlers=[
            logging.StreamHandler(sys.stderr)
        ],
        force=True,
    )

    # Уменьшаем уровень логов для библиотек
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("asyncio").setLevel(logging.WARNING)


def build_parser() -> argparse.ArgumentParser:
    """
    Парсер с общими флагами и подкомандами

    Значения по умолчанию везде None: незаданный флаг не перекрывает
    файл конфигурации и окружение.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=["so", "sp"], help="семейство: so (SÔ) или sp (Sp̂)")
    common.add_argument("--n", help="размерность N")
    common.add_argument("--q", help="параметр деформации q > 0")
    common.add_argument("--sign", choices=["plus", "minus"], help="ветвь η (plus: sinh η > 0)")
    common.add_argument("--out", help="файл результата (по умолчанию stdout)")
    common.add_argument("--format", choices=["json", "csv"], help="формат результата")
    common.add_argument("--config", help="файл key=value с параметрами")
    common.add_argument("--log-level", dest="log_level", help="уровень логирования")
    common.add_argument("--dim-cap", dest="dim_cap", help="лимит числа амплитуд N^r")
    common.add_argument("--dense-cap", dest="dense_cap", help="лимит размерности для точной диагонализации")

    parser = argparse.ArgumentParser(
        prog="tlchain",
        description="Проекторы Темперли-Либа SÔ(N)/Sp̂(N), цепочки и энтропия запутанности",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Порядок регистрации определяет порядок в --help
    for module in (verify, evolve, transmit, entropy_curve, info):
        module.register(subparsers, [common])

    return parser


async def main(argv: Optional[Sequence[str]] = None, environ: Optional[dict] = None) -> int:
    """
    Разбирает аргументы, собирает конфигурацию и запускает подкоманду

    Returns:
        Код завершения: 0 успех, 1 ошибка проверки или вычисления, 2 ошибка конфигурации
    """
    environ = os.environ if environ is None else environ
    setup_logging(environ.get(f"{ENV_PREFIX}LOG_LEVEL", "INFO"))

    args = build_parser().parse_args(argv)
    flags = {key: value for key, value in vars(args).items() if key not in _NON_CONFIG_KEYS}

    try:
        config = load_config(flags, args.config, environ)
    except ConfigError as e:
        logger.error(f"❌ Ошибка конфигурации: {e}")
        return EXIT_CONFIG

    logging.getLogger().setLevel(config.log_level)
    logger.debug(f"Конфигурация: {config}")

    try:
        return await args.handler(config)
    except ConfigError as e:
        logger.error(f"❌ Ошибка конфигурации: {e}")
        return EXIT_CONFIG
    except TLChainError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_FAILURE
    except Exception as e:
        logger.exception(f"❌ Критическая ошибка: {e}")
        return EXIT_FAILURE


def run() -> None:
    # Загружаем переменные окружения из .env файла
    load_dotenv()
    try:
        code = asyncio.run(main())
    except KeyboardInterrupt:
        print("\n👋 Остановлено пользователем", file=sys.stderr)
        code = 130
    sys.exit(code)


if __name__ == "__main__":
    run()
