"""
tlchain - Работа с файлами результатов
Асинхронная запись и чтение артефактов, запуск вычислений в пуле потоков
"""

import asyncio
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Iterable, Optional

import aiofiles

logger = logging.getLogger(__name__)


async def run_in_executor(func: Callable, *args, **kwargs) -> Any:
    """
    Запускает синхронную функцию в отдельном потоке

    Args:
        func: Функция для выполнения
        *args: Позиционные аргументы
        **kwargs: Именованные аргументы

    Returns:
        Результат выполнения функции
    """
    loop = asyncio.get_running_loop()
    return await loop.run_in_executor(
        None,
        lambda: func(*args, **kwargs)
    )


async def gather_in_executor(func: Callable, items: Iterable) -> list:
    """Применяет func к каждому элементу в пуле потоков; порядок результатов совпадает с входным"""
    return list(await asyncio.gather(*(run_in_executor(func, item) for item in items)))


async def save_text(text: str, path: str) -> str:
    """
    Сохраняет текст в файл асинхронно

    Args:
        text: Содержимое
        path: Путь к файлу

    Returns:
        Путь к сохранённому файлу
    """
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(path, "w", encoding="utf-8", newline="\n") as f:
        await f.write(text)
    logger.debug(f"Записан файл: {path}")
    return path


async def save_bytes(data: bytes, path: str) -> str:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    async with aiofiles.open(path, "wb") as f:
        await f.write(data)
    logger.debug(f"Записан файл: {path}")
    return path


async def read_text(path: str) -> str:
    """
    Читает файл асинхронно

    Args:
        path: Путь к файлу

    Returns:
        Содержимое файла
    """
    async with aiofiles.open(path, "r", encoding="utf-8") as f:
        return await f.read()



async def emit(text: str, path: Optional[str] = None) -> None:
    """Пишет результат в файл или, если путь не задан, в stdout"""
    if path:
        await save_text(text, path)
        logger.info(f"💾 Результат сохранён: {path}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
