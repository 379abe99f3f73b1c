"""
tlchain - Исключения
Иерархия ошибок вычислительных модулей и командной строки
"""


class TLChainError(Exception):
    """Базовое исключение tlchain"""
    pass


class InvalidSpec(TLChainError, ValueError):
    """Недопустимые параметры алгебры (семейство, N, q)"""
    pass


class IndexOutOfRange(TLChainError, IndexError):
    """Индекс состояния вне диапазона 1..N"""
    pass


class SiteOutOfRange(TLChainError, IndexError):
    """Номер узла цепочки вне допустимого диапазона"""
    pass


class DegenerateLoopConstant(TLChainError):
    """k ≤ 2: быстрота η не определена, гамильтониан цепочки не существует"""
    pass


class PoleAtRapidity(TLChainError):
    """sinh(η + θ) обращается в ноль"""
    pass


class UnsupportedSpec(TLChainError):
    """Для данной пары (семейство, N) нет замкнутой формулы"""
    pass


class DimensionCapExceeded(TLChainError):
    """Размерность пространства превышает настроенный лимит"""
    pass


class IllConditionedFit(TLChainError):
    """Полиномиальная подгонка или система восстановления плохо обусловлена"""
    pass


class ConfigError(TLChainError, ValueError):
    """Ошибка конфигурации запуска"""
    pass


class VerificationFailed(TLChainError):
    """Проверка тождества не прошла по допуску"""

    def __init__(self, check: str, residual: float, tolerance: float):
        self.check = check
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"Проверка '{check}' не пройдена: невязка {residual:.3e}, порог {tolerance:.1e}"
        )
