# tlchain - Пакет форматирования вывода
