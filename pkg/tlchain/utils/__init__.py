# tlchain - Пакет вычислительных модулей
