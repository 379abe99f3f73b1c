# tlchain - Пакет обработчиков подкоманд
