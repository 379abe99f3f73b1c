# tlchain - Главный пакет приложения
