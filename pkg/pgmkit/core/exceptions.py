from typing import Optional


class ToolkitError(Exception):
    """Базовая ошибка инструментария."""

    exit_code = 1


class ParseError(ToolkitError):
    """Файл или JSON не удалось разобрать."""

    exit_code = 2

    def __init__(self, message: str, offset: Optional[int] = None) -> None:
        self.offset = offset
        if offset is not None:
            message = f'{message} (byte offset {offset})'
        super().__init__(message)


class RangeError(ToolkitError):
    """Значение вне [0, 1] или не конечно."""


class IoError(ToolkitError):
    exit_code = 2


class SchemaError(ToolkitError):
    """JSON аннотаций не соответствует схеме."""

    exit_code = 2


class DomainError(ToolkitError, ValueError):
    """Нарушено предусловие операции."""


class ResourceError(ToolkitError):
    """Вычисление превышает бюджет памяти."""


class UsageError(ToolkitError):
    """Неверное значение параметра командной строки."""

    exit_code = 2
