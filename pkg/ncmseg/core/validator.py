"""
Модуль для валидации параметров и входных данных
=================================================

Предоставляет исключение и набор проверок, которые используются
моделями и алгоритмами пакета перед началом вычислений.

Основные компоненты:
    ValidationError - класс исключения для ошибок валидации
    ParamValidator - класс со статическими проверками отдельных параметров
    validate_config_keys() - проверка ключей конфигурационного словаря
"""

import math
from typing import Any, Iterable, List, Optional, Tuple

import numpy as np


class ValidationError(ValueError):
    """
    Исключение, возникающее при ошибке валидации данных

    Attributes:
        message: сообщение об ошибке
        field: поле, в котором произошла ошибка
        value: некорректное значение
    """

    def __init__(self, message: str, field: Optional[str] = None, value: Any = None):
        self.message = message
        self.field = field
        self.value = value
        super().__init__(self.message)

    def __str__(self) -> str:
        if self.field:
            return f"[{self.field}] {self.message} (значение: {self.value})"
        return self.message


class ParamValidator:
    """
    Проверки отдельных параметров

    Все методы статические, возвращают проверенное (приведенное) значение
    и выбрасывают ValidationError при нарушении ограничений.
    """

    @staticmethod
    def validate_int(value: Any, field: str, minimum: Optional[int] = None) -> int:
        """
        Проверка целого числа

        Args:
            value: значение для проверки
            field: имя поля (для сообщения об ошибке)
            minimum: минимально допустимое значение

        Returns:
            int: проверенное значение

        Raises:
            ValidationError: если значение не целое или меньше минимума
        """
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise ValidationError(
                f"Ожидалось целое число, получен {type(value).__name__}",
                field, value
            )

        value = int(value)
        if minimum is not None and value < minimum:
            raise ValidationError(f"Значение должно быть не меньше {minimum}", field, value)

        return value

    @staticmethod
    def validate_float(
        value: Any,
        field: str,
        low: Optional[float] = None,
        high: Optional[float] = None,
        low_inclusive: bool = True,
        high_inclusive: bool = True
    ) -> float:
        """
        Проверка вещественного числа с опциональными границами

        Args:
            value: значение для проверки
            field: имя поля
            low: нижняя граница (None - без ограничения)
            high: верхняя граница (None - без ограничения)
            low_inclusive: включать ли нижнюю границу
            high_inclusive: включать ли верхнюю границу

        Returns:
            float: проверенное значение

        Raises:
            ValidationError: если значение не число, не конечно или вне границ
        """
        if isinstance(value, bool):
            raise ValidationError("Ожидалось число, получен bool", field, value)

        try:
            number = float(value)
        except (TypeError, ValueError):
            raise ValidationError(
                f"Ожидалось число, получен {type(value).__name__}",
                field, value
            )

        if not math.isfinite(number):
            raise ValidationError("Значение должно быть конечным", field, value)

        if low is not None:
            if number < low or (not low_inclusive and number == low):
                sign = '>=' if low_inclusive else '>'
                raise ValidationError(f"Значение должно быть {sign} {low}", field, value)

        if high is not None:
            if number > high or (not high_inclusive and number == high):
                sign = '<=' if high_inclusive else '<'
                raise ValidationError(f"Значение должно быть {sign} {high}", field, value)

        return number

    @staticmethod
    def validate_window(w: Any, width: Optional[int] = None, height: Optional[int] = None) -> int:
        """
        Проверка размера окна усредняющего фильтра

        Окно центрированное, поэтому допускаются только нечетные размеры.
        Если известны размеры изображения, окно не должно превышать
        2 * min(width, height) - 1.

        Args:
            w: размер окна
            width: ширина изображения
            height: высота изображения

        Returns:
            int: проверенный размер окна

        Raises:
            ValidationError: если окно четное, неположительное или слишком большое
        """
        w = ParamValidator.validate_int(w, 'window', minimum=1)

        if w % 2 == 0:
            raise ValidationError("Размер окна должен быть нечетным", 'window', w)

        if width is not None and height is not None:
            limit = 2 * min(width, height) - 1
            if w > limit:
                raise ValidationError(
                    f"Размер окна не может превышать {limit} для изображения {width}x{height}",
                    'window', w
                )

        return w

    @staticmethod
    def validate_interval(
        interval: Any,
        field: str,
        low: float = 0.0,
        high: float = 1.0
    ) -> Tuple[float, float]:
        """
        Проверка интервала (min, max) внутри [low, high]

        Args:
            interval: пара значений
            field: имя поля
            low: нижняя допустимая граница
            high: верхняя допустимая граница

        Returns:
            Tuple[float, float]: проверенный интервал

        Raises:
            ValidationError: если интервал некорректен
        """
        try:
            lo, hi = interval
        except (TypeError, ValueError):
            raise ValidationError("Интервал должен состоять из двух чисел", field, interval)

        lo = ParamValidator.validate_float(lo, field, low, high)
        hi = ParamValidator.validate_float(hi, field, low, high)

        if lo > hi:
            raise ValidationError("Нижняя граница интервала больше верхней", field, interval)

        return lo, hi

    @staticmethod
    def validate_unit_array(data: Any, field: str, ndim: Optional[int] = None) -> np.ndarray:
        """
        Проверка массива интенсивностей в [0, 1]

        Args:
            data: массив или вложенный список
            field: имя поля
            ndim: требуемая размерность (None - любая)

        Returns:
            np.ndarray: массив float64

        Raises:
            ValidationError: если массив пустой, не той размерности,
                содержит нечисловые или выходящие за [0, 1] значения
        """
        try:
            array = np.asarray(data, dtype=np.float64)
        except (TypeError, ValueError):
            raise ValidationError("Массив должен содержать числа", field, type(data).__name__)

        if ndim is not None and array.ndim != ndim:
            raise ValidationError(f"Ожидался массив размерности {ndim}", field, array.shape)

        if array.size == 0:
            raise ValidationError("Массив не может быть пустым", field, array.shape)

        if not np.all(np.isfinite(array)):
            raise ValidationError("Массив содержит нечисловые значения", field, array.shape)

        if array.min() < 0.0 or array.max() > 1.0:
            raise ValidationError(
                "Значения должны лежать в диапазоне [0, 1]",
                field, (float(array.min()), float(array.max()))
            )

        return array


def validate_config_keys(config: dict, allowed: Iterable[str], source: str = 'config') -> List[str]:
    """
    Проверка ключей конфигурационного словаря

    Args:
        config: словарь из конфигурационного файла
        allowed: допустимые ключи
        source: название источника (для сообщения)

    Returns:
        List[str]: отсортированный список ключей

    Raises:
        ValidationError: если встретились неизвестные ключи
    """
    if not isinstance(config, dict):
        raise ValidationError("Конфигурация должна быть объектом JSON", source, type(config).__name__)

    unknown = sorted(set(config) - set(allowed))
    if unknown:
        raise ValidationError(f"Неизвестные ключи конфигурации: {unknown}", source, unknown)

    return sorted(config)


__all__ = [
    'ValidationError',
    'ParamValidator',
    'validate_config_keys'
]
