"""
Модели изображений
==================

Предоставляет неизменяемые контейнеры для растров, с которыми работает пакет.

Основные классы:
    GrayImage - полутоновое изображение с интенсивностями в [0, 1]
    BinaryMask - бинарная маска (1 = жидкость, 0 = ткань)
    NeutrosophicImage - карты T, I, F, delta и локального среднего
"""

from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np

from ..core.validator import ValidationError, ParamValidator


def _freeze(array: np.ndarray) -> np.ndarray:
    """Копия массива только для чтения"""
    frozen = np.array(array, copy=True)
    frozen.setflags(write=False)
    return frozen


@dataclass(frozen=True)
class GrayImage:
    """
    Полутоновое изображение (B-скан)

    Данные хранятся построчно (row-major) в массиве формы (height, width).

    Attributes:
        data: интенсивности в диапазоне [0, 1]

    Example:
        >>> image = GrayImage(np.full((4, 6), 0.4))
        >>> image.width, image.height
        (6, 4)
    """

    data: np.ndarray

    def __post_init__(self):
        array = ParamValidator.validate_unit_array(self.data, 'data', ndim=2)
        object.__setattr__(self, 'data', _freeze(array))

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    @property
    def size(self) -> int:
        """Количество пикселей (width * height)"""
        return int(self.data.size)

    def flat(self) -> np.ndarray:
        """Интенсивности в порядке row-major"""
        return self.data.ravel()

    @classmethod
    def from_flat(cls, values: Any, width: int, height: int) -> 'GrayImage':
        """
        Создать изображение из плоского списка значений

        Args:
            values: интенсивности в порядке row-major
            width: ширина
            height: высота

        Raises:
            ValidationError: если длина не равна width * height
        """
        width = ParamValidator.validate_int(width, 'width', minimum=1)
        height = ParamValidator.validate_int(height, 'height', minimum=1)
        array = np.asarray(values, dtype=np.float64).ravel()

        if array.size != width * height:
            raise ValidationError(
                f"Длина данных должна быть {width * height}",
                'data', array.size
            )

        return cls(array.reshape(height, width))

    def __str__(self) -> str:
        return f"GrayImage {self.width}x{self.height}"


@dataclass(frozen=True)
class BinaryMask:
    """
    Бинарная маска сегментации

    Attributes:
        data: метки 0/1 формы (height, width), 1 = жидкость
    """

    data: np.ndarray

    def __post_init__(self):
        array = np.asarray(self.data)

        if array.ndim != 2 or array.size == 0:
            raise ValidationError("Маска должна быть непустым двумерным массивом", 'mask', array.shape)

        if array.dtype != np.bool_ and not np.all((array == 0) | (array == 1)):
            raise ValidationError("Маска может содержать только 0 и 1", 'mask', np.unique(array)[:5])

        object.__setattr__(self, 'data', _freeze(array.astype(np.uint8)))

    @property
    def width(self) -> int:
        return int(self.data.shape[1])

    @property
    def height(self) -> int:
        return int(self.data.shape[0])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    @property
    def fluid_pixels(self) -> int:
        """Количество пикселей жидкости"""
        return int(self.data.sum())

    def as_bool(self) -> np.ndarray:
        return self.data.astype(bool)

    @classmethod
    def zeros(cls, height: int, width: int) -> 'BinaryMask':
        return cls(np.zeros((height, width), dtype=np.uint8))

    @classmethod
    def ones(cls, height: int, width: int) -> 'BinaryMask':
        return cls(np.ones((height, width), dtype=np.uint8))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.data, other.data))

    def __hash__(self) -> int:
        return hash((self.shape, self.data.tobytes()))

    def __str__(self) -> str:
        return f"BinaryMask {self.width}x{self.height} (жидкость: {self.fluid_pixels})"


@dataclass(frozen=True)
class NeutrosophicImage:
    """
    Изображение в нейтрософской области

    Attributes:
        t_map: степень истинности T (нормированное локальное среднее)
        i_map: степень неопределенности I (нормированное отклонение)
        f_map: степень ложности F = 1 - T
        delta_map: |g - mean_map| для каждого пикселя
        mean_map: локальное среднее изображения
        window: размер окна, которым получено mean_map
    """

    t_map: np.ndarray
    i_map: np.ndarray
    f_map: np.ndarray
    delta_map: np.ndarray
    mean_map: np.ndarray
    window: int

    def __post_init__(self):
        shape = np.shape(self.t_map)
        for name in ('t_map', 'i_map', 'f_map', 'delta_map', 'mean_map'):
            array = np.asarray(getattr(self, name), dtype=np.float64)
            if array.shape != shape:
                raise ValidationError("Размеры карт не совпадают", name, array.shape)
            object.__setattr__(self, name, _freeze(array))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.t_map.shape

    def maps(self) -> Dict[str, np.ndarray]:
        """Словарь карт по коротким именам (t, i, f, delta)"""
        return {
            't': self.t_map,
            'i': self.i_map,
            'f': self.f_map,
            'delta': self.delta_map
        }
