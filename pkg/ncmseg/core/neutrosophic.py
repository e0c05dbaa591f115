"""
Модуль перевода изображения в нейтрософскую область
=====================================================

Каждый пиксель описывается тройкой (T, I, F):
    T - нормированное локальное среднее интенсивности
    I - нормированное отклонение пикселя от локального среднего
    F - 1 - T

Основные функции:
    local_mean() - усредняющий фильтр w x w с повторением краевых пикселей
    min_max_normalize() - нормировка в [0, 1] с правилом для вырожденного диапазона
    to_neutrosophic() - построение карт T, I, F, delta
"""

import logging

import numpy as np
from scipy.ndimage import uniform_filter

from ..models.image import GrayImage, NeutrosophicImage
from .validator import ParamValidator

logger = logging.getLogger(__name__)

# Диапазон меньше порога считается нулевым
DEGENERATE_RANGE = 1e-12


def local_mean(image: GrayImage, w: int) -> GrayImage:
    """
    Локальное среднее в окне w x w

    Граница обрабатывается повторением краевых пикселей
    (координаты окна зажимаются в пределах изображения).

    Args:
        image: исходное изображение
        w: нечетный размер окна, не больше 2 * min(width, height) - 1

    Returns:
        GrayImage: изображение локальных средних

    Raises:
        ValidationError: если окно четное, неположительное или слишком большое

    Example:
        >>> flat = GrayImage(np.full((5, 5), 0.4))
        >>> np.allclose(local_mean(flat, 3).data, 0.4)
        True
    """
    w = ParamValidator.validate_window(w, image.width, image.height)

    if w == 1:
        return image

    mean = uniform_filter(image.data, size=w, mode='nearest')
    return GrayImage(np.clip(mean, 0.0, 1.0))


def min_max_normalize(values: np.ndarray, degenerate_value: float) -> np.ndarray:
    """
    Нормировка (v - min) / (max - min)

    Args:
        values: массив значений
        degenerate_value: значение для всех элементов при диапазоне < 1e-12

    Returns:
        np.ndarray: нормированный массив того же размера
    """
    low = values.min()
    span = values.max() - low

    if span < DEGENERATE_RANGE:
        return np.full(values.shape, degenerate_value, dtype=np.float64)

    return (values - low) / span


def to_neutrosophic(image: GrayImage, w: int) -> NeutrosophicImage:
    """
    Перевести изображение в нейтрософскую область

    T = норм(локальное среднее), delta = |g - среднее|,
    I = норм(delta), F = 1 - T. При нулевом диапазоне T = 0.5, I = 0.

    Args:
        image: исходное изображение
        w: нечетный размер окна усреднения

    Returns:
        NeutrosophicImage: карты T, I, F, delta и локального среднего

    Raises:
        ValidationError: при некорректном окне (см. local_mean)
    """
    mean = local_mean(image, w).data
    delta = np.abs(image.data - mean)

    t_map = min_max_normalize(mean, 0.5)
    i_map = min_max_normalize(delta, 0.0)
    f_map = 1.0 - t_map

    logger.debug(
        "NS-преобразование %dx%d, окно %d: диапазон среднего [%.4f, %.4f]",
        image.width, image.height, w, mean.min(), mean.max()
    )

    return NeutrosophicImage(
        t_map=t_map,
        i_map=i_map,
        f_map=f_map,
        delta_map=delta,
        mean_map=mean,
        window=w
    )


__all__ = [
    'local_mean',
    'min_max_normalize',
    'to_neutrosophic'
]
