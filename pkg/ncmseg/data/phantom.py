"""
Модуль синтетических B-сканов
==============================

Генерирует фантомы OCT с известной разметкой: горизонтальные слои
ткани разной яркости, темные эллиптические включения жидкости и
аддитивный гауссов шум. Маска фантома точно совпадает с пикселями
включений, поэтому служит эталоном для проверки сегментации.

Основные компоненты:
    PhantomSpec - параметры фантома
    PhantomError - исключение при невозможности разместить включения
    generate_phantom() - генерация пары (изображение, маска)
"""

import logging
from dataclasses import dataclass, replace
from typing import Tuple

import numpy as np

from ..core.validator import ParamValidator, ValidationError
from ..models.image import BinaryMask, GrayImage

logger = logging.getLogger(__name__)

# Число попыток размещения одного включения
MAX_PLACEMENT_ATTEMPTS = 200


class PhantomError(RuntimeError):
    """Исключение: не удалось разместить непересекающиеся включения"""
    pass


@dataclass(frozen=True)
class PhantomSpec:
    """
    Параметры синтетического B-скана

    Attributes:
        width: ширина в пикселях
        height: высота в пикселях
        layer_count: число горизонтальных слоев ткани
        blob_count: число включений жидкости
        blob_intensity: диапазон яркости включений
        background_intensity: диапазон яркости слоев
        noise_std: СКО гауссова шума
        seed: зерно генератора
        blob_radius: диапазон полуосей эллипсов в долях min(width, height)

    Example:
        >>> spec = PhantomSpec(width=128, height=96, seed=3)
        >>> image, mask = generate_phantom(spec)
    """

    width: int = 512
    height: int = 496
    layer_count: int = 6
    blob_count: int = 4
    blob_intensity: Tuple[float, float] = (0.0, 0.1)
    background_intensity: Tuple[float, float] = (0.4, 0.9)
    noise_std: float = 0.02
    seed: int = 0
    blob_radius: Tuple[float, float] = (0.06, 0.095)

    def __post_init__(self):
        ParamValidator.validate_int(self.width, 'width', minimum=1)
        ParamValidator.validate_int(self.height, 'height', minimum=1)
        ParamValidator.validate_int(self.layer_count, 'layer_count', minimum=1)
        ParamValidator.validate_int(self.blob_count, 'blob_count', minimum=0)
        ParamValidator.validate_int(self.seed, 'seed', minimum=0)
        ParamValidator.validate_float(self.noise_std, 'noise_std', low=0.0)

        blob = ParamValidator.validate_interval(self.blob_intensity, 'blob_intensity', 0.0, 1.0)
        background = ParamValidator.validate_interval(self.background_intensity, 'background_intensity', 0.0, 1.0)
        radius = ParamValidator.validate_interval(self.blob_radius, 'blob_radius', 0.0, 0.5)

        if blob[1] >= background[0]:
            raise ValidationError(
                f"Максимум яркости включений должен быть меньше минимума фона {background[0]}",
                'blob_intensity', blob[1]
            )

        if radius[0] <= 0.0:
            raise ValidationError("Радиус включений должен быть положительным", 'blob_radius', radius[0])

        object.__setattr__(self, 'blob_intensity', blob)
        object.__setattr__(self, 'background_intensity', background)
        object.__setattr__(self, 'blob_radius', radius)

    def with_updates(self, **changes) -> 'PhantomSpec':
        return replace(self, **changes)


def _layer_image(spec: PhantomSpec, rng: np.random.Generator) -> np.ndarray:
    """Горизонтальные слои со случайными границами и яркостями"""
    low, high = spec.background_intensity
    cut_count = min(spec.layer_count - 1, spec.height - 1)
    cuts = np.sort(rng.choice(np.arange(1, spec.height), size=cut_count, replace=False))
    bounds = np.concatenate(([0], cuts, [spec.height]))
    levels = rng.uniform(low, high, size=len(bounds) - 1)

    image = np.empty((spec.height, spec.width), dtype=np.float64)
    for level, start, stop in zip(levels, bounds[:-1], bounds[1:]):
        image[start:stop, :] = level

    return image


def _place_blobs(spec: PhantomSpec, rng: np.random.Generator) -> np.ndarray:
    """Непересекающиеся эллипсы внутри изображения: карта номеров 1..blob_count, 0 - фон"""
    labels = np.zeros((spec.height, spec.width), dtype=np.int32)
    mask = labels > 0
    rows, cols = np.mgrid[0:spec.height, 0:spec.width]
    scale = min(spec.width, spec.height)
    r_low, r_high = spec.blob_radius

    for blob in range(spec.blob_count):
        for attempt in range(MAX_PLACEMENT_ATTEMPTS):
            ry = max(1.0, rng.uniform(r_low, r_high) * scale)
            rx = max(1.0, rng.uniform(r_low, r_high) * scale)

            if 2 * ry >= spec.height or 2 * rx >= spec.width:
                continue

            cy = rng.uniform(ry, spec.height - 1 - ry)
            cx = rng.uniform(rx, spec.width - 1 - rx)
            ellipse = ((rows - cy) / ry) ** 2 + ((cols - cx) / rx) ** 2 <= 1.0

            # Зазор в один пиксель, чтобы включения не сливались
            grown = ((rows - cy) / (ry + 1)) ** 2 + ((cols - cx) / (rx + 1)) ** 2 <= 1.0
            if ellipse.any() and not (grown & mask).any():
                mask |= ellipse
                labels[ellipse] = blob + 1
                break
        else:
            raise PhantomError(
                f"Не удалось разместить включение {blob + 1} из {spec.blob_count} "
                f"за {MAX_PLACEMENT_ATTEMPTS} попыток"
            )

    return labels


def generate_phantom(spec: PhantomSpec = PhantomSpec()) -> Tuple[GrayImage, BinaryMask]:
    """
    Сгенерировать фантом B-скана

    Args:
        spec: параметры фантома

    Returns:
        Tuple[GrayImage, BinaryMask]: изображение и точная маска включений

    Raises:
        PhantomError: включения не удалось разместить

    Example:
        >>> image, mask = generate_phantom(PhantomSpec(noise_std=0.0, seed=1))
        >>> bool(np.array_equal(image.data < 0.2, mask.as_bool()))
        True
    """
    rng = np.random.default_rng(spec.seed)

    image = _layer_image(spec, rng)
    labels = _place_blobs(spec, rng)
    blobs = labels > 0

    low, high = spec.blob_intensity
    levels = rng.uniform(low, high, size=spec.blob_count + 1)
    image[blobs] = levels[labels[blobs]]

    if spec.noise_std > 0:
        image = np.clip(image + rng.normal(0.0, spec.noise_std, size=image.shape), 0.0, 1.0)

    logger.debug(
        "Фантом %dx%d (seed %d): %d включений, доля жидкости %.4f",
        spec.width, spec.height, spec.seed, spec.blob_count, blobs.mean()
    )

    return GrayImage(image), BinaryMask(blobs.astype(np.uint8))


__all__ = [
    'PhantomSpec',
    'PhantomError',
    'generate_phantom'
]
