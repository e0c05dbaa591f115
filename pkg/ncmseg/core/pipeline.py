"""
Модуль сегментации жидкости на B-сканах
========================================

Последовательность: нейтрософское преобразование -> кластеризация
интенсивностей (по умолчанию 12 кластеров) -> сортировка кластеров по
уровню серого центров -> кластер с минимальным центром = жидкость (1),
остальные = ткань (0).

Основные функции:
    assign_pixels() - жесткое отнесение точек к кластерам (argmax T)
    binarize() - бинаризация карты кластеров
    remove_small_components() - удаление мелких компонент жидкости
    segment_bscan() - полная сегментация одного скана
"""

import logging
import time
from typing import Optional, Sequence, Union

import numpy as np
from scipy.ndimage import label

from ..models.config import NcmConfig
from ..models.image import BinaryMask, GrayImage
from ..models.state import FcmState, NcmState, SegmentationResult
from .clustering import fcm_fit, ncm_fit
from .neutrosophic import to_neutrosophic
from .validator import ValidationError

logger = logging.getLogger(__name__)

# 8-связность
_CONNECTIVITY = np.ones((3, 3), dtype=int)


def assign_pixels(state: Union[NcmState, FcmState]) -> np.ndarray:
    """
    Номер кластера с максимальной степенью истинности для каждой точки

    При равенстве выбирается меньший индекс.

    Args:
        state: состояние NCM (по T) или FCM (по степеням принадлежности)

    Returns:
        np.ndarray: индексы кластеров (N,)
    """
    memberships = state.t_memb if isinstance(state, NcmState) else state.memberships
    return np.argmax(memberships, axis=1)


def binarize(assignments: np.ndarray, centers: Sequence[float]) -> BinaryMask:
    """
    Бинаризация карты кластеров

    Пиксели кластера с минимальным центром получают метку 1,
    остальные (включая -1 вне ROI) - метку 0.

    Args:
        assignments: карта номеров кластеров (height, width)
        centers: центры кластеров

    Returns:
        BinaryMask: маска жидкости

    Example:
        >>> binarize(np.array([[0, 1, 2]]), [0.8, 0.05, 0.4]).data.tolist()
        [[0, 1, 0]]
    """
    order = np.argsort(np.asarray(centers, dtype=np.float64), kind='stable')
    labels = np.asarray(assignments)
    return BinaryMask((labels == order[0]).astype(np.uint8))


def remove_small_components(mask: BinaryMask, min_area: int) -> BinaryMask:
    """
    Удалить 8-связные компоненты жидкости площадью меньше min_area

    Args:
        mask: исходная маска
        min_area: минимальная площадь в пикселях (0 - без изменений)

    Returns:
        BinaryMask: отфильтрованная маска
    """
    if min_area <= 0 or mask.fluid_pixels == 0:
        return mask

    components, count = label(mask.data, structure=_CONNECTIVITY)
    sizes = np.bincount(components.ravel())
    keep = sizes >= min_area
    keep[0] = False

    logger.debug("Фильтр площади %d: оставлено %d из %d компонент", min_area, int(keep.sum()), count)
    return BinaryMask(keep[components].astype(np.uint8))


def _check_roi(image: GrayImage, roi: Optional[BinaryMask], clusters: int) -> np.ndarray:
    if roi is None:
        return np.ones(image.shape, dtype=bool)

    if roi.shape != image.shape:
        raise ValidationError(
            f"Размер ROI должен совпадать с изображением {image.width}x{image.height}",
            'roi', f"{roi.width}x{roi.height}"
        )

    inside = roi.as_bool()
    if inside.sum() < clusters:
        raise ValidationError(
            f"ROI содержит меньше пикселей, чем кластеров ({clusters})",
            'roi', int(inside.sum())
        )

    return inside


def segment_bscan(
    image: GrayImage,
    config: Optional[NcmConfig] = None,
    roi: Optional[BinaryMask] = None,
    method: str = 'ncm'
) -> SegmentationResult:
    """
    Сегментация жидкости на B-скане

    Args:
        image: полутоновое изображение
        config: гиперпараметры (по умолчанию NcmConfig(), 12 кластеров)
        roi: маска области интереса (по умолчанию все изображение)
        method: 'ncm' или 'fcm' (базовый FCM с теми же шагами бинаризации)

    Returns:
        SegmentationResult: маска, состояние, отсортированные центры и карта кластеров

    Raises:
        ValidationError: при несовпадении размеров ROI, слишком маленькой ROI
            или неизвестном методе
        NumericError: при нечисловых значениях в решателе
    """
    config = config or NcmConfig()
    started = time.perf_counter()

    if method not in ('ncm', 'fcm'):
        raise ValidationError("Допустимые методы: ['ncm', 'fcm']", 'method', method)

    inside = _check_roi(image, roi, config.clusters)
    neutrosophic = to_neutrosophic(image, config.window)
    data = image.data[inside]

    if method == 'ncm':
        state = ncm_fit(data, config)
    else:
        state = fcm_fit(
            data, config.clusters, m=config.m, eps=config.eps,
            max_iter=config.max_iter, distance_floor=config.distance_floor
        )

    assignments = np.full(image.shape, -1, dtype=np.int64)
    assignments[inside] = assign_pixels(state)

    mask = remove_small_components(binarize(assignments, state.centers), config.min_area)
    elapsed = time.perf_counter() - started

    logger.info(
        "Сегментация %s (%s): %d итераций, жидкость %d пикселей, %.3f c",
        image, method, state.iterations, mask.fluid_pixels, elapsed
    )

    return SegmentationResult(
        mask=mask,
        state=state,
        sorted_centers=np.sort(state.centers),
        assignments=assignments,
        elapsed=elapsed,
        neutrosophic=neutrosophic,
        roi=roi,
        method=method
    )


__all__ = [
    'assign_pixels',
    'binarize',
    'remove_small_components',
    'segment_bscan'
]
