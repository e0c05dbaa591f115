"""
Модуль метрик качества сегментации
===================================

Предоставляет подсчет матрицы ошибок по пикселям, коэффициент Дайса,
чувствительность и точность, а также агрегацию по субъектам и по набору.

Правила:
    - при нулевом знаменателе метрика не определена (None) и исключается
      из усреднения;
    - значение субъекта вычисляется по суммарной матрице ошибок его сканов;
    - среднее по набору - арифметическое среднее значений субъектов.

Основные компоненты:
    ConfusionCounts - матрица ошибок (TP, FP, TN, FN)
    confusion(), dice(), sensitivity(), precision(), aggregate() - функции метрик
    MetricsReport - отчет по изображениям, субъектам и среднему
    SegmentationStatistics - сборщик результатов для построения отчета
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core.validator import ValidationError
from ..models.image import BinaryMask
from .formatter import format_metrics_table

METRIC_NAMES = ('dice', 'sensitivity', 'precision')


@dataclass(frozen=True)
class ConfusionCounts:
    """
    Матрица ошибок по пикселям

    Attributes:
        tp: жидкость, найденная как жидкость
        fp: ткань, найденная как жидкость
        tn: ткань, найденная как ткань
        fn: жидкость, найденная как ткань
    """

    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: 'ConfusionCounts') -> 'ConfusionCounts':
        return ConfusionCounts(
            self.tp + other.tp,
            self.fp + other.fp,
            self.tn + other.tn,
            self.fn + other.fn
        )

    def swapped(self) -> 'ConfusionCounts':
        """Матрица при перестановке предсказания и эталона"""
        return ConfusionCounts(self.tp, self.fn, self.tn, self.fp)

    def to_dict(self) -> Dict[str, int]:
        return {'tp': self.tp, 'fp': self.fp, 'tn': self.tn, 'fn': self.fn}


def confusion(pred: BinaryMask, gt: BinaryMask) -> ConfusionCounts:
    """
    Подсчет TP, FP, TN, FN

    Args:
        pred: предсказанная маска
        gt: эталонная маска

    Returns:
        ConfusionCounts: точные попиксельные счетчики

    Raises:
        ValidationError: если размеры масок различаются
    """
    if pred.shape != gt.shape:
        raise ValidationError(
            f"Размеры масок различаются: {gt.width}x{gt.height}",
            'pred', f"{pred.width}x{pred.height}"
        )

    p = pred.as_bool()
    g = gt.as_bool()

    tp = int(np.count_nonzero(p & g))
    fp = int(np.count_nonzero(p & ~g))
    fn = int(np.count_nonzero(~p & g))
    tn = int(p.size) - tp - fp - fn

    return ConfusionCounts(tp, fp, tn, fn)


def _ratio(numerator: int, denominator: int) -> Optional[float]:
    if denominator == 0:
        return None
    return numerator / denominator


def dice(c: ConfusionCounts) -> Optional[float]:
    """
    Коэффициент Дайса: 2TP / (2TP + FP + FN)

    Returns:
        float или None, если знаменатель равен 0

    Example:
        >>> round(dice(ConfusionCounts(tp=2, fp=1, fn=1)), 4)
        0.6667
    """
    return _ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn)


def sensitivity(c: ConfusionCounts) -> Optional[float]:
    """Чувствительность: TP / (TP + FN), None при нулевом знаменателе"""
    return _ratio(c.tp, c.tp + c.fn)


def precision(c: ConfusionCounts) -> Optional[float]:
    """Точность: TP / (TP + FP), None при нулевом знаменателе"""
    return _ratio(c.tp, c.tp + c.fp)


def compute_metrics(c: ConfusionCounts) -> Dict[str, Optional[float]]:
    """Все три метрики для матрицы ошибок"""
    return {
        'dice': dice(c),
        'sensitivity': sensitivity(c),
        'precision': precision(c)
    }


def aggregate(values: Sequence[Optional[float]]) -> Optional[float]:
    """
    Арифметическое среднее определенных значений

    Args:
        values: значения метрики по субъектам (None - не определено)

    Returns:
        float: среднее; None, если ни одно значение не определено

    Raises:
        ValidationError: если список пуст

    Example:
        >>> aggregate([0.5, None, 1.0])
        0.75
    """
    values = list(values)
    if not values:
        raise ValidationError("Список значений для усреднения пуст", 'values', values)

    defined = [float(v) for v in values if v is not None]
    if not defined:
        return None

    return sum(defined) / len(defined)


@dataclass
class ImageMetrics:
    """
    Метрики одного B-скана

    Attributes:
        image_id: идентификатор скана
        subject_id: идентификатор субъекта
        counts: матрица ошибок
    """

    image_id: str
    subject_id: str
    counts: ConfusionCounts

    @property
    def metrics(self) -> Dict[str, Optional[float]]:
        return compute_metrics(self.counts)


@dataclass
class SubjectMetrics:
    """
    Метрики субъекта по суммарной матрице ошибок

    Attributes:
        subject_id: идентификатор субъекта
        counts: суммарная матрица ошибок
        images: число сканов
    """

    subject_id: str
    counts: ConfusionCounts
    images: int = 0

    @property
    def metrics(self) -> Dict[str, Optional[float]]:
        return compute_metrics(self.counts)


@dataclass
class MetricsReport:
    """
    Отчет о качестве сегментации

    Attributes:
        per_image: метрики сканов в порядке индекса
        per_subject: метрики субъектов в порядке индекса
        average: среднее по субъектам для каждой метрики
        metadata: сведения о запуске (эксперт, метод, версия)
    """

    per_image: List[ImageMetrics] = field(default_factory=list)
    per_subject: List[SubjectMetrics] = field(default_factory=list)
    average: Dict[str, Optional[float]] = field(default_factory=dict)
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self, decimals: int = 4) -> Dict[str, Any]:
        """
        Преобразовать в словарь для сериализации

        Значения метрик округляются до decimals знаков, неопределенные - None.
        """
        def rounded(values: Dict[str, Optional[float]]) -> Dict[str, Optional[float]]:
            return {k: None if v is None else round(v, decimals) for k, v in values.items()}

        return {
            'metadata': dict(self.metadata),
            'per_image': [
                {
                    'subject': item.subject_id,
                    'image': item.image_id,
                    **rounded(item.metrics),
                    'counts': item.counts.to_dict()
                }
                for item in self.per_image
            ],
            'per_subject': [
                {
                    'subject': item.subject_id,
                    'images': item.images,
                    **rounded(item.metrics),
                    'counts': item.counts.to_dict()
                }
                for item in self.per_subject
            ],
            'average': rounded(self.average)
        }

    def summary_lines(self) -> List[str]:
        """Текстовая таблица: строки субъектов и строка среднего"""
        rows = [
            {'subject': item.subject_id, **item.metrics}
            for item in self.per_subject
        ]
        rows.append({'subject': 'Ave.', **self.average})
        return format_metrics_table(rows, label='subject')


class SegmentationStatistics:
    """
    Сборщик результатов сегментации

    Записи добавляются в порядке индекса набора данных; порядок
    субъектов в отчете - порядок первого появления.

    Example:
        >>> stats = SegmentationStatistics()
        >>> stats.add('s1', 'b1', ConfusionCounts(tp=9, fp=1, tn=80, fn=10))
        >>> report = stats.build_report()
    """

    def __init__(self, metadata: Optional[Dict[str, Any]] = None):
        self.records: List[ImageMetrics] = []
        self.metadata = dict(metadata or {})

    def add(self, subject_id: str, image_id: str, counts: ConfusionCounts) -> None:
        """Добавить результат одного скана"""
        self.records.append(ImageMetrics(image_id=image_id, subject_id=subject_id, counts=counts))

    def add_masks(self, subject_id: str, image_id: str, pred: BinaryMask, gt: BinaryMask) -> ConfusionCounts:
        """Добавить результат по паре масок"""
        counts = confusion(pred, gt)
        self.add(subject_id, image_id, counts)
        return counts

    def subject_metrics(self) -> List[SubjectMetrics]:
        """Суммарные матрицы ошибок по субъектам"""
        pooled: Dict[str, SubjectMetrics] = {}

        for record in self.records:
            entry = pooled.setdefault(record.subject_id, SubjectMetrics(record.subject_id, ConfusionCounts()))
            entry.counts = entry.counts + record.counts
            entry.images += 1

        return list(pooled.values())

    def build_report(self) -> MetricsReport:
        """
        Построить отчет

        Raises:
            ValidationError: если не добавлено ни одного результата
        """
        if not self.records:
            raise ValidationError("Нет результатов для отчета", 'records', 0)

        subjects = self.subject_metrics()
        average = {
            name: aggregate([subject.metrics[name] for subject in subjects])
            for name in METRIC_NAMES
        }

        return MetricsReport(
            per_image=list(self.records),
            per_subject=subjects,
            average=average,
            metadata=dict(self.metadata, images=len(self.records), subjects=len(subjects))
        )


__all__ = [
    'METRIC_NAMES',
    'ConfusionCounts',
    'confusion',
    'dice',
    'sensitivity',
    'precision',
    'compute_metrics',
    'aggregate',
    'ImageMetrics',
    'SubjectMetrics',
    'MetricsReport',
    'SegmentationStatistics'
]
