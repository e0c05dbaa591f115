"""
Utils module - вспомогательные утилиты ncmseg
==============================================

Модуль содержит вспомогательные функции:

Функции:
    confusion(), dice(), sensitivity(), precision(), aggregate() - метрики
    SegmentationStatistics, MetricsReport - сбор и хранение результатов
    load_gray(), load_mask(), save_mask(), save_overlay() - растры
    index_dataset(), write_report() - набор данных и отчеты
    format_value(), format_metrics_table() - форматирование
"""

from .formatter import format_value, format_metrics_table, format_segmentation_summary
from .metrics import (
    ConfusionCounts,
    MetricsReport,
    SegmentationStatistics,
    aggregate,
    confusion,
    dice,
    precision,
    sensitivity
)
from .file_handler import (
    DatasetError,
    FileHandlerError,
    ImageFormatError,
    ImageNotFoundError,
    index_dataset,
    load_gray,
    load_mask,
    save_mask,
    save_overlay,
    write_report
)

__all__ = [
    'format_value',
    'format_metrics_table',
    'format_segmentation_summary',
    'ConfusionCounts',
    'MetricsReport',
    'SegmentationStatistics',
    'aggregate',
    'confusion',
    'dice',
    'precision',
    'sensitivity',
    'DatasetError',
    'FileHandlerError',
    'ImageFormatError',
    'ImageNotFoundError',
    'index_dataset',
    'load_gray',
    'load_mask',
    'save_mask',
    'save_overlay',
    'write_report'
]
