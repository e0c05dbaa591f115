"""
Models module - модели данных ncmseg
=====================================

Модуль содержит классы для представления данных:

Классы:
    GrayImage, BinaryMask, NeutrosophicImage - растры
    NcmConfig, CliConfig, WeightForm - конфигурация
    FcmState, NcmState, SegmentationResult, StopReason - состояние и результат
    DatasetIndex, DatasetLayout, SubjectEntry, ScanEntry - набор данных
"""

from .image import GrayImage, BinaryMask, NeutrosophicImage
from .config import NcmConfig, CliConfig, WeightForm
from .state import FcmState, NcmState, SegmentationResult, StopReason
from .dataset import DatasetIndex, DatasetLayout, SubjectEntry, ScanEntry

__all__ = [
    'GrayImage',
    'BinaryMask',
    'NeutrosophicImage',
    'NcmConfig',
    'CliConfig',
    'WeightForm',
    'FcmState',
    'NcmState',
    'SegmentationResult',
    'StopReason',
    'DatasetIndex',
    'DatasetLayout',
    'SubjectEntry',
    'ScanEntry'
]
