"""
ncmseg - Сегментация жидкости на OCT B-сканах
==============================================

Пакет предоставляет инструменты для:
- Перевода изображения в нейтрософскую область (T, I, F)
- Кластеризации интенсивностей методами NCM и FCM
- Сегментации областей жидкости и оценки по экспертной разметке
- Генерации синтетических B-сканов с известной разметкой

Основные модули:
    core: ядро пакета (преобразование, кластеризация, сегментация, валидатор)
    models: модели данных (изображения, конфигурация, состояние, набор данных)
    utils: вспомогательные утилиты (метрики, файлы, форматирование)
    data: синтетические данные (фантомы)
"""

__version__ = '0.1.0'
__author__ = 'Murodjon'
__email__ = 'khudoykulov2003@gmail.com'

# core импортируется раньше models: модели используют core.validator
from .core import ValidationError, NumericError, to_neutrosophic, fcm_fit, ncm_fit, segment_bscan
from .models import GrayImage, BinaryMask, NcmConfig, WeightForm
from .utils import confusion, dice, sensitivity, precision, load_gray, save_mask
from .data import PhantomSpec, generate_phantom

__all__ = [
    'ValidationError',
    'NumericError',
    'to_neutrosophic',
    'fcm_fit',
    'ncm_fit',
    'segment_bscan',
    'GrayImage',
    'BinaryMask',
    'NcmConfig',
    'WeightForm',
    'confusion',
    'dice',
    'sensitivity',
    'precision',
    'load_gray',
    'save_mask',
    'PhantomSpec',
    'generate_phantom'
]
